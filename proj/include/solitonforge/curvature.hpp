#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/expr.hpp"
#include "solitonforge/group.hpp"
#include "solitonforge/jet.hpp"
#include "solitonforge/linalg.hpp"
#include "solitonforge/metric.hpp"

namespace solitonforge {

/// A scalar field and its frame derivatives at one point:
/// d1[i] = E_i h, d2(i, j) = E_j(E_i h).
struct FrameDerivs {
    double value = 0.0;
    std::vector<double> d1;
    RealMatrix d2;
};

/// frame must hold order-1 jets of the frame coefficients at the point.
inline FrameDerivs frame_derivs(const Matrix<Jet>& frame, const Expr& h, std::span<const double> p)
{
    const int n = frame.rows();
    const Jet hj = eval_jet(h, p, 2);
    FrameDerivs out;
    out.value = hj.value();
    out.d1.resize(static_cast<std::size_t>(n));
    out.d2 = RealMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        const Jet ei = apply_frame(frame, i, hj);
        out.d1[static_cast<std::size_t>(i)] = ei.value();
        for (int j = 0; j < n; ++j)
            out.d2(i, j) = apply_frame(frame, j, ei).value();
    }
    return out;
}

inline FrameDerivs frame_derivs(const FInvariantMetric& m, std::span<const double> p)
{
    m.f_at(p);
    return frame_derivs(m.group().frame_jets(p, 1), m.f(), p);
}

namespace detail {

inline double delta(int a, int b) noexcept { return a == b ? 1.0 : 0.0; }

/// A_ijk = 2f Gamma_ijk.
inline Tensor3 koszul_numerators(const StructureConstants& al, const FrameDerivs& fd)
{
    const int n = al.dim();
    const double f = fd.value;
    const auto& fi = fd.d1;
    Tensor3 a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a(i, j, k) = delta(j, k) * fi[static_cast<std::size_t>(i)] +
                             delta(i, k) * fi[static_cast<std::size_t>(j)] -
                             delta(i, j) * fi[static_cast<std::size_t>(k)] +
                             f * (al(i, j, k) + al(k, i, j) - al(j, k, i));
    return a;
}

} // namespace detail

/// Gamma with nabla_{E_i} E_j = sum_k gamma(i,j,k) E_k.
inline Tensor3 connection_coeffs(const StructureConstants& al, const FrameDerivs& fd)
{
    Tensor3 a = detail::koszul_numerators(al, fd);
    const int n = al.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a(i, j, k) /= 2.0 * fd.value;
    return a;
}

inline Tensor3 connection_coeffs(const FInvariantMetric& m, std::span<const double> p)
{
    return connection_coeffs(m.group().alpha(), frame_derivs(m, p));
}

/// R(E_i,E_j)E_k = sum_l R(i,j,k,l) E_l, closed frame formula.
inline Tensor4 riemann_frame(const StructureConstants& al, const FrameDerivs& fd)
{
    using detail::delta;
    const int n = al.dim();
    const double f = fd.value;
    auto fi = [&](int i) { return fd.d1[static_cast<std::size_t>(i)]; };
    auto fij = [&](int i, int j) { return fd.d2(i, j); };
    const Tensor3 a = detail::koszul_numerators(al, fd);
    Tensor4 r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 2.0 * f *
                               (delta(l, j) * fij(k, i) - delta(j, k) * fij(l, i) -
                                delta(l, i) * fij(k, j) + delta(i, k) * fij(l, j));
                    s -= 2.0 * fi(i) * (delta(l, j) * fi(k) - delta(j, k) * fi(l));
                    s += 2.0 * fi(j) * (delta(l, i) * fi(k) - delta(i, k) * fi(l));
                    for (int q = 0; q < n; ++q)
                        s += a(j, k, q) * a(i, q, l) - a(i, k, q) * a(j, q, l) -
                             2.0 * f * al(i, j, q) *
                                 (delta(l, q) * fi(k) - delta(q, k) * fi(l) +
                                  f * (al(q, k, l) + al(l, q, k) - al(k, l, q)));
                    r(i, j, k, l) = s / (4.0 * f * f);
                }
    return r;
}

inline Tensor4 riemann_frame(const FInvariantMetric& m, std::span<const double> p)
{
    return riemann_frame(m.group().alpha(), frame_derivs(m, p));
}

/// K(E_p,E_q) from the closed 1/(4f^3) formula.
inline double sectional(const StructureConstants& al, const FrameDerivs& fd, int p, int q)
{
    using detail::delta;
    if (p == q)
        throw InputError("sectional curvature needs p != q");
    const int n = al.dim();
    const double f = fd.value;
    auto fi = [&](int i) { return fd.d1[static_cast<std::size_t>(i)]; };
    double s = 2.0 * f * delta(p, q) * (fd.d2(q, p) + fd.d2(p, q)) -
               2.0 * f * (fd.d2(p, p) + fd.d2(q, q)) - 4.0 * delta(p, q) * fi(p) * fi(q) +
               2.0 * fi(p) * fi(p) + 2.0 * fi(q) * fi(q);
    for (int r = 0; r < n; ++r) {
        const double t1 = (2.0 * delta(r, q) * fi(q) - fi(r) + 2.0 * f * al(r, q, q)) *
                          (fi(r) + 2.0 * f * al(p, r, p));
        const double t2 = delta(r, p) * fi(q) + f * al(p, q, r);
        const double t3 = delta(q, r) * fi(p) - delta(p, q) * fi(r) + f * (al(r, p, q) - al(q, r, p));
        const double t4 = 2.0 * f * al(p, q, r) *
                          (delta(p, r) * fi(q) - delta(r, q) * fi(p) +
                           f * (al(r, q, p) + al(p, r, q) - al(q, p, r)));
        s += t1 - t2 * t2 + t3 * t3 - t4;
    }
    return s / (4.0 * f * f * f);
}

inline double sectional(const FInvariantMetric& m, int p, int q, std::span<const double> pt)
{
    return sectional(m.group().alpha(), frame_derivs(m, pt), p, q);
}

/// Commutative-group specialisation of the sectional formula.
inline double sectional_commutative(const FrameDerivs& fd, int p, int q)
{
    if (p == q)
        throw InputError("sectional curvature needs p != q");
    const double f = fd.value;
    const auto& fi = fd.d1;
    double sq = 0.0;
    for (double v : fi)
        sq += v * v;
    const double fp = fi[static_cast<std::size_t>(p)];
    const double fq = fi[static_cast<std::size_t>(q)];
    return (-f * (fd.d2(p, p) + fd.d2(q, q)) + 1.5 * (fp * fp + fq * fq) - 0.5 * sq) / (2.0 * f * f * f);
}

inline double sectional_commutative(const FInvariantMetric& m, int p, int q, std::span<const double> pt)
{
    if (!m.group().is_commutative())
        throw InputError("group '" + m.group().id() + "' is not commutative");
    return sectional_commutative(frame_derivs(m, pt), p, q);
}

namespace detail {

inline double ricci_entry(const StructureConstants& al, const FrameDerivs& fd, const Tensor3& a, int p, int q)
{
    const int n = al.dim();
    const double f = fd.value;
    auto fi = [&](int i) { return fd.d1[static_cast<std::size_t>(i)]; };
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        s += 2.0 * f *
             (delta(j, p) * fd.d2(q, j) - delta(p, q) * fd.d2(j, j) - fd.d2(q, p) +
              delta(j, q) * fd.d2(j, p));
        s -= 2.0 * fi(j) * (delta(j, p) * fi(q) - delta(p, q) * fi(j));
        s += 2.0 * fi(p) * (fi(q) - delta(j, q) * fi(j));
        for (int r = 0; r < n; ++r)
            s += a(p, q, r) * (fi(r) + 2.0 * f * al(j, r, j)) - a(j, q, r) * a(p, r, j) -
                 2.0 * f * al(j, p, r) *
                     (delta(j, r) * fi(q) - delta(r, q) * fi(j) +
                      f * (al(r, q, j) + al(j, r, q) - al(q, j, r)));
    }
    return s / (4.0 * f * f);
}

} // namespace detail

/// Ric(E_p,E_q) from the closed 1/(4f^2) formula.
inline double ricci_frame(const StructureConstants& al, const FrameDerivs& fd, int p, int q)
{
    return detail::ricci_entry(al, fd, detail::koszul_numerators(al, fd), p, q);
}

inline RealMatrix ricci_frame(const StructureConstants& al, const FrameDerivs& fd)
{
    const int n = al.dim();
    const Tensor3 a = detail::koszul_numerators(al, fd);
    RealMatrix ric(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            ric(p, q) = detail::ricci_entry(al, fd, a, p, q);
    return ric;
}

inline double ricci_frame(const FInvariantMetric& m, int p, int q, std::span<const double> pt)
{
    return ricci_frame(m.group().alpha(), frame_derivs(m, pt), p, q);
}

inline RealMatrix ricci_frame(const FInvariantMetric& m, std::span<const double> pt)
{
    return ricci_frame(m.group().alpha(), frame_derivs(m, pt));
}

/// <R(E_p,E_q)E_q,E_p>/f^2 read off a Riemann array.
inline double sectional_from_riemann(const Tensor4& r, double f, int p, int q)
{
    return r(p, q, q, p) / f;
}

/// sum_j R(j,p,q,j), the trace of X -> R(X,E_p)E_q.
inline RealMatrix ricci_from_riemann(const Tensor4& r)
{
    const int n = r.dim();
    RealMatrix ric(n, n, 0.0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int j = 0; j < n; ++j)
                ric(p, q) += r(j, p, q, j);
    return ric;
}

inline double scalar_curvature(const RealMatrix& ric, double f)
{
    double s = 0.0;
    for (int p = 0; p < ric.rows(); ++p)
        s += ric(p, p);
    return s / f;
}

inline double scalar_curvature(const FInvariantMetric& m, std::span<const double> pt)
{
    const FrameDerivs fd = frame_derivs(m, pt);
    return scalar_curvature(ricci_frame(m.group().alpha(), fd), fd.value);
}

/// Gaussian curvature on R x| R^+ with E_1 = y d/dy, E_2 = y d/dx, frame form.
inline double gaussian_rxr(const FrameDerivs& fd)
{
    const double f = fd.value;
    const double f1 = fd.d1[0], f2 = fd.d1[1];
    return (-f * (fd.d2(0, 0) + fd.d2(1, 1)) + f1 * f1 + f2 * f2 + f * f1 - 2.0 * f * f) / (2.0 * f * f * f);
}

/// Same quantity from coordinate partials of f at height y.
inline double gaussian_rxr_coords(const Jet& f, double y)
{
    const double v = f.value();
    const double fx = f.grad(0), fy = f.grad(1);
    return (-v * y * y * (f.hess(0, 0) + f.hess(1, 1)) + y * y * (fx * fx + fy * fy) - 2.0 * v * v) /
           (2.0 * v * v * v);
}

/// Curvature computed from the coordinate metric alone.
struct OracleCurvature {
    RealMatrix sectional;  // K(E_p,E_q), diagonal left at 0
    RealMatrix ricci;      // Ric(E_p,E_q)
    double scalar = 0.0;
};

/**
 * Levi-Civita data in coordinates: Christoffel symbols from order-3 jets of
 * g_kl, Riemann from Gamma and its derivatives, Ricci by contraction, then
 * everything projected onto the frame. Never touches alpha or the closed
 * frame formulas.
 */
inline OracleCurvature oracle_curvature(const FInvariantMetric& m, std::span<const double> pt)
{
    const int n = m.dim();
    const Matrix<Jet> g3 = metric_coords_jets(m, pt, 3);
    Matrix<Jet> g1(n, n);
    std::vector<Matrix<Jet>> dg(static_cast<std::size_t>(n), Matrix<Jet>(n, n));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            g1(k, l) = g3(k, l).truncated(1);
            for (int i = 0; i < n; ++i)
                dg[static_cast<std::size_t>(i)](k, l) = g3(k, l).derivative(i).truncated(1);
        }
    const Matrix<Jet> ginv = inverse(g1);
    auto d = [&](int i, int k, int l) -> const Jet& { return dg[static_cast<std::size_t>(i)](k, l); };

    // gamma[(k*n + i)*n + j] = Gamma^k_ij as order-1 jets
    std::vector<Jet> gamma(static_cast<std::size_t>(n * n * n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet s = Jet::constant(0.0, n, 1);
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                gamma[static_cast<std::size_t>((k * n + i) * n + j)] = 0.5 * s;
            }
    auto G = [&](int k, int i, int j) -> const Jet& {
        return gamma[static_cast<std::size_t>((k * n + i) * n + j)];
    };

    // Rup(l,i,j,k) = R^l_ijk with R(d_i,d_j)d_k = R^l_ijk d_l
    Tensor4 rup(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = G(l, j, k).grad(i) - G(l, i, k).grad(j);
                    for (int q = 0; q < n; ++q)
                        s += G(q, j, k).value() * G(l, i, q).value() - G(q, i, k).value() * G(l, j, q).value();
                    rup(l, i, j, k) = s;
                }

    RealMatrix ric_c(n, n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                ric_c(j, k) += rup(i, i, j, k);

    const RealMatrix gv = values_of(g1);
    const RealMatrix a = m.group().frame_matrix(pt);
    const double f = m.f_at(pt);
    OracleCurvature out;
    out.ricci = a * ric_c * a.transposed();
    out.sectional = RealMatrix(n, n, 0.0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q)
                continue;
            // <R(u,v)v,u> with u = E_p, v = E_q
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const double coeff = a(p, i) * a(q, j) * a(q, k);
                        if (coeff == 0.0)
                            continue;
                        for (int l = 0; l < n; ++l)
                            for (int mm = 0; mm < n; ++mm)
                                s += coeff * rup(l, i, j, k) * gv(l, mm) * a(p, mm);
                    }
            out.sectional(p, q) = s / (f * f);
        }
    out.scalar = scalar_curvature(out.ricci, f);
    return out;
}

struct CurvatureReport {
    Point point;
    RealMatrix sectional;  // diagonal left at 0
    RealMatrix ricci;
    double scalar = 0.0;
    double oracle_deviation = 0.0;  // negative when the oracle was not run
};

inline CurvatureReport curvature_report(const FInvariantMetric& m, std::span<const double> pt,
                                        bool with_oracle = true)
{
    const int n = m.dim();
    const FrameDerivs fd = frame_derivs(m, pt);
    const auto& al = m.group().alpha();
    CurvatureReport rep;
    rep.point.assign(pt.begin(), pt.end());
    rep.sectional = RealMatrix(n, n, 0.0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (p != q)
                rep.sectional(p, q) = sectional(al, fd, p, q);
    rep.ricci = ricci_frame(al, fd);
    rep.scalar = scalar_curvature(rep.ricci, fd.value);
    rep.oracle_deviation = -1.0;
    if (with_oracle) {
        const OracleCurvature o = oracle_curvature(m, pt);
        rep.oracle_deviation = std::max(max_abs_diff(rep.sectional, o.sectional), max_abs_diff(rep.ricci, o.ricci));
    }
    return rep;
}

} // namespace solitonforge
