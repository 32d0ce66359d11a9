#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/expr.hpp"
#include "solitonforge/group.hpp"
#include "solitonforge/linalg.hpp"

namespace solitonforge {

/**
 * f-left-invariant metric built from a left-invariant frame that is
 * orthonormal at the identity: g(E_i, E_j) = f * delta_ij everywhere.
 * Requires f(e) = 1 and f > 0 wherever it is evaluated.
 */
class FInvariantMetric {
public:
    FInvariantMetric(std::shared_ptr<const LieGroup> group, std::string f_text)
        : group_(std::move(group)), f_text_(std::move(f_text)), f_(parse(f_text_, group_->coords()))
    {
        const double fe = eval(f_, group_->identity());
        if (std::abs(fe - 1.0) > 1e-12)
            throw InputError("f(e) must equal 1, got " + std::to_string(fe) + " for f = " + f_text_);
    }

    const LieGroup& group() const noexcept { return *group_; }
    const std::shared_ptr<const LieGroup>& group_ptr() const noexcept { return group_; }
    const Expr& f() const noexcept { return f_; }
    const std::string& f_text() const noexcept { return f_text_; }
    int dim() const noexcept { return group_->dim(); }

    double f_at(std::span<const double> p) const
    {
        group_->require_domain(p);
        const double v = eval(f_, p);
        if (!(v > 0.0))
            throw DomainError("f = " + f_text_ + " is not positive at " + LieGroup::format_point(p));
        return v;
    }

private:
    std::shared_ptr<const LieGroup> group_;
    std::string f_text_;
    Expr f_;
};

/// Frame components g(E_i, E_j) = f(p) * I.
inline RealMatrix metric_frame(const FInvariantMetric& m, std::span<const double> p)
{
    const double f = m.f_at(p);
    RealMatrix g(m.dim(), m.dim(), 0.0);
    for (int i = 0; i < m.dim(); ++i)
        g(i, i) = f;
    return g;
}

/// Coordinate components g_kl = f * (C C^T)_kl with C the inverse frame
/// matrix, as jets of the requested order.
inline Matrix<Jet> metric_coords_jets(const FInvariantMetric& m, std::span<const double> p, int order)
{
    m.f_at(p);
    const auto& g = m.group();
    const Matrix<Jet> a = g.frame_jets(p, order);
    const Matrix<Jet> c = inverse(a);
    const Jet f = eval_jet(m.f(), p, order);
    Matrix<Jet> out = c * c.transposed();
    for (int k = 0; k < g.dim(); ++k)
        for (int l = 0; l < g.dim(); ++l)
            out(k, l) = f * out(k, l);
    return out;
}

inline RealMatrix metric_coords(const FInvariantMetric& m, std::span<const double> p)
{
    m.f_at(p);
    const RealMatrix c = inverse(m.group().frame_matrix(p));
    RealMatrix out = c * c.transposed();
    const double f = eval(m.f(), p);
    for (int k = 0; k < m.dim(); ++k)
        for (int l = 0; l < m.dim(); ++l)
            out(k, l) *= f;
    return out;
}

inline double inner(const RealMatrix& g, std::span<const double> u, std::span<const double> v)
{
    double s = 0.0;
    for (int k = 0; k < g.rows(); ++k)
        for (int l = 0; l < g.cols(); ++l)
            s += u[static_cast<std::size_t>(k)] * g(k, l) * v[static_cast<std::size_t>(l)];
    return s;
}

inline std::vector<std::vector<double>> coordinate_basis(int n)
{
    std::vector<std::vector<double>> basis(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int k = 0; k < n; ++k)
        basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1.0;
    return basis;
}

/**
 * Residual of <L_b* X, L_b* Y>_{ba} - <X, Y>_a f(ba)/f(a), maximised over the
 * (a, b) pairs and all pairs of tangent samples (coordinate basis when empty).
 * Both sides are divided by f(ba) so the value does not scale with f.
 */
inline double check_f_left_invariance(const FInvariantMetric& m,
                                      const std::vector<std::pair<Point, Point>>& pairs,
                                      std::vector<std::vector<double>> tangents = {})
{
    const auto& g = m.group();
    if (!g.has_mul())
        throw InputError("f-left invariance needs a multiplication law");
    if (tangents.empty())
        tangents = coordinate_basis(g.dim());
    double worst = 0.0;
    for (const auto& [a, b] : pairs) {
        const Point ba = multiply(g, b, a);
        const RealMatrix ga = metric_coords(m, a);
        const RealMatrix gba = metric_coords(m, ba);
        const RealMatrix jac = left_translation_jacobian(g, b, a);
        const double fa = m.f_at(a);
        const double fba = m.f_at(ba);
        std::vector<std::vector<double>> pushed;
        for (const auto& v : tangents) {
            std::vector<double> w(v.size(), 0.0);
            for (int r = 0; r < g.dim(); ++r)
                for (int c = 0; c < g.dim(); ++c)
                    w[static_cast<std::size_t>(r)] += jac(r, c) * v[static_cast<std::size_t>(c)];
            pushed.push_back(std::move(w));
        }
        for (std::size_t s = 0; s < tangents.size(); ++s)
            for (std::size_t t = 0; t < tangents.size(); ++t) {
                const double lhs = inner(gba, pushed[s], pushed[t]) / fba;
                const double rhs = inner(ga, tangents[s], tangents[t]) / fa;
                worst = std::max(worst, std::abs(lhs - rhs));
            }
    }
    return worst;
}

/// <X,[Y,Z]> = <[X,Y],Z> on the Lie algebra, i.e. alpha(j,k,i) == alpha(i,j,k).
inline bool check_bracket_symmetry(const LieGroup& g)
{
    const int n = g.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (g.alpha(j, k, i) != g.alpha(i, j, k))
                    return false;
    return true;
}

/// Ad_a as the Jacobian of x -> a.x.a^{-1} at e.
inline RealMatrix adjoint_matrix(const LieGroup& g, std::span<const double> a)
{
    const Point a_inv = inverse_element(g, a);
    const int n = g.dim();
    std::vector<Jet> aj, xj, ij;
    for (int k = 0; k < n; ++k) {
        aj.push_back(Jet::constant(a[static_cast<std::size_t>(k)], n, 1));
        xj.push_back(Jet::variable(g.identity(), k, 1));
        ij.push_back(Jet::constant(a_inv[static_cast<std::size_t>(k)], n, 1));
    }
    const auto ax = multiply_generic<Jet>(g, aj, xj);
    const auto conj = multiply_generic<Jet>(g, ax, ij);
    RealMatrix ad(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            ad(m, k) = conj[static_cast<std::size_t>(m)].grad(k);
    return ad;
}

/// max over frame pairs of |<Ad_a E_i, Ad_a E_j>_e - <E_i, E_j>_e|.
inline double check_ad_invariance(const LieGroup& g, std::span<const double> a)
{
    g.require_domain(a);
    const int n = g.dim();
    const RealMatrix ad = adjoint_matrix(g, a);
    const RealMatrix e_frame = g.frame_matrix(g.identity());
    const RealMatrix c = inverse(e_frame);
    const RealMatrix ge = c * c.transposed();
    std::vector<std::vector<double>> basis, moved;
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n), 0.0);
        for (int k = 0; k < n; ++k)
            v[static_cast<std::size_t>(k)] = e_frame(i, k);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k)
                w[static_cast<std::size_t>(r)] += ad(r, k) * v[static_cast<std::size_t>(k)];
        basis.push_back(std::move(v));
        moved.push_back(std::move(w));
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(inner(ge, moved[static_cast<std::size_t>(i)],
                                                   moved[static_cast<std::size_t>(j)]) -
                                             inner(ge, basis[static_cast<std::size_t>(i)],
                                                   basis[static_cast<std::size_t>(j)])));
    return worst;
}

inline double f_symmetry_residual(const FInvariantMetric& m,
                                  const std::vector<std::pair<Point, Point>>& pairs)
{
    const auto& g = m.group();
    double worst = 0.0;
    for (const auto& [a, b] : pairs)
        worst = std::max(worst, std::abs(eval(m.f(), multiply(g, a, b)) - eval(m.f(), multiply(g, b, a))));
    return worst;
}

/// f(ab) == f(ba) on every sampled pair, to 1e-10.
inline bool check_f_symmetric(const FInvariantMetric& m,
                              const std::vector<std::pair<Point, Point>>& pairs)
{
    if (!m.group().has_mul())
        throw InputError("f symmetry needs a multiplication law");
    return f_symmetry_residual(m, pairs) < 1e-10;
}

} // namespace solitonforge
