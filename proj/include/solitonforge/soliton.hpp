#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solitonforge/curvature.hpp"
#include "solitonforge/error.hpp"
#include "solitonforge/expr.hpp"
#include "solitonforge/group.hpp"
#include "solitonforge/jet.hpp"
#include "solitonforge/linalg.hpp"
#include "solitonforge/metric.hpp"
#include "solitonforge/sampling.hpp"
#include "solitonforge/standard_groups.hpp"

namespace solitonforge {

enum class SolitonClass { Shrinking, Steady, Expanding, Almost };

inline const char* to_string(SolitonClass c) noexcept
{
    switch (c) {
    case SolitonClass::Shrinking: return "shrinking";
    case SolitonClass::Steady: return "steady";
    case SolitonClass::Expanding: return "expanding";
    case SolitonClass::Almost: return "almost";
    }
    return "?";
}

inline SolitonClass parse_class(std::string_view s)
{
    if (s == "shrinking") return SolitonClass::Shrinking;
    if (s == "steady") return SolitonClass::Steady;
    if (s == "expanding") return SolitonClass::Expanding;
    if (s == "almost") return SolitonClass::Almost;
    throw InputError("unknown soliton class '" + std::string(s) + "'");
}

/// Sign classification; |lambda| < 1e-12 counts as steady.
inline SolitonClass classify(double lambda) noexcept
{
    if (std::abs(lambda) < 1e-12)
        return SolitonClass::Steady;
    return lambda > 0 ? SolitonClass::Shrinking : SolitonClass::Expanding;
}

enum class VectorBasis { Frame, Coords };

struct ExpectedCurvature {
    int p = 0;  // 0-based frame indices
    int q = 0;
    std::string expr;
};

struct Expectations {
    std::optional<SolitonClass> cls;
    std::optional<bool> gradient;
    std::vector<ExpectedCurvature> sectional;
    std::vector<ExpectedCurvature> ricci;
};

struct Tolerances {
    double residual = 1e-9;
    double oracle = 1e-7;
    double fd = 1e-4;
    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// Text form of a case; everything needed to rebuild it.
struct CaseSpec {
    std::string id;
    std::string title;
    std::string f = "1";
    std::vector<std::string> x;
    VectorBasis basis = VectorBasis::Frame;
    std::string lambda = "0";
    std::optional<std::string> phi;
    Expectations expected;
    std::optional<Grid> grid;
    Tolerances tol;
    std::uint64_t seed = 1;
};

/**
 * Metric, vector field X, expansion lambda (constant or a field) and an
 * optional potential, all parsed against the group's coordinates.
 */
class SolitonCase {
public:
    SolitonCase(std::shared_ptr<const LieGroup> group, CaseSpec spec)
        : spec_(std::move(spec)), metric_(std::make_shared<const FInvariantMetric>(group, spec_.f))
    {
        const auto& coords = group->coords();
        if (static_cast<int>(spec_.x.size()) != group->dim())
            throw InputError("X needs " + std::to_string(group->dim()) + " components, got " +
                             std::to_string(spec_.x.size()));
        for (const auto& t : spec_.x)
            x_.push_back(parse(t, coords));
        lambda_ = parse(spec_.lambda, coords);
        if (spec_.phi)
            phi_ = parse(*spec_.phi, coords);
        for (const auto* list : {&spec_.expected.sectional, &spec_.expected.ricci})
            for (const auto& e : *list) {
                if (e.p < 0 || e.q < 0 || e.p >= group->dim() || e.q >= group->dim())
                    throw InputError("expected curvature index out of range");
                parse(e.expr, coords);
            }
        if (spec_.grid) {
            spec_.grid->validate();
            if (static_cast<int>(spec_.grid->ranges.size()) != group->dim())
                throw InputError("grid dimension does not match the group");
            for (int k : group->positive())
                if (!(spec_.grid->ranges[static_cast<std::size_t>(k)].lo > 0.0))
                    throw InputError("grid range for " + coords[static_cast<std::size_t>(k)] +
                                     " must stay inside " + coords[static_cast<std::size_t>(k)] + " > 0");
        }
    }

    const CaseSpec& spec() const noexcept { return spec_; }
    const std::string& id() const noexcept { return spec_.id; }
    const FInvariantMetric& metric() const noexcept { return *metric_; }
    const LieGroup& group() const noexcept { return metric_->group(); }
    const std::shared_ptr<const LieGroup>& group_ptr() const noexcept { return metric_->group_ptr(); }
    const std::vector<Expr>& x() const noexcept { return x_; }
    VectorBasis basis() const noexcept { return spec_.basis; }
    const Expr& lambda() const noexcept { return lambda_; }
    const std::optional<Expr>& phi() const noexcept { return phi_; }
    const Tolerances& tol() const noexcept { return spec_.tol; }

    Grid grid() const { return spec_.grid ? *spec_.grid : group().default_grid(); }

private:
    CaseSpec spec_;
    std::shared_ptr<const FInvariantMetric> metric_;
    std::vector<Expr> x_;
    Expr lambda_;
    std::optional<Expr> phi_;
};

/// Frame components theta^i of X as order-1 coordinate jets, converting
/// coordinate input by solving A^T theta = v against the frame matrix.
inline std::vector<Jet> frame_components_jets(const LieGroup& g, const std::vector<Expr>& x, VectorBasis basis,
                                              std::span<const double> p, const Matrix<Jet>& frame1)
{
    const int n = g.dim();
    std::vector<Jet> v;
    for (const auto& e : x)
        v.push_back(eval_jet(e, p, 1));
    if (basis == VectorBasis::Frame)
        return v;
    Matrix<Jet> rhs(n, 1);
    for (int k = 0; k < n; ++k)
        rhs(k, 0) = v[static_cast<std::size_t>(k)];
    const Matrix<Jet> th = solve(frame1.transposed(), rhs);
    std::vector<Jet> out;
    for (int k = 0; k < n; ++k)
        out.push_back(th(k, 0));
    return out;
}

/// Coordinate components v = A^T theta as order-1 jets.
inline std::vector<Jet> coordinate_components_jets(const std::vector<Jet>& theta, const Matrix<Jet>& frame1)
{
    const int n = frame1.rows();
    std::vector<Jet> v;
    for (int k = 0; k < n; ++k) {
        Jet s = Jet::constant(0.0, theta.front().dim(), 1);
        for (int i = 0; i < n; ++i)
            s += frame1(i, k) * theta[static_cast<std::size_t>(i)];
        v.push_back(s);
    }
    return v;
}

/// Everything the residual checks need at one point, computed once.
struct PointData {
    Point point;
    Matrix<Jet> frame;           // order-1 jets of the frame coefficients
    FrameDerivs f;               // f, E_i f, E_j E_i f
    std::vector<Jet> theta;      // frame components of X, order-1 coordinate jets
    RealMatrix dtheta;           // dtheta(p, q) = E_p theta^q
    double lambda = 0.0;
    RealMatrix ricci;

    double th(int i) const { return theta[static_cast<std::size_t>(i)].value(); }
    /// Coordinate partial d theta^i / d x_k.
    double partial(int i, int k) const { return theta[static_cast<std::size_t>(i)].grad(k); }
};

inline PointData point_data(const LieGroup& g, const Expr& f, const std::vector<Expr>& x, VectorBasis basis,
                            const Expr& lambda, std::span<const double> p)
{
    g.require_domain(p);
    const int n = g.dim();
    PointData d;
    d.point.assign(p.begin(), p.end());
    d.frame = g.frame_jets(p, 1);
    d.f = frame_derivs(d.frame, f, p);
    if (!(d.f.value > 0.0))
        throw DomainError("f is not positive at " + LieGroup::format_point(p));
    d.theta = frame_components_jets(g, x, basis, p, d.frame);
    d.dtheta = RealMatrix(n, n);
    for (int a = 0; a < n; ++a)
        for (int q = 0; q < n; ++q)
            d.dtheta(a, q) = apply_frame(d.frame, a, d.theta[static_cast<std::size_t>(q)]).value();
    d.lambda = eval(lambda, p);
    d.ricci = ricci_frame(g.alpha(), d.f);
    return d;
}

inline PointData point_data(const SolitonCase& c, std::span<const double> p)
{
    return point_data(c.group(), c.metric().f(), c.x(), c.basis(), c.lambda(), p);
}

/// (L_X g)(E_p,E_q) = delta_pq X(f) + f(E_p theta^q + E_q theta^p)
///                    - f sum_i theta^i (alpha_ipq + alpha_iqp).
inline RealMatrix lie_derivative_metric(const StructureConstants& al, const PointData& d)
{
    const int n = al.dim();
    const double f = d.f.value;
    double xf = 0.0;
    for (int i = 0; i < n; ++i)
        xf += d.th(i) * d.f.d1[static_cast<std::size_t>(i)];
    RealMatrix l(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double s = (p == q ? xf : 0.0) + f * (d.dtheta(p, q) + d.dtheta(q, p));
            for (int i = 0; i < n; ++i)
                s -= f * d.th(i) * (al(i, p, q) + al(i, q, p));
            l(p, q) = s;
        }
    return l;
}

inline RealMatrix lie_derivative_metric(const FInvariantMetric& m, const std::vector<Expr>& x, VectorBasis basis,
                                        std::span<const double> p)
{
    return lie_derivative_metric(m.group().alpha(),
                                 point_data(m.group(), m.f(), x, basis, Expr::constant(0.0), p));
}

/// L_X g - 2(lambda g - Ric) in the frame, lambda taken pointwise.
inline RealMatrix soliton_residual(const StructureConstants& al, const PointData& d)
{
    RealMatrix r = lie_derivative_metric(al, d);
    for (int p = 0; p < r.rows(); ++p)
        for (int q = 0; q < r.cols(); ++q)
            r(p, q) -= 2.0 * ((p == q ? d.lambda * d.f.value : 0.0) - d.ricci(p, q));
    return r;
}

inline RealMatrix soliton_residual(const SolitonCase& c, std::span<const double> p)
{
    return soliton_residual(c.group().alpha(), point_data(c, p));
}

/// Same residual; lambda is a field anyway, so this differs only in name.
inline RealMatrix almost_soliton_residual(const SolitonCase& c, std::span<const double> p)
{
    return soliton_residual(c, p);
}

/// Frame components of grad phi: theta^i = (E_i phi) / f.
inline std::vector<double> gradient_components(const FInvariantMetric& m, const Expr& phi, std::span<const double> p)
{
    const double f = m.f_at(p);
    const Jet h = eval_jet(phi, p, 1);
    const Matrix<Jet> a = m.group().frame_jets(p, 0);
    std::vector<double> out;
    for (int i = 0; i < m.dim(); ++i)
        out.push_back(apply_frame(a, i, h).value() / f);
    return out;
}

/// max_{k,l} |d_k w_l - d_l w_k| for the 1-form w = g(X, .) in coordinates.
inline double closedness_defect(const FInvariantMetric& m, const std::vector<Expr>& x, VectorBasis basis,
                                std::span<const double> p)
{
    const int n = m.dim();
    const auto& g = m.group();
    const Matrix<Jet> frame1 = g.frame_jets(p, 1);
    const auto theta = frame_components_jets(g, x, basis, p, frame1);
    const auto v = coordinate_components_jets(theta, frame1);
    const Matrix<Jet> gc = metric_coords_jets(m, p, 1);
    std::vector<Jet> w;
    for (int l = 0; l < n; ++l) {
        Jet s = Jet::constant(0.0, n, 1);
        for (int k = 0; k < n; ++k)
            s += gc(l, k) * v[static_cast<std::size_t>(k)];
        w.push_back(s);
    }
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            worst = std::max(worst, std::abs(w[static_cast<std::size_t>(l)].grad(k) -
                                             w[static_cast<std::size_t>(k)].grad(l)));
    return worst;
}

/// Largest closedness defect over the points; bounded away from zero
/// certifies that X is not a gradient on a simply connected domain.
inline double nongradience_certificate(const FInvariantMetric& m, const std::vector<Expr>& x, VectorBasis basis,
                                       const std::vector<Point>& points)
{
    double worst = 0.0;
    for (const auto& p : points)
        worst = std::max(worst, closedness_defect(m, x, basis, p));
    return worst;
}

// ---------------------------------------------------------------------------
// Specialised soliton systems, one per standard group. Each evaluates the
// group's reduced system entry by entry as LHS - RHS.

namespace detail {

inline RealMatrix symmetric_fill(int n, const std::vector<std::tuple<int, int, double>>& entries)
{
    RealMatrix r(n, n, 0.0);
    for (auto [p, q, v] : entries) {
        r(p, q) = v;
        r(q, p) = v;
    }
    return r;
}

inline RealMatrix system_r2(const PointData& d)
{
    const double f = d.f.value;
    const double fx = d.f.d1[0], fy = d.f.d1[1];
    const double th = d.th(0), eta = d.th(1);
    const double kappa = sectional_commutative(d.f, 0, 1);
    const double lam = d.lambda;
    return symmetric_fill(2, {
        {0, 0, th * fx + eta * fy + 2.0 * f * d.partial(0, 0) - 2.0 * (lam - kappa) * f},
        {1, 1, th * fx + eta * fy + 2.0 * f * d.partial(1, 1) - 2.0 * (lam - kappa) * f},
        {0, 1, f * (d.partial(1, 0) + d.partial(0, 1))},
    });
}

inline RealMatrix system_rxr(const PointData& d)
{
    const double f = d.f.value;
    const double y = d.point[1];
    const double fx = d.f.d1[1] / y, fy = d.f.d1[0] / y;
    const double th = d.th(0), eta = d.th(1);
    const double kappa = gaussian_rxr(d.f);
    const double lam = d.lambda;
    return symmetric_fill(2, {
        {0, 0, y * eta * fx + y * th * fy + 2.0 * y * d.partial(0, 1) * f - 2.0 * (lam - kappa) * f},
        {1, 1, y * eta * fx + y * th * fy + 2.0 * f * (y * d.partial(1, 0) - th) - 2.0 * (lam - kappa) * f},
        {0, 1, f * (eta + y * (d.partial(1, 1) + d.partial(0, 0)))},
    });
}

/// Three-dimensional systems; `twisted` selects R^2 x| R^+ over R x| R^+ x R.
inline RealMatrix system_3d(const PointData& d, bool twisted)
{
    const double f = d.f.value, lam = d.lambda;
    const double f1 = d.f.d1[0], f2 = d.f.d1[1], f3 = d.f.d1[2];
    auto ff = [&](int i, int j) { return d.f.d2(i, j); };
    auto D = [&](int comp, int i) { return d.dtheta(i, comp); };
    const double th = d.th(0), eta = d.th(1), mu = d.th(2);
    const double xf = th * f1 + eta * f2 + mu * f3;
    const double c1 = twisted ? 4.0 * f * (f1 - 2.0 * f) : 2.0 * f * (f1 - 2.0 * f);
    const double c2 = twisted ? 2.0 * f * (3.0 * f1 - 4.0 * f) : 4.0 * f * f1 - 4.0 * f * f;
    const double f2sq = f * f;
    const double r11 = xf + 2.0 * D(0, 0) * f -
                       2.0 * (lam * f - (-2.0 * f * (2.0 * ff(0, 0) + ff(1, 1) + ff(2, 2)) + 4.0 * f1 * f1 +
                                         f2 * f2 + f3 * f3 + c1) / (4.0 * f2sq));
    const double r12 = f * (eta + D(1, 0) + D(0, 1)) + (3.0 * f1 * f2 - 2.0 * f * ff(1, 0)) / (2.0 * f2sq);
    const double r13 = f * ((twisted ? mu : 0.0) + D(2, 0) + D(0, 2)) +
                       (3.0 * f1 * f3 - 2.0 * f * ff(2, 0)) / (2.0 * f2sq);
    const double r22 = xf + 2.0 * f * (D(1, 1) - th) -
                       2.0 * (lam * f - (-2.0 * f * (ff(0, 0) + 2.0 * ff(1, 1) + ff(2, 2)) + f1 * f1 +
                                         4.0 * f2 * f2 + f3 * f3 + c2) / (4.0 * f2sq));
    const double r23 = f * (D(2, 1) + D(1, 2)) + (3.0 * f2 * f3 - 2.0 * f * ff(2, 1)) / (2.0 * f2sq);
    const double ric33 = (-2.0 * f * (ff(0, 0) + ff(1, 1) + 2.0 * ff(2, 2)) + f1 * f1 + f2 * f2 +
                          4.0 * f3 * f3 + (twisted ? 2.0 * f * (3.0 * f1 - 4.0 * f) : 2.0 * f * f1)) /
                         (4.0 * f2sq);
    const double r33 = twisted ? xf + 2.0 * f * (D(2, 2) - th) - 2.0 * (lam * f - ric33)
                               : xf + 2.0 * D(2, 2) * f - 2.0 * (lam * f - ric33);
    return symmetric_fill(3, {{0, 0, r11}, {0, 1, r12}, {0, 2, r13}, {1, 1, r22}, {1, 2, r23}, {2, 2, r33}});
}

/// Four-dimensional systems; `twisted` selects R x| R^+ x R x| R^+ over
/// R x| R^+ x R^2.
inline RealMatrix system_4d(const PointData& d, bool twisted)
{
    const double f = d.f.value, lam = d.lambda;
    const double f1 = d.f.d1[0], f2 = d.f.d1[1], f3 = d.f.d1[2], f4 = d.f.d1[3];
    auto ff = [&](int i, int j) { return d.f.d2(i, j); };
    auto D = [&](int comp, int i) { return d.dtheta(i, comp); };
    const double th = d.th(0), eta = d.th(1), mu = d.th(2), nu = d.th(3);
    const double xf = th * f1 + eta * f2 + mu * f3 + nu * f4;
    const double f3t = twisted ? f3 : 0.0;
    const double g2 = f * f;
    const double r11 = xf + 2.0 * D(0, 0) * f -
                       2.0 * (lam * f - (-f * (3.0 * ff(0, 0) + ff(1, 1) + ff(2, 2) + ff(3, 3)) + 3.0 * f1 * f1 +
                                         f * (f1 + f3t - 2.0 * f)) / (2.0 * g2));
    const double r12 = f * (eta + D(1, 0) + D(0, 1)) + (3.0 * f1 * f2 - 2.0 * f * ff(1, 0)) / g2;
    const double r13 = f * (D(2, 0) + D(0, 2)) + (3.0 * f1 * f3 - 2.0 * f * ff(2, 0)) / g2;
    const double r14 = f * (D(3, 0) + D(0, 3)) + (3.0 * f1 * f4 - 2.0 * f * ff(3, 0)) / g2;
    const double r22 = xf + 2.0 * f * (D(1, 1) - th) -
                       2.0 * (lam * f - (-f * (ff(0, 0) + 3.0 * ff(1, 1) + ff(2, 2) + ff(3, 3)) + 3.0 * f2 * f2 +
                                         f * (3.0 * f1 + f3t - 2.0 * f)) / (2.0 * g2));
    const double r23 = f * (D(2, 1) + D(1, 2)) + (3.0 * f2 * f3 - 2.0 * f * ff(2, 1)) / g2;
    const double r24 = f * (D(3, 1) + D(1, 3)) + (3.0 * f2 * f4 - 2.0 * f * ff(3, 1)) / g2;
    double r33, r34, r44;
    if (twisted) {
        r33 = xf + 2.0 * D(2, 2) * f -
              2.0 * (lam * f - (-f * (ff(0, 0) + ff(1, 1) + 3.0 * ff(2, 2) + ff(3, 3)) + 3.0 * f3 * f3 +
                                f * (f1 + f3 - 2.0 * f)) / (2.0 * g2));
        r34 = f * (nu + D(3, 2) + D(2, 3)) + (3.0 * f3 * f4 - 2.0 * f * ff(3, 2)) / g2;
        r44 = xf + 2.0 * f * (D(3, 3) - mu) -
              2.0 * (lam * f - (-f * (ff(0, 0) + ff(1, 1) + ff(2, 2) + 3.0 * ff(3, 3)) + 3.0 * f4 * f4 +
                                f * (f1 + 3.0 * f3 - 2.0 * f)) / (2.0 * g2));
    } else {
        r33 = xf + 2.0 * D(2, 2) * f -
              2.0 * (lam * f - (-f * (ff(0, 0) + ff(1, 1) + 3.0 * ff(2, 2) + ff(3, 3)) + 3.0 * f3 * f3 + f * f1) /
                                   (2.0 * g2));
        r34 = f * (D(3, 2) + D(2, 3)) + (3.0 * f3 * f4 - 2.0 * f * ff(3, 2)) / g2;
        r44 = xf + 2.0 * D(3, 3) * f -
              2.0 * (lam * f - (-f * (ff(0, 0) + ff(1, 1) + ff(2, 2) + 3.0 * ff(3, 3)) + 3.0 * f4 * f4 + f * f1) /
                                   (2.0 * g2));
    }
    return symmetric_fill(4, {{0, 0, r11}, {0, 1, r12}, {0, 2, r13}, {0, 3, r14}, {1, 1, r22},
                              {1, 2, r23}, {1, 3, r24}, {2, 2, r33}, {2, 3, r34}, {3, 3, r44}});
}

} // namespace detail

inline bool has_specialized_system(const LieGroup& g)
{
    return identify_standard_group(g).has_value();
}

/// The reduced system of the matching standard group at one point.
inline RealMatrix specialized_residual(const LieGroup& g, const PointData& d)
{
    const auto kind = identify_standard_group(g);
    if (!kind)
        throw InputError("no specialised system for group '" + g.id() + "'");
    switch (*kind) {
    case StandardGroup::R2: return detail::system_r2(d);
    case StandardGroup::RxR: return detail::system_rxr(d);
    case StandardGroup::R2xR: return detail::system_3d(d, true);
    case StandardGroup::RxRxR: return detail::system_3d(d, false);
    case StandardGroup::RxRxR2: return detail::system_4d(d, false);
    case StandardGroup::RxRxRxR: return detail::system_4d(d, true);
    }
    throw InputError("no specialised system for group '" + g.id() + "'");
}

inline RealMatrix specialized_residual(const SolitonCase& c, std::span<const double> p)
{
    return specialized_residual(c.group(), point_data(c, p));
}

/// Numerical constancy: zero gradient at every point to tol.
inline bool is_constant_on(const Expr& e, const std::vector<Point>& points, double tol = 1e-12)
{
    for (const auto& p : points) {
        const Jet j = eval_jet(e, p, 1);
        for (int k = 0; k < j.dim(); ++k)
            if (std::abs(j.grad(k)) > tol)
                return false;
    }
    return true;
}

/// Sign class of a case with constant lambda; sampled on the case grid.
inline SolitonClass classify(const SolitonCase& c)
{
    const Grid grid = c.grid();
    const auto pts = grid.random_points(16, c.spec().seed);
    if (!is_constant_on(c.lambda(), pts))
        throw InputError("lambda is not constant; case '" + c.id() + "' is an almost soliton");
    return classify(eval(c.lambda(), pts.front()));
}

// ---------------------------------------------------------------------------
// Ricci flow check: g_t = (1 - 2 lambda t) phi_t^* g with phi_t the flow of
// X / (1 - 2 lambda t) satisfies d/dt g_t = -2 Ric(g_t).

struct FlowOptions {
    double t_max = 0.2;
    int steps = 64;
    int probes = 6;
};

struct FlowReport {
    double initial = 0.0;     // FD identity residual at t = 0
    double along = 0.0;       // worst residual over all time samples
    Point worst_point;        // probe start point attaining `along`
    double worst_time = 0.0;
    std::size_t probes = 0;
};

/// Probe box: the default box pulled towards its centre so short flows stay inside.
inline std::vector<Point> flow_probes(const LieGroup& g, int count, std::uint64_t seed)
{
    Grid box;
    for (int k = 0; k < g.dim(); ++k) {
        const bool pos = std::find(g.positive().begin(), g.positive().end(), k) != g.positive().end();
        box.ranges.push_back(pos ? Interval{0.5, 2.0} : Interval{-1.0, 1.0});
        box.counts.push_back(1);
    }
    return box.random_points(static_cast<std::size_t>(count), seed);
}

namespace detail {

struct FlowState {
    Point x;
    RealMatrix jac;
};

/// Coordinate velocity and its Jacobian at (t, x).
inline std::pair<std::vector<double>, RealMatrix> flow_field(const SolitonCase& c, double lambda, double t,
                                                             std::span<const double> x)
{
    const auto& g = c.group();
    if (!g.contains(x))
        throw NumericalError("flow exits the domain at " + LieGroup::format_point(x));
    const Matrix<Jet> frame1 = g.frame_jets(x, 1);
    const auto theta = frame_components_jets(g, c.x(), c.basis(), x, frame1);
    const auto v = coordinate_components_jets(theta, frame1);
    const double scale = 1.0 / (1.0 - 2.0 * lambda * t);
    const int n = g.dim();
    std::vector<double> vel(static_cast<std::size_t>(n));
    RealMatrix dv(n, n);
    for (int k = 0; k < n; ++k) {
        vel[static_cast<std::size_t>(k)] = scale * v[static_cast<std::size_t>(k)].value();
        for (int l = 0; l < n; ++l)
            dv(k, l) = scale * v[static_cast<std::size_t>(k)].grad(l);
    }
    return {vel, dv};
}

inline FlowState rk4_step(const SolitonCase& c, double lambda, double t, double h, const FlowState& s)
{
    const int n = c.group().dim();
    auto deriv = [&](double tt, const FlowState& st) {
        auto [vel, dv] = flow_field(c, lambda, tt, st.x);
        return FlowState{vel, dv * st.jac};
    };
    auto axpy = [&](const FlowState& a, double k, const FlowState& b) {
        FlowState r = a;
        for (int i = 0; i < n; ++i) {
            r.x[static_cast<std::size_t>(i)] += k * b.x[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j)
                r.jac(i, j) += k * b.jac(i, j);
        }
        return r;
    };
    const FlowState k1 = deriv(t, s);
    const FlowState k2 = deriv(t + h / 2, axpy(s, h / 2, k1));
    const FlowState k3 = deriv(t + h / 2, axpy(s, h / 2, k2));
    const FlowState k4 = deriv(t + h, axpy(s, h, k3));
    FlowState r = s;
    for (int i = 0; i < n; ++i) {
        auto comb = [&](double a, double b, double cc, double dd) { return h / 6 * (a + 2 * b + 2 * cc + dd); };
        r.x[static_cast<std::size_t>(i)] += comb(k1.x[static_cast<std::size_t>(i)], k2.x[static_cast<std::size_t>(i)],
                                                 k3.x[static_cast<std::size_t>(i)], k4.x[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j)
            r.jac(i, j) += comb(k1.jac(i, j), k2.jac(i, j), k3.jac(i, j), k4.jac(i, j));
    }
    return r;
}

/// Ricci tensor in coordinates: C Ric_frame C^T with C the inverse frame matrix.
inline RealMatrix ricci_coords(const SolitonCase& c, std::span<const double> x)
{
    const RealMatrix cinv = inverse(c.group().frame_matrix(x));
    return cinv * ricci_frame(c.metric(), x) * cinv.transposed();
}

} // namespace detail

/**
 * Integrates the flow from each probe point with RK4 together with its
 * Jacobian, forms g_t by pullback and compares a finite-difference time
 * derivative with -2 Ric(g_t). Fourth-order differences: one-sided at the
 * first two samples, central inside.
 */
inline FlowReport flow_check(const SolitonCase& c, const FlowOptions& opt = {})
{
    const auto& g = c.group();
    if (opt.steps < 4)
        throw InputError("flow check needs at least 4 steps");
    if (!(opt.t_max > 0.0))
        throw InputError("flow check needs t_max > 0");
    const auto probes = flow_probes(g, opt.probes, c.spec().seed);
    if (!is_constant_on(c.lambda(), probes))
        throw InputError("flow check needs a constant lambda");
    const double lambda = eval(c.lambda(), probes.front());
    if (!(1.0 - 2.0 * lambda * opt.t_max > 0.0))
        throw InputError("1 - 2 lambda t_max must be positive");
    const int n = g.dim();
    const double h = opt.t_max / opt.steps;

    struct ProbeResult {
        double initial = 0.0;
        double along = 0.0;
        double time = 0.0;
    };
    const auto results = parallel_map(probes, [&](const Point& p0) {
        std::vector<RealMatrix> gt;
        std::vector<RealMatrix> target;  // -2 Ric(g_t) in coordinates at p0
        detail::FlowState s{p0, RealMatrix::identity(n, 0.0)};
        for (int k = 0; k <= opt.steps; ++k) {
            const double t = k * h;
            if (k > 0)
                s = detail::rk4_step(c, lambda, t - h, h, s);
            if (!g.contains(s.x))
                throw NumericalError("flow exits the domain at " + LieGroup::format_point(s.x));
            const RealMatrix jt = s.jac.transposed();
            RealMatrix pulled = jt * metric_coords(c.metric(), s.x) * s.jac;
            const double sigma = 1.0 - 2.0 * lambda * t;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    pulled(i, j) *= sigma;
            gt.push_back(pulled);
            RealMatrix ric = jt * detail::ricci_coords(c, s.x) * s.jac;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ric(i, j) *= -2.0;
            target.push_back(ric);
        }
        ProbeResult r;
        for (int k = 0; k + 2 <= opt.steps; ++k) {
            const std::size_t kk = static_cast<std::size_t>(k);
            const auto& G = gt;
            RealMatrix dg(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dg(i, j) = k < 2 ? (-25.0 * G[kk](i, j) + 48.0 * G[kk + 1](i, j) - 36.0 * G[kk + 2](i, j) +
                                        16.0 * G[kk + 3](i, j) - 3.0 * G[kk + 4](i, j)) / (12.0 * h)
                                     : (-G[kk + 2](i, j) + 8.0 * G[kk + 1](i, j) - 8.0 * G[kk - 1](i, j) +
                                        G[kk - 2](i, j)) / (12.0 * h);
            const double dev = max_abs_diff(dg, target[static_cast<std::size_t>(k)]);
            if (k == 0)
                r.initial = dev;
            if (dev > r.along) {
                r.along = dev;
                r.time = k * h;
            }
        }
        return r;
    });

    FlowReport rep;
    rep.probes = probes.size();
    for (std::size_t i = 0; i < results.size(); ++i) {
        rep.initial = std::max(rep.initial, results[i].initial);
        if (i == 0 || results[i].along > rep.along) {
            rep.along = results[i].along;
            rep.worst_point = probes[i];
            rep.worst_time = results[i].time;
        }
    }
    return rep;
}

} // namespace solitonforge
