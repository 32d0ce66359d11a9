#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/expr.hpp"
#include "solitonforge/jet.hpp"
#include "solitonforge/linalg.hpp"
#include "solitonforge/sampling.hpp"

namespace solitonforge {

/// Row i holds the coordinate coefficients of E_i = sum_k frame(i,k) d/dx_k.
using FrameField = Matrix<Expr>;

/// Structure constants with [E_i,E_j] = sum_k alpha(i,j,k) E_k.
using StructureConstants = Tensor3;

inline bool check_antisymmetry(const StructureConstants& alpha, double tol = 1e-12)
{
    const int n = alpha.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (std::abs(alpha(i, j, k) + alpha(j, i, k)) > tol)
                    return false;
    return true;
}

/// Jacobi identity as a brute-force sum over all index quadruples.
inline bool check_jacobi(const StructureConstants& alpha, double tol = 1e-12)
{
    const int n = alpha.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m)
                        s += alpha(i, j, m) * alpha(m, k, l) + alpha(j, k, m) * alpha(m, i, l) +
                             alpha(k, i, m) * alpha(m, j, l);
                    if (std::abs(s) > tol)
                        return false;
                }
    return true;
}

/**
 * A Lie group in one global chart: coordinates, an open domain given by
 * positivity constraints, the identity, a left-invariant frame, its
 * structure constants and optionally the multiplication law.
 *
 * The multiplication law is n expressions over 2n variables named
 * `<coord>1` (left factor) followed by `<coord>2` (right factor).
 */
class LieGroup {
public:
    struct Definition {
        std::string id;
        std::vector<std::string> coords;
        std::vector<int> positive;  // coordinate indices constrained > 0
        Point identity;
        std::vector<std::vector<std::string>> frame;
        StructureConstants alpha;
        std::optional<std::vector<std::string>> mul;
    };

    explicit LieGroup(Definition def)
        : id_(std::move(def.id)), coords_(std::move(def.coords)), positive_(std::move(def.positive)),
          identity_(std::move(def.identity)), alpha_(std::move(def.alpha))
    {
        const int n = dim();
        if (n < 1 || n > 8)
            throw InputError("group dimension must be in [1, 8]");
        for (int k : positive_)
            if (k < 0 || k >= n)
                throw InputError("domain constraint refers to unknown coordinate");
        if (static_cast<int>(identity_.size()) != n)
            throw InputError("identity has wrong dimension");
        if (!contains(identity_))
            throw InputError("identity violates the domain constraints");
        if (static_cast<int>(def.frame.size()) != n)
            throw InputError("frame needs one row per coordinate");
        frame_ = FrameField(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(def.frame[static_cast<std::size_t>(i)].size()) != n)
                throw InputError("frame row " + std::to_string(i + 1) + " has wrong length");
            for (int k = 0; k < n; ++k)
                frame_(i, k) = parse(def.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                     coords_);
        }
        if (alpha_.dim() != n)
            throw InputError("structure constants have wrong dimension");
        if (!check_antisymmetry(alpha_))
            throw InputError("structure constants are not antisymmetric in the first two indices");
        if (!check_jacobi(alpha_))
            throw InputError("structure constants violate the Jacobi identity");
        if (def.mul) {
            if (static_cast<int>(def.mul->size()) != n)
                throw InputError("multiplication law needs one expression per coordinate");
            std::vector<std::string> names;
            for (const auto& c : coords_)
                names.push_back(c + "1");
            for (const auto& c : coords_)
                names.push_back(c + "2");
            mul_.emplace();
            for (const auto& text : *def.mul)
                mul_->push_back(parse(text, names));
            mul_text_ = def.mul;
        }
        if (std::abs(determinant(frame_matrix(identity_))) <= 1e-12)
            throw InputError("frame is singular at the identity");
    }

    const std::string& id() const noexcept { return id_; }
    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<std::string>& coords() const noexcept { return coords_; }
    const std::vector<int>& positive() const noexcept { return positive_; }
    const Point& identity() const noexcept { return identity_; }
    const FrameField& frame() const noexcept { return frame_; }
    const StructureConstants& alpha() const noexcept { return alpha_; }
    double alpha(int i, int j, int k) const noexcept { return alpha_(i, j, k); }
    bool has_mul() const noexcept { return mul_.has_value(); }
    const std::vector<Expr>& mul() const
    {
        if (!mul_)
            throw InputError("group '" + id_ + "' has no multiplication law");
        return *mul_;
    }

    bool is_commutative() const noexcept
    {
        const int n = dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (alpha_(i, j, k) != 0.0)
                        return false;
        return true;
    }

    bool contains(std::span<const double> p) const noexcept
    {
        if (static_cast<int>(p.size()) != dim())
            return false;
        return std::all_of(positive_.begin(), positive_.end(),
                           [&](int k) { return p[static_cast<std::size_t>(k)] > 0.0; });
    }

    void require_domain(std::span<const double> p) const
    {
        if (static_cast<int>(p.size()) != dim())
            throw InputError("point has dimension " + std::to_string(p.size()) + ", group '" + id_ +
                             "' needs " + std::to_string(dim()));
        if (!contains(p))
            throw DomainError("point " + format_point(p) + " outside the domain of '" + id_ + "'");
    }

    RealMatrix frame_matrix(std::span<const double> p) const
    {
        const int n = dim();
        RealMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                a(i, k) = eval(frame_(i, k), p);
        return a;
    }

    Matrix<Jet> frame_jets(std::span<const double> p, int order) const
    {
        std::vector<Jet> vars;
        for (int k = 0; k < dim(); ++k)
            vars.push_back(Jet::variable(p, k, order));
        return frame_jets(vars);
    }

    Matrix<Jet> frame_jets(std::span<const Jet> vars) const
    {
        const int n = dim();
        Matrix<Jet> a(n, n, vars.front() * 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                a(i, k) = eval_jet(frame_(i, k), vars);
        return a;
    }

    /// Default sampling box: free coordinates in [-2, 2], positive ones in [0.2, 3].
    Grid default_grid(int per_axis = 20) const
    {
        Grid g;
        for (int k = 0; k < dim(); ++k) {
            const bool pos = std::find(positive_.begin(), positive_.end(), k) != positive_.end();
            g.ranges.push_back(pos ? Interval{0.2, 3.0} : Interval{-2.0, 2.0});
            g.counts.push_back(per_axis);
        }
        return g;
    }

    Definition definition() const
    {
        Definition d;
        d.id = id_;
        d.coords = coords_;
        d.positive = positive_;
        d.identity = identity_;
        for (int i = 0; i < dim(); ++i) {
            d.frame.emplace_back();
            for (int k = 0; k < dim(); ++k)
                d.frame.back().push_back(frame_(i, k).to_string());
        }
        d.alpha = alpha_;
        d.mul = mul_text_;
        return d;
    }

    static std::string format_point(std::span<const double> p)
    {
        std::string s = "(";
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i)
                s += ", ";
            s += std::to_string(p[i]);
        }
        return s + ")";
    }

private:
    std::string id_;
    std::vector<std::string> coords_;
    std::vector<int> positive_;
    Point identity_;
    FrameField frame_;
    StructureConstants alpha_;
    std::optional<std::vector<Expr>> mul_;
    std::optional<std::vector<std::string>> mul_text_;
};

/// E_i h for a jet h: sum_k A(i,k) d_k h, one order lower than h.
inline Jet apply_frame(const Matrix<Jet>& frame, int i, const Jet& h)
{
    const int n = frame.cols();
    const int order = h.order() - 1;
    Jet out = Jet::constant(0.0, h.dim(), order);
    for (int k = 0; k < n; ++k) {
        const Jet& a = frame(i, k);
        if (a.is_constant() && a.value() == 0.0)
            continue;
        out += (a.order() == order ? a : a.truncated(order)) * h.derivative(k);
    }
    return out;
}

/// Coefficients c with [E_i,E_j](p) = sum_k c_k E_k(p), from differentiated
/// frame coefficients and a solve against the frame matrix.
inline std::vector<double> commutator_coeffs(const LieGroup& g, int i, int j, std::span<const double> p)
{
    g.require_domain(p);
    const int n = g.dim();
    const Matrix<Jet> a = g.frame_jets(p, 1);
    std::vector<double> bracket(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
            s += a(i, l).value() * a(j, k).grad(l) - a(j, l).value() * a(i, k).grad(l);
        bracket[static_cast<std::size_t>(k)] = s;
    }
    // bracket = sum_m c_m A(m, .)  <=>  A^T c = bracket
    return solve(values_of(a).transposed(), bracket);
}

/// f_i := E_i f.
inline double frame_derivative(const LieGroup& g, int i, const Expr& field, std::span<const double> p)
{
    g.require_domain(p);
    const Jet h = eval_jet(field, p, 1);
    const Matrix<Jet> a = g.frame_jets(p, 0);
    return apply_frame(a, i, h).value();
}

/// f_ij := E_j(E_i f); the second index names the outer operator.
inline double frame_derivative(const LieGroup& g, int i, int j, const Expr& field,
                               std::span<const double> p)
{
    g.require_domain(p);
    const Jet h = eval_jet(field, p, 2);
    const Matrix<Jet> a = g.frame_jets(p, 1);
    const Jet inner = apply_frame(a, i, h);
    return apply_frame(a, j, inner).value();
}

/// Evaluates the multiplication law on arbitrary scalars (double or Jet).
template <class T>
std::vector<T> multiply_generic(const LieGroup& g, std::span<const T> a, std::span<const T> b)
{
    const auto& law = g.mul();
    std::vector<T> vars(a.begin(), a.end());
    vars.insert(vars.end(), b.begin(), b.end());
    std::vector<T> out;
    out.reserve(law.size());
    for (const auto& e : law) {
        if constexpr (std::is_same_v<T, double>)
            out.push_back(eval(e, vars));
        else
            out.push_back(eval_jet(e, std::span<const Jet>(vars)));
    }
    return out;
}

inline Point multiply(const LieGroup& g, std::span<const double> a, std::span<const double> b)
{
    g.require_domain(a);
    g.require_domain(b);
    return multiply_generic<double>(g, a, b);
}

/// Jacobian of a -> b.a at a.
inline RealMatrix left_translation_jacobian(const LieGroup& g, std::span<const double> b,
                                            std::span<const double> a)
{
    g.require_domain(a);
    g.require_domain(b);
    const int n = g.dim();
    std::vector<Jet> bj, aj;
    for (int k = 0; k < n; ++k) {
        bj.push_back(Jet::constant(b[static_cast<std::size_t>(k)], n, 1));
        aj.push_back(Jet::variable(a, k, 1));
    }
    const auto prod = multiply_generic<Jet>(g, bj, aj);
    RealMatrix jac(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            jac(m, k) = prod[static_cast<std::size_t>(m)].grad(k);
    return jac;
}

/// L_{b*} v for a tangent vector v at a; the result lives at b.a.
inline std::vector<double> left_translate_pushforward(const LieGroup& g, std::span<const double> b,
                                                      std::span<const double> a,
                                                      std::span<const double> v)
{
    const RealMatrix jac = left_translation_jacobian(g, b, a);
    std::vector<double> out(v.size(), 0.0);
    for (int m = 0; m < jac.rows(); ++m)
        for (int k = 0; k < jac.cols(); ++k)
            out[static_cast<std::size_t>(m)] += jac(m, k) * v[static_cast<std::size_t>(k)];
    return out;
}

/// a^{-1} by damped Newton on a.x = e. Positive coordinates start from 1/a_k,
/// the others from -a_k.
inline Point inverse_element(const LieGroup& g, std::span<const double> a, int max_iter = 30,
                             double tol = 1e-12)
{
    g.require_domain(a);
    const int n = g.dim();
    const auto& pos = g.positive();
    Point x(a.begin(), a.end());
    for (int k = 0; k < n; ++k) {
        const bool scaling = std::find(pos.begin(), pos.end(), k) != pos.end();
        x[static_cast<std::size_t>(k)] = scaling ? 1.0 / a[static_cast<std::size_t>(k)]
                                                 : -a[static_cast<std::size_t>(k)];
    }
    auto residual = [&](const Point& y) {
        Point r = multiply_generic<double>(g, a, y);
        for (int k = 0; k < n; ++k)
            r[static_cast<std::size_t>(k)] -= g.identity()[static_cast<std::size_t>(k)];
        return r;
    };
    auto norm = [](const Point& r) {
        double m = 0.0;
        for (double v : r)
            m = std::max(m, std::abs(v));
        return m;
    };
    Point r = residual(x);
    for (int it = 0; it < max_iter && norm(r) > tol; ++it) {
        const RealMatrix jac = left_translation_jacobian(g, a, x);
        Point step = solve(jac, r);
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 30; ++halving, t *= 0.5) {
            Point trial = x;
            for (int k = 0; k < n; ++k)
                trial[static_cast<std::size_t>(k)] -= t * step[static_cast<std::size_t>(k)];
            if (!g.contains(trial))
                continue;
            Point rt = residual(trial);
            if (norm(rt) < norm(r)) {
                x = std::move(trial);
                r = std::move(rt);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    if (!(norm(r) <= tol))
        throw NumericalError("Newton inversion failed for " + LieGroup::format_point(a));
    return x;
}

/// max |L_{b*}E_i(a) - E_i(b.a)| over the given (a, b) pairs.
inline double frame_left_invariance_residual(const LieGroup& g,
                                             const std::vector<std::pair<Point, Point>>& pairs)
{
    const int n = g.dim();
    double worst = 0.0;
    for (const auto& [a, b] : pairs) {
        const RealMatrix jac = left_translation_jacobian(g, b, a);
        const RealMatrix ea = g.frame_matrix(a);
        const RealMatrix eba = g.frame_matrix(multiply(g, b, a));
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) {
                double pushed = 0.0;
                for (int k = 0; k < n; ++k)
                    pushed += jac(m, k) * ea(i, k);
                worst = std::max(worst, std::abs(pushed - eba(i, m)));
            }
    }
    return worst;
}

/// max |commutator_coeffs - alpha| over the given points.
inline double commutator_deviation(const LieGroup& g, const std::vector<Point>& points)
{
    const int n = g.dim();
    double worst = 0.0;
    for (const auto& p : points)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto c = commutator_coeffs(g, i, j, p);
                for (int k = 0; k < n; ++k)
                    worst = std::max(worst, std::abs(c[static_cast<std::size_t>(k)] - g.alpha(i, j, k)));
            }
    return worst;
}

/// Random (a, b) pairs drawn from the group's default box.
inline std::vector<std::pair<Point, Point>> random_pairs(const LieGroup& g, std::size_t count,
                                                         std::uint64_t seed)
{
    const Grid box = g.default_grid(1);
    auto pts = box.random_points(2 * count, seed);
    std::vector<std::pair<Point, Point>> out;
    for (std::size_t i = 0; i < count; ++i)
        out.emplace_back(std::move(pts[2 * i]), std::move(pts[2 * i + 1]));
    return out;
}

} // namespace solitonforge
