#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "solitonforge/catalog.hpp"

namespace testsupport {

using solitonforge::Point;

/// Central difference gradient of a scalar function.
inline std::vector<double> fd_grad(const std::function<double(const Point&)>& fn, const Point& p, double h)
{
    std::vector<double> g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        Point a = p, b = p;
        a[k] += h;
        b[k] -= h;
        g[k] = (fn(a) - fn(b)) / (2 * h);
    }
    return g;
}

/// Central difference Hessian, H[i][j] = d_i d_j fn.
inline std::vector<std::vector<double>> fd_hess(const std::function<double(const Point&)>& fn, const Point& p,
                                                double h)
{
    const std::size_t n = p.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto at = [&](double si, double sj) {
                Point q = p;
                q[i] += si * h;
                q[j] += sj * h;
                return fn(q);
            };
            H[i][j] = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
        }
    return H;
}

inline bool close_rel(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

/// Every expression string that appears in the catalog, with its group.
struct CatalogExpr {
    std::shared_ptr<const solitonforge::LieGroup> group;
    std::string text;
};

inline std::vector<CatalogExpr> catalog_expressions()
{
    std::vector<CatalogExpr> out;
    for (const auto& e : solitonforge::catalog_entries()) {
        for (const auto& c : e.cases) {
            out.push_back({e.group, c.f});
            for (const auto& x : c.x)
                out.push_back({e.group, x});
            out.push_back({e.group, c.lambda});
            if (c.phi)
                out.push_back({e.group, *c.phi});
            for (const auto& k : c.expected.sectional)
                out.push_back({e.group, k.expr});
        }
        for (int i = 0; i < e.group->dim(); ++i)
            for (int k = 0; k < e.group->dim(); ++k)
                out.push_back({e.group, e.group->frame()(i, k).to_string()});
    }
    return out;
}

/// Box strictly inside the default sampling box, so FD stencils stay in the domain.
inline solitonforge::Grid inner_box(const solitonforge::LieGroup& g)
{
    auto box = g.default_grid(1);
    for (auto& r : box.ranges) {
        const double w = r.hi - r.lo;
        r.lo += 0.05 * w;
        r.hi -= 0.05 * w;
    }
    return box;
}

} // namespace testsupport
