#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/soliton.hpp"
#include "solitonforge/standard_groups.hpp"

namespace solitonforge {

struct CatalogEntry {
    std::string id;
    std::string slug;
    std::shared_ptr<const LieGroup> group;
    std::vector<CaseSpec> cases;
};

namespace detail {

struct CaseBuilder {
    CaseSpec s;

    CaseBuilder(std::string id, std::string title, std::string f, std::vector<std::string> x, std::string lambda)
    {
        s.id = std::move(id);
        s.title = std::move(title);
        s.f = std::move(f);
        s.x = std::move(x);
        s.lambda = std::move(lambda);
    }
    CaseBuilder& cls(SolitonClass c) { s.expected.cls = c; return *this; }
    CaseBuilder& gradient(std::string phi)
    {
        s.phi = std::move(phi);
        s.expected.gradient = true;
        return *this;
    }
    CaseBuilder& not_gradient() { s.expected.gradient = false; return *this; }
    /// p, q are 1-based here, as in the usual E_1, E_2 labelling.
    CaseBuilder& K(int p, int q, std::string e)
    {
        s.expected.sectional.push_back({p - 1, q - 1, std::move(e)});
        return *this;
    }
    CaseBuilder& Ric(int p, int q, std::string e)
    {
        s.expected.ricci.push_back({p - 1, q - 1, std::move(e)});
        return *this;
    }
    CaseBuilder& flat(int n)
    {
        for (int p = 1; p <= n; ++p)
            for (int q = p + 1; q <= n; ++q)
                K(p, q, "0");
        return *this;
    }
    operator CaseSpec() const { return s; }
};

inline std::vector<CatalogEntry> build_catalog()
{
    using C = SolitonClass;
    using B = CaseBuilder;
    std::vector<CatalogEntry> out;
    auto entry = [&](StandardGroup kind, std::vector<CaseSpec> cases) {
        const auto g = standard_group(kind);
        std::string slug;
        for (const auto& info : standard_group_table())
            if (info.kind == kind)
                slug = info.slug;
        out.push_back({g->id(), slug, g, std::move(cases)});
    };

    entry(StandardGroup::R2,
          {
              B("r2.cigar", "cigar soliton on the plane", "1/(1+x^2+y^2)", {"-2*x", "-2*y"}, "0")
                  .cls(C::Steady).gradient("-ln(1+x^2+y^2)").K(1, 2, "2/(1+x^2+y^2)"),
              B("r2.exp.shrinking", "flat shrinking gradient soliton", "exp(x+y)", {"1", "1"}, "1")
                  .cls(C::Shrinking).gradient("exp(x+y)").flat(2),
              B("r2.exp.steady", "flat steady soliton, not gradient", "exp(x+y)", {"1", "-1"}, "0")
                  .cls(C::Steady).not_gradient().flat(2),
              B("r2.almost.rotation", "almost soliton carried by the rotation field", "exp(x^2+y^2)",
                {"-y", "x"}, "2*exp(-x^2-y^2)")
                  .cls(C::Almost).not_gradient().K(1, 2, "-2*exp(-x^2-y^2)"),
          });

    entry(StandardGroup::RxR,
          {
              B("rxr+.f=1.translation", "hyperbolic plane, horizontal translations", "1", {"0", "1/y"}, "-1")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1"),
              B("rxr+.f=y.diagonal", "f = y, X = d/dx - d/dy", "y", {"-1/y", "1/y"}, "0")
                  .cls(C::Steady).not_gradient().K(1, 2, "-1/(2*y)"),
              B("rxr+.f=y.gradient", "f = y, X = -d/dy", "y", {"-1/y", "0"}, "0")
                  .cls(C::Steady).gradient("-ln(y)").K(1, 2, "-1/(2*y)"),
              B("rxr+.f=y2.translation", "f = y^2, X = d/dx + d/dy", "y^2", {"1/y", "1/y"}, "0")
                  .cls(C::Steady).gradient("x+y").flat(2),
              B("rxr+.f=y2.dilation", "f = y^2, X = x d/dx + y d/dy", "y^2", {"1", "x/y"}, "1")
                  .cls(C::Shrinking).gradient("(x^2+y^2)/2").flat(2),
              B("rxr+.f=y2.vertical", "f = y^2, X = d/dy", "y^2", {"1/y", "0"}, "0")
                  .cls(C::Steady).gradient("y").flat(2),
              B("rxr+.almost.vertical", "hyperbolic almost soliton, X = d/dy", "1", {"1/y", "0"}, "(-1-y)/y")
                  .cls(C::Almost).gradient("-1/y").K(1, 2, "-1"),
          });

    entry(StandardGroup::R2xR,
          {
              B("r2xr+.f=1.xy", "f = 1, X = d/dx + d/dy", "1", {"0", "1/z", "1/z"}, "-2")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(1, 3, "-1").K(2, 3, "-1"),
              B("r2xr+.f=1.x", "f = 1, X = d/dx", "1", {"0", "1/z", "0"}, "-2")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(1, 3, "-1").K(2, 3, "-1"),
              B("r2xr+.f=1.y", "f = 1, X = d/dy", "1", {"0", "0", "1/z"}, "-2")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(1, 3, "-1").K(2, 3, "-1"),
              B("r2xr+.f=z2.xyz", "f = z^2, X = d/dx + d/dy + d/dz", "z^2", {"1/z", "1/z", "1/z"}, "0")
                  .cls(C::Steady).gradient("x+y+z").flat(3),
          });

    entry(StandardGroup::RxRxR,
          {
              B("rxr+xr.f=1.gaussian", "f = 1, X = -z d/dz", "1", {"0", "0", "-z"}, "-1")
                  .cls(C::Expanding).gradient("-z^2/2").K(1, 2, "-1").K(1, 3, "0").K(2, 3, "0")
                  .Ric(1, 1, "-1").Ric(2, 2, "-1").Ric(3, 3, "0").Ric(1, 2, "0").Ric(1, 3, "0").Ric(2, 3, "0"),
              B("rxr+xr.f=1.shifted", "f = 1, X = d/dx - z d/dz", "1", {"0", "1/y", "-z"}, "-1")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(1, 3, "0").K(2, 3, "0"),
              B("rxr+xr.f=y2.dilation", "f = y^2, X = x d/dx + y d/dy", "y^2", {"1", "x/y", "0"}, "1")
                  .cls(C::Shrinking).gradient("(x^2+y^2)/2").flat(3),
          });

    entry(StandardGroup::RxRxR2,
          {
              B("rxr+xr2.f=1.gaussian", "f = 1, X = -z d/dz - w d/dw", "1", {"0", "0", "-z", "-w"}, "-1")
                  .cls(C::Expanding).gradient("-(z^2+w^2)/2").K(1, 2, "-1").K(3, 4, "0"),
              B("rxr+xr2.f=1.shifted", "f = 1, X = d/dx - z d/dz - w d/dw", "1", {"0", "1/y", "-z", "-w"}, "-1")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(3, 4, "0"),
          });

    entry(StandardGroup::RxRxRxR,
          {
              B("rxr+xrxr+.f=1.first", "f = 1, X = x d/dx + y d/dy", "1", {"1", "x/y", "0", "0"}, "-1")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(3, 4, "-1"),
              B("rxr+xrxr+.f=1.second", "f = 1, X = z d/dz + w d/dw", "1", {"0", "0", "1", "z/w"}, "-1")
                  .cls(C::Expanding).not_gradient().K(1, 2, "-1").K(3, 4, "-1"),
          });

    return out;
}

} // namespace detail

inline const std::vector<CatalogEntry>& catalog_entries()
{
    static const std::vector<CatalogEntry> entries = detail::build_catalog();
    return entries;
}

/// Short names for frequently used cases.
inline std::string_view resolve_alias(std::string_view name)
{
    if (name == "cigar")
        return "r2.cigar";
    return name;
}

inline std::string catalog_ids()
{
    std::string out;
    for (const auto& e : catalog_entries())
        out += std::string(out.empty() ? "" : ", ") + "'" + e.id + "'";
    return out;
}

inline const CatalogEntry& find_entry(std::string_view name)
{
    for (const auto& e : catalog_entries())
        if (name == e.id || name == e.slug)
            return e;
    throw NotFoundError("no catalog entry '" + std::string(name) + "'; valid ids: " + catalog_ids());
}

inline std::vector<SolitonCase> catalog_cases()
{
    std::vector<SolitonCase> out;
    for (const auto& e : catalog_entries())
        for (const auto& spec : e.cases)
            out.emplace_back(e.group, spec);
    return out;
}

inline SolitonCase find_case(std::string_view name)
{
    const auto key = resolve_alias(name);
    for (const auto& e : catalog_entries())
        for (const auto& spec : e.cases)
            if (spec.id == key)
                return SolitonCase(e.group, spec);
    throw NotFoundError("no catalog case '" + std::string(name) + "'; valid ids: " + catalog_ids() +
                        " and their case ids (see `solitonforge list`)");
}

/// Exact-match lookup of an entry id, an entry slug, a case id or an alias.
inline std::variant<const CatalogEntry*, SolitonCase> lookup(std::string_view name)
{
    for (const auto& e : catalog_entries())
        if (name == e.id || name == e.slug)
            return &e;
    return find_case(name);
}

} // namespace solitonforge
