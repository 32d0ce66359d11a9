#pragma once

#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/group.hpp"

namespace solitonforge {

/// The six built-in groups, each with a long id and a short slug.
enum class StandardGroup { R2, RxR, R2xR, RxRxR, RxRxR2, RxRxRxR };

struct StandardGroupInfo {
    StandardGroup kind;
    const char* id;
    const char* slug;
};

inline const std::vector<StandardGroupInfo>& standard_group_table()
{
    static const std::vector<StandardGroupInfo> table = {
        {StandardGroup::R2, "R^2", "r2"},
        {StandardGroup::RxR, "R rtimes R^+", "rxr+"},
        {StandardGroup::R2xR, "R^2 rtimes R^+", "r2xr+"},
        {StandardGroup::RxRxR, "R rtimes R^+ times R", "rxr+xr"},
        {StandardGroup::RxRxR2, "R rtimes R^+ times R^2", "rxr+xr2"},
        {StandardGroup::RxRxRxR, "R rtimes R^+ times R rtimes R^+", "rxr+xrxr+"},
    };
    return table;
}

namespace detail {

inline StructureConstants alpha_from(int n, std::initializer_list<std::tuple<int, int, int>> ones)
{
    StructureConstants a(n);
    for (auto [i, j, k] : ones) {
        a(i - 1, j - 1, k - 1) = 1.0;
        a(j - 1, i - 1, k - 1) = -1.0;
    }
    return a;
}

inline LieGroup::Definition standard_definition(StandardGroup kind)
{
    LieGroup::Definition d;
    switch (kind) {
    case StandardGroup::R2:
        d.coords = {"x", "y"};
        d.identity = {0.0, 0.0};
        d.frame = {{"1", "0"}, {"0", "1"}};
        d.alpha = alpha_from(2, {});
        d.mul = std::vector<std::string>{"x1 + x2", "y1 + y2"};
        break;
    case StandardGroup::RxR:
        d.coords = {"x", "y"};
        d.positive = {1};
        d.identity = {0.0, 1.0};
        d.frame = {{"0", "y"}, {"y", "0"}};
        d.alpha = alpha_from(2, {{1, 2, 2}});
        d.mul = std::vector<std::string>{"x1 + y1*x2", "y1*y2"};
        break;
    case StandardGroup::R2xR:
        d.coords = {"x", "y", "z"};
        d.positive = {2};
        d.identity = {0.0, 0.0, 1.0};
        d.frame = {{"0", "0", "z"}, {"z", "0", "0"}, {"0", "z", "0"}};
        d.alpha = alpha_from(3, {{1, 2, 2}, {1, 3, 3}});
        d.mul = std::vector<std::string>{"x1 + z1*x2", "y1 + z1*y2", "z1*z2"};
        break;
    case StandardGroup::RxRxR:
        d.coords = {"x", "y", "z"};
        d.positive = {1};
        d.identity = {0.0, 1.0, 0.0};
        d.frame = {{"0", "y", "0"}, {"y", "0", "0"}, {"0", "0", "1"}};
        d.alpha = alpha_from(3, {{1, 2, 2}});
        d.mul = std::vector<std::string>{"x1 + y1*x2", "y1*y2", "z1 + z2"};
        break;
    case StandardGroup::RxRxR2:
        d.coords = {"x", "y", "z", "w"};
        d.positive = {1};
        d.identity = {0.0, 1.0, 0.0, 0.0};
        d.frame = {{"0", "y", "0", "0"}, {"y", "0", "0", "0"}, {"0", "0", "1", "0"}, {"0", "0", "0", "1"}};
        d.alpha = alpha_from(4, {{1, 2, 2}});
        d.mul = std::vector<std::string>{"x1 + y1*x2", "y1*y2", "z1 + z2", "w1 + w2"};
        break;
    case StandardGroup::RxRxRxR:
        d.coords = {"x", "y", "z", "w"};
        d.positive = {1, 3};
        d.identity = {0.0, 1.0, 0.0, 1.0};
        d.frame = {{"0", "y", "0", "0"}, {"y", "0", "0", "0"}, {"0", "0", "0", "w"}, {"0", "0", "w", "0"}};
        d.alpha = alpha_from(4, {{1, 2, 2}, {3, 4, 4}});
        d.mul = std::vector<std::string>{"x1 + y1*x2", "y1*y2", "z1 + w1*z2", "w1*w2"};
        break;
    }
    for (const auto& info : standard_group_table())
        if (info.kind == kind)
            d.id = info.id;
    return d;
}

} // namespace detail

inline std::shared_ptr<const LieGroup> standard_group(StandardGroup kind)
{
    static const std::vector<std::shared_ptr<const LieGroup>> groups = [] {
        std::vector<std::shared_ptr<const LieGroup>> out;
        for (const auto& info : standard_group_table())
            out.push_back(std::make_shared<const LieGroup>(detail::standard_definition(info.kind)));
        return out;
    }();
    return groups[static_cast<std::size_t>(kind)];
}

/// Accepts either the long id or the slug.
inline std::shared_ptr<const LieGroup> standard_group(std::string_view name)
{
    for (const auto& info : standard_group_table())
        if (name == info.id || name == info.slug)
            return standard_group(info.kind);
    std::string ids;
    for (const auto& info : standard_group_table())
        ids += std::string(ids.empty() ? "" : ", ") + "'" + info.id + "'";
    throw NotFoundError("unknown group '" + std::string(name) + "'; known groups: " + ids);
}

/// Which standard group g is, judged by coordinates, frame and structure
/// constants rather than by its id.
inline std::optional<StandardGroup> identify_standard_group(const LieGroup& g)
{
    for (const auto& info : standard_group_table()) {
        const auto& s = *standard_group(info.kind);
        if (s.coords() == g.coords() && s.alpha() == g.alpha() && s.frame() == g.frame())
            return info.kind;
    }
    return std::nullopt;
}

} // namespace solitonforge
