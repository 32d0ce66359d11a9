#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "solitonforge/catalog.hpp"
#include "solitonforge/error.hpp"
#include "solitonforge/soliton.hpp"
#include "solitonforge/standard_groups.hpp"

namespace solitonforge {

using json = nlohmann::json;

inline constexpr int kCaseFileVersion = 1;

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw InputError("unknown key '" + key + "' in " + where);
}

inline const json& require(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key))
        throw InputError("missing key '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

inline std::string as_string(const json& v, const std::string& where)
{
    if (!v.is_string())
        throw InputError(where + " must be a string");
    return v.get<std::string>();
}

inline double as_number(const json& v, const std::string& where)
{
    if (!v.is_number())
        throw InputError(where + " must be a number");
    return v.get<double>();
}

inline int as_int(const json& v, const std::string& where)
{
    if (!v.is_number_integer())
        throw InputError(where + " must be an integer");
    return v.get<int>();
}

inline std::vector<std::string> as_strings(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw InputError(where + " must be an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_string(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

/// Rewrites parse errors so they name the field that failed.
template <class Fn>
auto with_context(const std::string& where, Fn fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ParseError& e) {
        throw InputError(where + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
    }
}

inline std::string domain_text(const LieGroup::Definition& d, int k)
{
    return d.coords[static_cast<std::size_t>(k)] + ">0";
}

inline json group_to_json(const LieGroup& g)
{
    if (const auto kind = identify_standard_group(g)) {
        const auto& s = *standard_group(*kind);
        if (s.id() == g.id() && s.identity() == g.identity() && s.positive() == g.positive())
            return g.id();
    }
    const auto d = g.definition();
    json out;
    out["id"] = d.id;
    out["coords"] = d.coords;
    json dom = json::array();
    for (int k : d.positive)
        dom.push_back(domain_text(d, k));
    out["domain"] = dom;
    out["identity"] = d.identity;
    out["frame"] = d.frame;
    const int n = g.dim();
    json alpha = json::array();
    for (int i = 0; i < n; ++i) {
        json a = json::array();
        for (int j = 0; j < n; ++j) {
            json b = json::array();
            for (int k = 0; k < n; ++k)
                b.push_back(g.alpha(i, j, k));
            a.push_back(b);
        }
        alpha.push_back(a);
    }
    out["alpha"] = alpha;
    if (d.mul)
        out["mul"] = *d.mul;
    return out;
}

inline std::shared_ptr<const LieGroup> group_from_json(const json& v)
{
    if (v.is_string()) {
        try {
            return standard_group(v.get<std::string>());
        } catch (const NotFoundError& e) {
            throw InputError(std::string("group: ") + e.what());
        }
    }
    if (!v.is_object())
        throw InputError("group must be a catalog id or an object");
    reject_unknown_keys(v, {"id", "coords", "domain", "identity", "frame", "alpha", "mul"}, "group");
    LieGroup::Definition d;
    d.id = v.contains("id") ? as_string(v["id"], "group.id") : "custom";
    d.coords = as_strings(require(v, "coords", "group"), "group.coords");
    const int n = static_cast<int>(d.coords.size());
    if (n < 1 || n > 8)
        throw InputError("group.coords must name between 1 and 8 coordinates");
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < k; ++l)
            if (d.coords[static_cast<std::size_t>(k)] == d.coords[static_cast<std::size_t>(l)])
                throw InputError("group.coords has duplicate name '" + d.coords[static_cast<std::size_t>(k)] + "'");
    if (v.contains("domain"))
        for (const auto& c : as_strings(v["domain"], "group.domain")) {
            std::string t;
            for (char ch : c)
                if (ch != ' ')
                    t += ch;
            int found = -1;
            for (int k = 0; k < n; ++k)
                if (t == d.coords[static_cast<std::size_t>(k)] + ">0")
                    found = k;
            if (found < 0)
                throw InputError("group.domain entry '" + c + "' must have the form '<coord> > 0'");
            d.positive.push_back(found);
        }
    const json& id = require(v, "identity", "group");
    if (!id.is_array() || static_cast<int>(id.size()) != n)
        throw InputError("group.identity must be an array of " + std::to_string(n) + " numbers");
    for (std::size_t k = 0; k < id.size(); ++k)
        d.identity.push_back(as_number(id[k], "group.identity[" + std::to_string(k) + "]"));
    const json& fr = require(v, "frame", "group");
    if (!fr.is_array() || static_cast<int>(fr.size()) != n)
        throw InputError("group.frame must have " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < fr.size(); ++i)
        d.frame.push_back(as_strings(fr[i], "group.frame[" + std::to_string(i) + "]"));
    const json& al = require(v, "alpha", "group");
    d.alpha = StructureConstants(n);
    auto bad_alpha = [&] { return InputError("group.alpha must be an n x n x n array of numbers"); };
    if (!al.is_array() || static_cast<int>(al.size()) != n)
        throw bad_alpha();
    for (int i = 0; i < n; ++i) {
        const json& a = al[static_cast<std::size_t>(i)];
        if (!a.is_array() || static_cast<int>(a.size()) != n)
            throw bad_alpha();
        for (int j = 0; j < n; ++j) {
            const json& b = a[static_cast<std::size_t>(j)];
            if (!b.is_array() || static_cast<int>(b.size()) != n)
                throw bad_alpha();
            for (int k = 0; k < n; ++k)
                d.alpha(i, j, k) = as_number(b[static_cast<std::size_t>(k)], "group.alpha entry");
        }
    }
    if (v.contains("mul"))
        d.mul = as_strings(v["mul"], "group.mul");
    return with_context("group", [&] { return std::make_shared<const LieGroup>(std::move(d)); });
}

inline json expected_curvature_to_json(const std::vector<ExpectedCurvature>& list)
{
    json out = json::array();
    for (const auto& e : list)
        out.push_back({{"p", e.p + 1}, {"q", e.q + 1}, {"expr", e.expr}});
    return out;
}

inline std::vector<ExpectedCurvature> expected_curvature_from_json(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw InputError(where + " must be an array");
    std::vector<ExpectedCurvature> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!v[i].is_object())
            throw InputError(w + " must be an object");
        reject_unknown_keys(v[i], {"p", "q", "expr"}, w);
        ExpectedCurvature e;
        e.p = as_int(require(v[i], "p", w), w + ".p") - 1;
        e.q = as_int(require(v[i], "q", w), w + ".q") - 1;
        e.expr = as_string(require(v[i], "expr", w), w + ".expr");
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace detail

inline json grid_to_json(const Grid& g)
{
    json ranges = json::array();
    for (const auto& r : g.ranges)
        ranges.push_back({r.lo, r.hi});
    return {{"ranges", ranges}, {"counts", g.counts}};
}

inline Grid grid_from_json(const json& v)
{
    using namespace detail;
    if (!v.is_object())
        throw InputError("grid must be an object");
    reject_unknown_keys(v, {"ranges", "counts"}, "grid");
    Grid g;
    const json& r = require(v, "ranges", "grid");
    const json& c = require(v, "counts", "grid");
    if (!r.is_array() || !c.is_array())
        throw InputError("grid.ranges and grid.counts must be arrays");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i].is_array() || r[i].size() != 2)
            throw InputError("grid.ranges[" + std::to_string(i) + "] must be [lo, hi]");
        g.ranges.push_back({as_number(r[i][0], "grid range"), as_number(r[i][1], "grid range")});
    }
    for (std::size_t i = 0; i < c.size(); ++i)
        g.counts.push_back(as_int(c[i], "grid.counts[" + std::to_string(i) + "]"));
    g.validate();
    return g;
}

inline json case_to_json(const SolitonCase& c)
{
    const CaseSpec& s = c.spec();
    json out;
    out["v"] = kCaseFileVersion;
    out["id"] = s.id;
    if (!s.title.empty())
        out["title"] = s.title;
    out["group"] = detail::group_to_json(c.group());
    out["f"] = s.f;
    out["X"] = s.x;
    out["X_basis"] = s.basis == VectorBasis::Frame ? "frame" : "coords";
    out["lambda"] = s.lambda;
    if (s.phi)
        out["phi"] = *s.phi;
    json exp = json::object();
    if (s.expected.cls)
        exp["class"] = to_string(*s.expected.cls);
    if (s.expected.gradient)
        exp["gradient"] = *s.expected.gradient;
    if (!s.expected.sectional.empty())
        exp["sectional"] = detail::expected_curvature_to_json(s.expected.sectional);
    if (!s.expected.ricci.empty())
        exp["ricci"] = detail::expected_curvature_to_json(s.expected.ricci);
    out["expected"] = exp;
    if (s.grid)
        out["grid"] = grid_to_json(*s.grid);
    out["tolerances"] = {{"residual", s.tol.residual}, {"oracle", s.tol.oracle}, {"fd", s.tol.fd}};
    out["seed"] = s.seed;
    return out;
}

inline SolitonCase case_from_json(const json& v)
{
    using namespace detail;
    if (!v.is_object())
        throw InputError("case file must hold a JSON object");
    reject_unknown_keys(v,
                        {"v", "id", "title", "group", "f", "X", "X_basis", "lambda", "phi", "expected", "grid",
                         "tolerances", "seed"},
                        "case file");
    const int version = as_int(require(v, "v", "case file"), "v");
    if (version != kCaseFileVersion)
        throw InputError("unsupported case file version " + std::to_string(version));
    CaseSpec s;
    s.id = as_string(require(v, "id", "case file"), "id");
    if (v.contains("title"))
        s.title = as_string(v["title"], "title");
    const auto group = group_from_json(require(v, "group", "case file"));
    s.f = as_string(require(v, "f", "case file"), "f");
    s.x = as_strings(require(v, "X", "case file"), "X");
    if (v.contains("X_basis")) {
        const auto b = as_string(v["X_basis"], "X_basis");
        if (b == "frame")
            s.basis = VectorBasis::Frame;
        else if (b == "coords")
            s.basis = VectorBasis::Coords;
        else
            throw InputError("X_basis must be \"frame\" or \"coords\"");
    }
    s.lambda = as_string(require(v, "lambda", "case file"), "lambda");
    if (v.contains("phi"))
        s.phi = as_string(v["phi"], "phi");
    if (v.contains("expected")) {
        const json& e = v["expected"];
        if (!e.is_object())
            throw InputError("expected must be an object");
        reject_unknown_keys(e, {"class", "gradient", "sectional", "ricci"}, "expected");
        if (e.contains("class"))
            s.expected.cls = with_context("expected.class", [&] { return parse_class(as_string(e["class"], "class")); });
        if (e.contains("gradient")) {
            if (!e["gradient"].is_boolean())
                throw InputError("expected.gradient must be true or false");
            s.expected.gradient = e["gradient"].get<bool>();
        }
        if (e.contains("sectional"))
            s.expected.sectional = expected_curvature_from_json(e["sectional"], "expected.sectional");
        if (e.contains("ricci"))
            s.expected.ricci = expected_curvature_from_json(e["ricci"], "expected.ricci");
    }
    if (v.contains("grid"))
        s.grid = with_context("grid", [&] { return grid_from_json(v["grid"]); });
    if (v.contains("tolerances")) {
        const json& t = v["tolerances"];
        if (!t.is_object())
            throw InputError("tolerances must be an object");
        reject_unknown_keys(t, {"residual", "oracle", "fd"}, "tolerances");
        if (t.contains("residual"))
            s.tol.residual = as_number(t["residual"], "tolerances.residual");
        if (t.contains("oracle"))
            s.tol.oracle = as_number(t["oracle"], "tolerances.oracle");
        if (t.contains("fd"))
            s.tol.fd = as_number(t["fd"], "tolerances.fd");
        if (!(s.tol.residual > 0) || !(s.tol.oracle > 0) || !(s.tol.fd > 0))
            throw InputError("tolerances must be positive");
    }
    if (v.contains("seed")) {
        if (!v["seed"].is_number_unsigned())
            throw InputError("seed must be a non-negative integer");
        s.seed = v["seed"].get<std::uint64_t>();
    }
    // Parse every expression now so errors point at the field.
    const auto& coords = group->coords();
    with_context("f", [&] { return parse(s.f, coords); });
    for (std::size_t i = 0; i < s.x.size(); ++i)
        with_context("X[" + std::to_string(i) + "]", [&] { return parse(s.x[i], coords); });
    with_context("lambda", [&] { return parse(s.lambda, coords); });
    if (s.phi)
        with_context("phi", [&] { return parse(*s.phi, coords); });
    for (const auto& e : s.expected.sectional)
        with_context("expected.sectional", [&] { return parse(e.expr, coords); });
    for (const auto& e : s.expected.ricci)
        with_context("expected.ricci", [&] { return parse(e.expr, coords); });
    return with_context("case '" + s.id + "'", [&] { return SolitonCase(group, std::move(s)); });
}

inline SolitonCase parse_case_text(const std::string& text)
{
    json v;
    try {
        v = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return case_from_json(v);
}

inline SolitonCase load_case_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open case file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case_text(buf.str());
}

inline void save_case_file(const SolitonCase& c, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << case_to_json(c).dump(2) << "\n";
}

} // namespace solitonforge
