#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "solitonforge/casefile.hpp"
#include "solitonforge/curvature.hpp"
#include "solitonforge/metric.hpp"
#include "solitonforge/sampling.hpp"
#include "solitonforge/soliton.hpp"

namespace solitonforge {

struct CheckOptions {
    std::optional<Grid> grid;           // overrides the case grid
    std::optional<double> tol;          // overrides the residual tolerance
    std::optional<std::uint64_t> seed;  // overrides the case seed
    int oracle_points = 25;
    int gradient_points = 64;
    bool timing = false;
};

/// Result of one check; `max` is the worst deviation seen and `where` the
/// sample attaining it.
struct Finding {
    double max = 0.0;
    std::size_t where = 0;
    int p = 0;
    int q = 0;
};

inline void absorb(Finding& acc, const Finding& x)
{
    if (x.max > acc.max) {
        acc = x;
    }
}

inline Finding worst_entry(const RealMatrix& m, std::size_t where)
{
    Finding f;
    f.where = where;
    f.max = -1.0;
    for (int p = 0; p < m.rows(); ++p)
        for (int q = 0; q < m.cols(); ++q)
            if (std::abs(m(p, q)) > f.max) {
                f.max = std::abs(m(p, q));
                f.p = p;
                f.q = q;
            }
    return f;
}

inline json point_json(const Point& p) { return json(p); }

inline json finding_json(const std::string& name, const Finding& f, double tol, const std::vector<Point>& pts,
                         bool with_entry)
{
    json j;
    j["name"] = name;
    j["status"] = f.max < tol ? "pass" : "fail";
    j["max"] = f.max;
    j["tol"] = tol;
    if (!pts.empty()) {
        j["argmax"]["point"] = point_json(pts[f.where]);
        if (with_entry)
            j["argmax"]["entry"] = {f.p + 1, f.q + 1};
    }
    return j;
}

inline double wall_seconds(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CheckResult {
    json report;
    bool pass = false;
};

/**
 * Runs every check that applies to the case: soliton residual on the grid,
 * the specialised system when the group has one, classification, gradient
 * verdict, expected curvature and the coordinate oracle.
 */
inline CheckResult check_case(const SolitonCase& c, const CheckOptions& opt = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = c.group();
    const auto& spec = c.spec();
    const Grid grid = opt.grid ? *opt.grid : c.grid();
    if (static_cast<int>(grid.ranges.size()) != g.dim())
        throw InputError("grid has " + std::to_string(grid.ranges.size()) + " axes, group needs " +
                         std::to_string(g.dim()));
    const double tol = opt.tol ? *opt.tol : c.tol().residual;
    const std::uint64_t seed = opt.seed ? *opt.seed : spec.seed;
    const auto pts = grid.points();
    for (const auto& p : pts)
        g.require_domain(p);

    const bool special = has_specialized_system(g);
    std::vector<Expr> ksec, kric;
    for (const auto& e : spec.expected.sectional)
        ksec.push_back(parse(e.expr, g.coords()));
    for (const auto& e : spec.expected.ricci)
        kric.push_back(parse(e.expr, g.coords()));

    struct PerPoint {
        Finding residual, special, sectional, ricci, potential;
        double lambda = 0.0;
        double f = 0.0;
    };
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    const auto per = parallel_map(idx, [&](std::size_t i) {
        const Point& p = pts[i];
        const PointData d = point_data(c, p);
        PerPoint r;
        const RealMatrix res = soliton_residual(g.alpha(), d);
        r.residual = worst_entry(res, i);
        if (special)
            r.special = worst_entry(specialized_residual(g, d), i);
        r.sectional.where = r.ricci.where = r.potential.where = i;
        for (std::size_t k = 0; k < ksec.size(); ++k) {
            const auto& e = spec.expected.sectional[k];
            const double dev = std::abs(sectional(g.alpha(), d.f, e.p, e.q) - eval(ksec[k], p));
            if (dev > r.sectional.max || k == 0)
                r.sectional = {dev, i, e.p, e.q};
        }
        for (std::size_t k = 0; k < kric.size(); ++k) {
            const auto& e = spec.expected.ricci[k];
            const double dev = std::abs(d.ricci(e.p, e.q) - eval(kric[k], p));
            if (dev > r.ricci.max || k == 0)
                r.ricci = {dev, i, e.p, e.q};
        }
        if (c.phi()) {
            const auto gc = gradient_components(c.metric(), *c.phi(), p);
            for (int k = 0; k < g.dim(); ++k) {
                const double dev = std::abs(gc[static_cast<std::size_t>(k)] - d.th(k));
                if (dev > r.potential.max || k == 0)
                    r.potential = {dev, i, k, k};
            }
        }
        r.lambda = d.lambda;
        r.f = d.f.value;
        return r;
    });

    Finding residual{-1.0, 0, 0, 0}, spec_dev{-1.0, 0, 0, 0}, sec{-1.0, 0, 0, 0}, ric{-1.0, 0, 0, 0},
        pot{-1.0, 0, 0, 0};
    double min_two_f = 0.0;
    for (std::size_t i = 0; i < per.size(); ++i) {
        absorb(residual, per[i].residual);
        absorb(spec_dev, per[i].special);
        absorb(sec, per[i].sectional);
        absorb(ric, per[i].ricci);
        absorb(pot, per[i].potential);
        min_two_f = i == 0 ? 2.0 * per[i].f : std::min(min_two_f, 2.0 * per[i].f);
    }

    json checks = json::array();
    bool pass = true;
    auto add = [&](json j) {
        if (j.contains("status") && j["status"] == "fail")
            pass = false;
        checks.push_back(std::move(j));
    };

    // lambda: constant or a field
    bool constant_lambda = true;
    {
        const auto probe = grid.random_points(16, seed);
        constant_lambda = is_constant_on(c.lambda(), probe);
    }
    const bool almost = !constant_lambda || spec.expected.cls == SolitonClass::Almost;
    add(finding_json(almost ? "almost_soliton_residual" : "soliton_residual", residual, tol, pts, true));
    if (special) {
        json j = finding_json("specialized_system", spec_dev, tol, pts, true);
        add(std::move(j));
    }

    {
        json j;
        j["name"] = "classification";
        const SolitonClass computed = constant_lambda ? classify(per.front().lambda) : SolitonClass::Almost;
        j["computed"] = to_string(computed);
        if (constant_lambda)
            j["lambda"] = per.front().lambda;
        if (spec.expected.cls) {
            j["expected"] = to_string(*spec.expected.cls);
            j["status"] = *spec.expected.cls == computed ? "pass" : "fail";
        } else {
            j["status"] = "info";
        }
        add(std::move(j));
    }

    {
        const auto sample = grid.random_points(static_cast<std::size_t>(opt.gradient_points), seed + 1);
        const double cert = nongradience_certificate(c.metric(), c.x(), c.basis(), sample);
        json j;
        j["name"] = "gradient";
        j["certificate"] = cert;
        j["certificate_points"] = sample.size();
        j["certificate_kind"] = "closedness of g(X, .) on a simply connected box";
        bool ok = true;
        if (c.phi()) {
            j["potential"] = *spec.phi;
            j["potential_deviation"] = pot.max;
            j["potential_argmax"] = {{"point", point_json(pts[pot.where])}, {"component", pot.p + 1}};
        }
        if (spec.expected.gradient) {
            j["expected"] = *spec.expected.gradient;
            if (*spec.expected.gradient) {
                ok = cert < tol && (!c.phi() || pot.max < tol);
            } else {
                ok = cert > 1e-3 && !c.phi();
            }
            j["status"] = ok ? "pass" : "fail";
        } else {
            j["status"] = "info";
        }
        j["verdict"] = cert < tol ? "closed" : (cert > 1e-3 ? "not gradient" : "inconclusive");
        add(std::move(j));
    }

    if (!ksec.empty())
        add(finding_json("expected_sectional", sec, tol, pts, true));
    if (!kric.empty())
        add(finding_json("expected_ricci", ric, tol, pts, true));

    {
        const auto sample = grid.random_points(static_cast<std::size_t>(opt.oracle_points), seed + 2);
        const auto devs = parallel_map(sample, [&](const Point& p) {
            return curvature_report(c.metric(), p, true).oracle_deviation;
        });
        Finding o{-1.0, 0, 0, 0};
        for (std::size_t i = 0; i < devs.size(); ++i)
            absorb(o, Finding{devs[i], i, 0, 0});
        add(finding_json("oracle", o, c.tol().oracle, sample, false));
    }

    json rep;
    rep["case"] = spec.id;
    if (!spec.title.empty())
        rep["title"] = spec.title;
    rep["group"] = g.id();
    rep["seed"] = seed;
    rep["grid"] = grid_to_json(grid);
    rep["points"] = pts.size();
    rep["min_2f"] = min_two_f;
    {
        const auto summary = curvature_report(c.metric(), g.identity(), false);
        json cs;
        cs["at"] = point_json(g.identity());
        cs["sectional"] = json::array();
        for (int p = 0; p < g.dim(); ++p)
            for (int q = p + 1; q < g.dim(); ++q)
                cs["sectional"].push_back({{"p", p + 1}, {"q", q + 1}, {"K", summary.sectional(p, q)}});
        json rows = json::array();
        for (int p = 0; p < g.dim(); ++p) {
            json row = json::array();
            for (int q = 0; q < g.dim(); ++q)
                row.push_back(summary.ricci(p, q));
            rows.push_back(row);
        }
        cs["ricci"] = rows;
        cs["scalar"] = summary.scalar;
        rep["curvature_at_identity"] = cs;
    }
    rep["checks"] = checks;
    rep["status"] = pass ? "pass" : "fail";
    if (opt.timing)
        rep["wall_time_s"] = wall_seconds(t0);
    return {rep, pass};
}

/// Per-point curvature table for a case.
inline json curvature_table(const SolitonCase& c, const std::vector<Point>& pts, double oracle_tol, bool& pass)
{
    const auto reps = parallel_map(pts, [&](const Point& p) { return curvature_report(c.metric(), p, true); });
    json rows = json::array();
    pass = true;
    for (const auto& r : reps) {
        json row;
        row["point"] = point_json(r.point);
        json sec = json::array();
        for (int p = 0; p < r.sectional.rows(); ++p)
            for (int q = p + 1; q < r.sectional.cols(); ++q)
                sec.push_back({{"p", p + 1}, {"q", q + 1}, {"K", r.sectional(p, q)}});
        row["sectional"] = sec;
        json ric = json::array();
        for (int p = 0; p < r.ricci.rows(); ++p) {
            json line = json::array();
            for (int q = 0; q < r.ricci.cols(); ++q)
                line.push_back(r.ricci(p, q));
            ric.push_back(line);
        }
        row["ricci"] = ric;
        row["scalar"] = r.scalar;
        row["oracle_deviation"] = r.oracle_deviation;
        if (!(r.oracle_deviation < oracle_tol))
            pass = false;
        rows.push_back(row);
    }
    return rows;
}

/// f-left invariance and the algebraic checks that go with it.
inline CheckResult invariance_check(const SolitonCase& c, std::uint64_t seed, int pairs = 50)
{
    const auto& g = c.group();
    json rep;
    rep["case"] = c.id();
    rep["group"] = g.id();
    rep["seed"] = seed;
    rep["pairs"] = pairs;
    json checks = json::array();
    bool pass = true;
    const auto samples = random_pairs(g, static_cast<std::size_t>(pairs), seed);
    std::vector<Point> points;
    for (const auto& [a, b] : samples)
        points.push_back(a);
    const double comm = commutator_deviation(g, points);
    checks.push_back({{"name", "structure_constants"}, {"max", comm}, {"tol", 1e-10},
                      {"status", comm < 1e-10 ? "pass" : "fail"}});
    pass = pass && comm < 1e-10;
    if (g.has_mul()) {
        const double frame = frame_left_invariance_residual(g, samples);
        checks.push_back({{"name", "frame_left_invariance"}, {"max", frame}, {"tol", 1e-10},
                          {"status", frame < 1e-10 ? "pass" : "fail"}});
        const double inv = check_f_left_invariance(c.metric(), samples);
        checks.push_back({{"name", "f_left_invariance"}, {"max", inv}, {"tol", 1e-9},
                          {"status", inv < 1e-9 ? "pass" : "fail"}});
        pass = pass && frame < 1e-10 && inv < 1e-9;
        checks.push_back({{"name", "f_symmetric"}, {"value", check_f_symmetric(c.metric(), samples)},
                          {"max", f_symmetry_residual(c.metric(), samples)}, {"status", "info"}});
        checks.push_back({{"name", "ad_invariance"}, {"max", check_ad_invariance(g, samples.front().first)},
                          {"at", point_json(samples.front().first)}, {"status", "info"}});
    } else {
        checks.push_back({{"name", "f_left_invariance"}, {"status", "skipped"},
                          {"reason", "group has no multiplication law"}});
    }
    checks.push_back({{"name", "bracket_symmetry"}, {"value", check_bracket_symmetry(g)}, {"status", "info"}});
    rep["checks"] = checks;
    rep["status"] = pass ? "pass" : "fail";
    return {rep, pass};
}

inline CheckResult flow_report(const SolitonCase& c, const FlowOptions& opt, std::uint64_t seed)
{
    CaseSpec spec = c.spec();
    spec.seed = seed;
    const SolitonCase seeded(c.group_ptr(), spec);
    const FlowReport fr = flow_check(seeded, opt);
    const double tol = c.tol().fd;
    const bool pass = fr.initial < tol && fr.along < tol;
    json rep;
    rep["case"] = c.id();
    rep["group"] = c.group().id();
    rep["seed"] = seed;
    rep["t_max"] = opt.t_max;
    rep["steps"] = opt.steps;
    rep["probes"] = fr.probes;
    rep["initial"] = fr.initial;
    rep["along"] = fr.along;
    rep["worst"] = {{"point", point_json(fr.worst_point)}, {"t", fr.worst_time}};
    rep["tol"] = tol;
    rep["status"] = pass ? "pass" : "fail";
    return {rep, pass};
}

} // namespace solitonforge
