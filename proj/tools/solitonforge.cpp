// solitonforge: command-line front end for the soliton and curvature checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "solitonforge/casefile.hpp"
#include "solitonforge/catalog.hpp"
#include "solitonforge/report.hpp"

namespace sf = solitonforge;
using sf::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct Options {
    std::string target;
    bool all = false;
    std::string case_file;
    std::string grid_spec;
    std::string point_spec;
    double tol = 0.0;
    bool tol_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string csv_path;
    std::string json_path;
    bool timing = false;
    double t_max = 0.2;
    int steps = 64;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw sf::InputError("cannot read " + what + " from '" + s + "'");
    return v;
}

/// "N" (N samples per axis over the default box) or "lo:hi:n,lo:hi:n,...".
sf::Grid parse_grid(const std::string& spec, const sf::LieGroup& g)
{
    if (spec.find(':') == std::string::npos) {
        const double n = to_double(spec, "grid count");
        if (n < 1 || n != static_cast<int>(n))
            throw sf::InputError("grid count must be a positive integer");
        return g.default_grid(static_cast<int>(n));
    }
    sf::Grid grid;
    for (const auto& axis : split(spec, ',')) {
        const auto parts = split(axis, ':');
        if (parts.size() != 3)
            throw sf::InputError("grid axis '" + axis + "' must read lo:hi:count");
        const double n = to_double(parts[2], "grid count");
        if (n < 1 || n != static_cast<int>(n))
            throw sf::InputError("grid count must be a positive integer");
        grid.ranges.push_back({to_double(parts[0], "grid bound"), to_double(parts[1], "grid bound")});
        grid.counts.push_back(static_cast<int>(n));
    }
    grid.validate();
    if (static_cast<int>(grid.ranges.size()) != g.dim())
        throw sf::InputError("grid has " + std::to_string(grid.ranges.size()) + " axes, group needs " +
                             std::to_string(g.dim()));
    return grid;
}

/// Cases named by the options: --all, --case FILE, or a catalog name.
std::vector<sf::SolitonCase> resolve_cases(const Options& o)
{
    const int chosen = (o.all ? 1 : 0) + (o.case_file.empty() ? 0 : 1) + (o.target.empty() ? 0 : 1);
    if (chosen != 1)
        throw sf::InputError("name exactly one target: a catalog id, --case FILE or --all");
    if (o.all)
        return sf::catalog_cases();
    if (!o.case_file.empty())
        return {sf::load_case_file(o.case_file)};
    auto found = sf::lookup(o.target);
    if (auto* entry = std::get_if<const sf::CatalogEntry*>(&found)) {
        std::vector<sf::SolitonCase> out;
        for (const auto& spec : (*entry)->cases)
            out.emplace_back((*entry)->group, spec);
        return out;
    }
    return {std::get<sf::SolitonCase>(found)};
}

void emit(const json& report, const Options& o)
{
    const std::string text = report.dump(2) + "\n";
    if (o.json_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.json_path, std::ios::binary);
    if (!out)
        throw sf::InputError("cannot write '" + o.json_path + "'");
    out << text;
}

std::ofstream open_csv(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw sf::InputError("cannot write '" + path + "'");
    out.precision(17);
    return out;
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

int cmd_list()
{
    for (const auto& e : sf::catalog_entries()) {
        std::cout << e.id << "  (" << e.slug << ", " << e.cases.size() << " cases)\n";
        for (const auto& c : e.cases)
            std::cout << "    " << c.id << "  " << c.title << "\n";
    }
    return kExitPass;
}

void describe_group(const sf::LieGroup& g)
{
    std::cout << "group " << g.id() << "\n  coordinates:";
    for (const auto& c : g.coords())
        std::cout << " " << c;
    std::cout << "\n  domain:";
    if (g.positive().empty())
        std::cout << " all of R^" << g.dim();
    for (int k : g.positive())
        std::cout << " " << g.coords()[static_cast<std::size_t>(k)] << " > 0";
    std::cout << "\n  identity: " << sf::LieGroup::format_point(g.identity()) << "\n  frame:\n";
    for (int i = 0; i < g.dim(); ++i) {
        std::cout << "    E_" << i + 1 << " =";
        bool first = true;
        for (int k = 0; k < g.dim(); ++k) {
            const auto& e = g.frame()(i, k);
            if (e.op() == sf::Op::Constant && e.constant_value() == 0.0)
                continue;
            std::cout << (first ? " " : " + ") << "(" << e.to_string() << ") d/d"
                      << g.coords()[static_cast<std::size_t>(k)];
            first = false;
        }
        std::cout << "\n";
    }
    std::cout << "  nonzero structure constants:";
    bool any = false;
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            for (int k = 0; k < g.dim(); ++k)
                if (g.alpha(i, j, k) != 0.0) {
                    std::cout << " alpha_" << i + 1 << j + 1 << k + 1 << "=" << g.alpha(i, j, k);
                    any = true;
                }
    std::cout << (any ? "" : " none (commutative)") << "\n";
    if (g.has_mul()) {
        std::cout << "  multiplication:";
        for (const auto& e : g.mul())
            std::cout << " [" << e.to_string() << "]";
        std::cout << "\n";
    }
}

void describe_case(const sf::SolitonCase& c)
{
    const auto& s = c.spec();
    std::cout << "case " << s.id;
    if (!s.title.empty())
        std::cout << ": " << s.title;
    std::cout << "\n  f = " << s.f << "\n  X (" << (s.basis == sf::VectorBasis::Frame ? "frame" : "coordinate")
              << " components) = [";
    for (std::size_t i = 0; i < s.x.size(); ++i)
        std::cout << (i ? ", " : "") << s.x[i];
    std::cout << "]\n  lambda = " << s.lambda << "\n";
    if (s.phi)
        std::cout << "  Phi = " << *s.phi << "\n";
    if (s.expected.cls)
        std::cout << "  expected class: " << sf::to_string(*s.expected.cls) << "\n";
    if (s.expected.gradient)
        std::cout << "  expected gradient: " << (*s.expected.gradient ? "yes" : "no") << "\n";
    for (const auto& e : s.expected.sectional)
        std::cout << "  expected K(E_" << e.p + 1 << ", E_" << e.q + 1 << ") = " << e.expr << "\n";
    for (const auto& e : s.expected.ricci)
        std::cout << "  expected Ric(E_" << e.p + 1 << ", E_" << e.q + 1 << ") = " << e.expr << "\n";
}

int cmd_describe(const Options& o)
{
    if (!o.case_file.empty()) {
        const auto c = sf::load_case_file(o.case_file);
        describe_group(c.group());
        describe_case(c);
        return kExitPass;
    }
    if (o.target.empty())
        throw sf::InputError("describe needs a catalog id or --case FILE");
    auto found = sf::lookup(o.target);
    if (auto* entry = std::get_if<const sf::CatalogEntry*>(&found)) {
        describe_group(*(*entry)->group);
        for (const auto& spec : (*entry)->cases)
            describe_case(sf::SolitonCase((*entry)->group, spec));
        return kExitPass;
    }
    const auto& c = std::get<sf::SolitonCase>(found);
    describe_group(c.group());
    describe_case(c);
    return kExitPass;
}

sf::CheckOptions check_options(const Options& o, const sf::SolitonCase& c)
{
    sf::CheckOptions opt;
    if (!o.grid_spec.empty())
        opt.grid = parse_grid(o.grid_spec, c.group());
    if (o.tol_set)
        opt.tol = o.tol;
    if (o.seed_set)
        opt.seed = o.seed;
    opt.timing = o.timing;
    return opt;
}

int cmd_check(const Options& o)
{
    if (o.tol_set && !(o.tol > 0))
        throw sf::InputError("--tol must be positive");
    const auto cases = resolve_cases(o);
    std::vector<sf::CheckResult> results;
    for (const auto& c : cases)
        results.push_back(sf::check_case(c, check_options(o, c)));
    bool pass = true;
    for (const auto& r : results)
        pass = pass && r.pass;
    json out;
    if (results.size() == 1) {
        out = results.front().report;
    } else {
        out["reports"] = json::array();
        json failed = json::array();
        for (const auto& r : results) {
            out["reports"].push_back(r.report);
            if (!r.pass)
                failed.push_back(r.report["case"]);
        }
        out["summary"] = {{"cases", results.size()},
                          {"passed", results.size() - failed.size()},
                          {"failed", failed}};
        out["status"] = pass ? "pass" : "fail";
    }
    emit(out, o);
    if (!o.csv_path.empty()) {
        auto csv = open_csv(o.csv_path);
        csv << "case,check,status,max,tol\n";
        for (const auto& r : results)
            for (const auto& ch : r.report["checks"]) {
                csv << r.report["case"].get<std::string>() << "," << ch["name"].get<std::string>() << ","
                    << ch["status"].get<std::string>() << ",";
                if (ch.contains("max"))
                    csv << fmt(ch["max"].get<double>());
                csv << ",";
                if (ch.contains("tol"))
                    csv << fmt(ch["tol"].get<double>());
                csv << "\n";
            }
    }
    if (!o.json_path.empty())
        for (const auto& r : results)
            std::cout << r.report["case"].get<std::string>() << ": " << r.report["status"].get<std::string>()
                      << "\n";
    return pass ? kExitPass : kExitFail;
}

int cmd_curvature(const Options& o)
{
    const auto cases = resolve_cases(o);
    json out = json::array();
    bool pass = true;
    std::ofstream csv;
    if (!o.csv_path.empty()) {
        csv = open_csv(o.csv_path);
        csv << "case";
    }
    bool header_done = false;
    for (const auto& c : cases) {
        std::vector<sf::Point> pts;
        if (!o.point_spec.empty()) {
            for (const auto& ps : split(o.point_spec, ';')) {
                sf::Point p;
                for (const auto& v : split(ps, ','))
                    p.push_back(to_double(v, "point coordinate"));
                c.group().require_domain(p);
                pts.push_back(p);
            }
        } else {
            const sf::Grid grid = o.grid_spec.empty() ? c.group().default_grid(5) : parse_grid(o.grid_spec, c.group());
            pts = grid.points();
            for (const auto& p : pts)
                c.group().require_domain(p);
        }
        bool ok = true;
        json rows = sf::curvature_table(c, pts, c.tol().oracle, ok);
        pass = pass && ok;
        out.push_back({{"case", c.id()}, {"group", c.group().id()}, {"points", rows}, {"status", ok ? "pass" : "fail"}});
        if (csv.is_open()) {
            const int n = c.group().dim();
            if (!header_done && cases.size() == 1) {
                for (const auto& name : c.group().coords())
                    csv << "," << name;
                for (int p = 1; p <= n; ++p)
                    for (int q = p + 1; q <= n; ++q)
                        csv << ",K" << p << q;
                for (int p = 1; p <= n; ++p)
                    for (int q = p; q <= n; ++q)
                        csv << ",Ric" << p << q;
                csv << ",scalar,oracle_deviation\n";
                header_done = true;
            } else if (!header_done) {
                csv << ",point,values\n";
                header_done = true;
            }
            for (const auto& row : rows) {
                csv << c.id();
                if (cases.size() == 1) {
                    for (double v : row["point"])
                        csv << "," << fmt(v);
                    for (const auto& s : row["sectional"])
                        csv << "," << fmt(s["K"].get<double>());
                    for (int p = 0; p < n; ++p)
                        for (int q = p; q < n; ++q)
                            csv << "," << fmt(row["ricci"][static_cast<std::size_t>(p)][static_cast<std::size_t>(q)].get<double>());
                    csv << "," << fmt(row["scalar"].get<double>()) << "," << fmt(row["oracle_deviation"].get<double>())
                        << "\n";
                } else {
                    csv << ",\"" << row["point"].dump() << "\",\"" << row["sectional"].dump() << "\"\n";
                }
            }
        }
    }
    emit(cases.size() == 1 ? out.front() : json{{"reports", out}, {"status", pass ? "pass" : "fail"}}, o);
    return pass ? kExitPass : kExitFail;
}

int cmd_flow(const Options& o)
{
    const auto cases = resolve_cases(o);
    json out = json::array();
    bool pass = true;
    for (const auto& c : cases) {
        sf::FlowOptions fo;
        fo.t_max = o.t_max;
        fo.steps = o.steps;
        if (!sf::is_constant_on(c.lambda(), c.grid().random_points(16, c.spec().seed))) {
            if (cases.size() == 1)
                throw sf::InputError("case '" + c.id() + "' has a non-constant lambda; the flow check needs a soliton");
            out.push_back({{"case", c.id()}, {"status", "skipped"}, {"reason", "non-constant lambda"}});
            continue;
        }
        try {
            auto r = sf::flow_report(c, fo, o.seed_set ? o.seed : c.spec().seed);
            pass = pass && r.pass;
            out.push_back(r.report);
        } catch (const sf::NumericalError& e) {
            if (cases.size() == 1)
                throw sf::InputError(e.what());
            out.push_back({{"case", c.id()}, {"status", "skipped"}, {"reason", e.what()}});
        }
    }
    emit(cases.size() == 1 ? out.front() : json{{"reports", out}, {"status", pass ? "pass" : "fail"}}, o);
    return pass ? kExitPass : kExitFail;
}

int cmd_invariance(const Options& o)
{
    const auto cases = resolve_cases(o);
    json out = json::array();
    bool pass = true;
    for (const auto& c : cases) {
        auto r = sf::invariance_check(c, o.seed_set ? o.seed : c.spec().seed);
        pass = pass && r.pass;
        out.push_back(r.report);
    }
    emit(cases.size() == 1 ? out.front() : json{{"reports", out}, {"status", pass ? "pass" : "fail"}}, o);
    return pass ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ricci soliton and curvature checks for f-left-invariant metrics on Lie groups"};
    app.require_subcommand(1);
    Options o;

    auto add_target = [&](CLI::App* sub) {
        sub->add_option("target", o.target, "catalog entry, case id or alias");
        sub->add_flag("--all", o.all, "every catalog case");
        sub->add_option("--case", o.case_file, "case file (JSON)");
        sub->add_option("--seed", o.seed, "seed for random samples")->each([&](const std::string&) { o.seed_set = true; });
        sub->add_option("--json", o.json_path, "write the JSON report here instead of stdout");
    };

    app.add_subcommand("list", "list catalog entries and cases");
    auto* describe = app.add_subcommand("describe", "show a catalog entry, a case or a case file");
    describe->add_option("target", o.target, "catalog entry, case id or alias");
    describe->add_option("--case", o.case_file, "case file (JSON)");

    auto* check = app.add_subcommand("check", "verify soliton, gradient and curvature claims");
    add_target(check);
    check->add_option("--grid", o.grid_spec, "N per axis, or lo:hi:n,lo:hi:n,...");
    check->add_option("--tol", o.tol, "residual tolerance")->each([&](const std::string&) { o.tol_set = true; });
    check->add_option("--csv", o.csv_path, "per-check CSV table");
    check->add_flag("--timing", o.timing, "include wall time in the report");

    auto* curvature = app.add_subcommand("curvature", "sectional, Ricci and scalar curvature with oracle deviation");
    add_target(curvature);
    curvature->add_option("--grid", o.grid_spec, "N per axis, or lo:hi:n,lo:hi:n,...");
    curvature->add_option("--point", o.point_spec, "explicit points: x,y;x,y;...");
    curvature->add_option("--csv", o.csv_path, "per-point CSV table");

    auto* flow = app.add_subcommand("flow", "Ricci flow identity along the soliton flow");
    add_target(flow);
    flow->add_option("--t-max", o.t_max, "end of the time window");
    flow->add_option("--steps", o.steps, "RK4 steps");

    auto* invariance = app.add_subcommand("invariance", "f-left invariance and Lie algebra checks");
    add_target(invariance);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInput;
    }

    try {
        if (app.got_subcommand("list"))
            return cmd_list();
        if (app.got_subcommand(describe))
            return cmd_describe(o);
        if (app.got_subcommand(check))
            return cmd_check(o);
        if (app.got_subcommand(curvature))
            return cmd_curvature(o);
        if (app.got_subcommand(flow))
            return cmd_flow(o);
        if (app.got_subcommand(invariance))
            return cmd_invariance(o);
    } catch (const sf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
