#include "catch_amalgamated.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "solitonforge/casefile.hpp"
#include "solitonforge/catalog.hpp"
#include "solitonforge/report.hpp"

using namespace solitonforge;

namespace {

std::string sample(const std::string& name)
{
    return std::string(SAMPLES_DIR) + "/" + name;
}

json cigar_json()
{
    return case_to_json(find_case("r2.cigar"));
}

std::string error_of(const json& j)
{
    try {
        case_from_json(j);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

bool mentions(const std::string& msg, const std::string& what)
{
    return msg.find(what) != std::string::npos;
}

} // namespace

TEST_CASE("catalog cases round-trip through text")
{
    for (const auto& c : catalog_cases()) {
        const json j = case_to_json(c);
        const SolitonCase back = parse_case_text(j.dump(2));
        INFO(c.id());
        CHECK(case_to_json(back) == j);
        CHECK(back.id() == c.id());
        CHECK(back.spec().basis == c.spec().basis);
    }
}

TEST_CASE("minimal case file takes defaults")
{
    const json j = {{"v", 1}, {"id", "mini"}, {"group", "R^2"}, {"f", "1"}, {"X", {"x", "y"}}, {"lambda", "1"}};
    const SolitonCase c = case_from_json(j);
    CHECK(c.spec().basis == VectorBasis::Frame);
    CHECK(c.spec().tol.residual == 1e-9);
    CHECK(c.spec().tol.oracle == 1e-7);
    CHECK(c.spec().tol.fd == 1e-4);
    CHECK(c.spec().seed == 1);
    CHECK_FALSE(c.spec().phi.has_value());
    CHECK_FALSE(c.spec().grid.has_value());
    CHECK_FALSE(c.spec().expected.cls.has_value());
    CHECK(case_from_json(case_to_json(c)).spec().x == c.spec().x);
}

TEST_CASE("inline groups round-trip")
{
    const SolitonCase c = load_case_file(sample("custom-group.json"));
    CHECK(c.group().id() == "affine group in (u, v)");
    CHECK(c.group().coords() == std::vector<std::string>{"u", "v"});
    CHECK(c.group().positive() == std::vector<int>{1});
    CHECK(c.group().alpha(0, 1, 1) == 1.0);
    CHECK(c.group().has_mul());
    CHECK(c.spec().basis == VectorBasis::Coords);

    const json j = case_to_json(c);
    CHECK(j["group"].is_object());
    CHECK(case_to_json(case_from_json(j)) == j);

    // the inline copy of a standard group behaves like the standard one
    const Point p{0.4, 1.3};
    const auto ref = find_case("rxr+.f=y.gradient");
    CHECK(std::abs(sectional(c.metric(), 0, 1, p) - sectional(ref.metric(), 0, 1, p)) < 1e-12);
    CHECK(max_abs(soliton_residual(c, p)) < 1e-12);
    const RealMatrix ic = lie_derivative_metric(c.metric(), c.x(), c.spec().basis, p);
    const RealMatrix ir = lie_derivative_metric(ref.metric(), ref.x(), ref.spec().basis, p);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(ic(i, k) - ir(i, k)) < 1e-12);
}

TEST_CASE("sample files load and check")
{
    const auto cigar = load_case_file(sample("cigar.json"));
    CHECK(case_to_json(cigar) == cigar_json());
    CHECK(check_case(cigar, {}).pass);
    CHECK(check_case(load_case_file(sample("custom-group.json")), {}).pass);
    const auto bad = check_case(load_case_file(sample("perturbed-lambda.json")), {});
    CHECK_FALSE(bad.pass);
}

TEST_CASE("unknown keys are rejected at every level")
{
    json j = cigar_json();
    j["colour"] = "red";
    CHECK(mentions(error_of(j), "unknown key 'colour'"));

    j = cigar_json();
    j["expected"]["shape"] = 1;
    CHECK(mentions(error_of(j), "unknown key 'shape' in expected"));

    j = cigar_json();
    j["tolerances"]["abs"] = 1e-3;
    CHECK(mentions(error_of(j), "unknown key 'abs' in tolerances"));

    j = case_to_json(load_case_file(sample("custom-group.json")));
    j["group"]["center"] = json::array();
    CHECK(mentions(error_of(j), "unknown key 'center' in group"));
}

TEST_CASE("missing keys and bad versions")
{
    for (const char* key : {"v", "id", "group", "f", "X", "lambda"}) {
        json j = cigar_json();
        j.erase(key);
        CHECK(mentions(error_of(j), "missing key '" + std::string(key) + "'"));
    }
    json j = cigar_json();
    j["v"] = 2;
    CHECK(mentions(error_of(j), "version 2"));
    j["v"] = "1";
    CHECK(mentions(error_of(j), "integer"));
    CHECK_THROWS_AS(case_from_json(json::array()), InputError);
}

TEST_CASE("bad expressions name their field")
{
    const std::vector<std::pair<std::string, std::string>> fields{
        {"f", "f"}, {"lambda", "lambda"}, {"phi", "phi"}};
    for (const auto& [key, label] : fields) {
        json j = cigar_json();
        j[key] = "1 + q";
        const std::string msg = error_of(j);
        INFO(msg);
        CHECK(msg.rfind(label + ":", 0) == 0);
        CHECK(mentions(msg, "q"));
    }
    json j = cigar_json();
    j["X"][1] = "sin(";
    CHECK(error_of(j).rfind("X[1]:", 0) == 0);
    j = cigar_json();
    j["expected"]["sectional"][0]["expr"] = "foo(x)";
    CHECK(error_of(j).rfind("expected.sectional", 0) == 0);
    j = cigar_json();
    j["expected"]["class"] = "wobbly";
    CHECK(error_of(j).rfind("expected.class", 0) == 0);
}

TEST_CASE("semantic errors")
{
    json j = cigar_json();
    j["X"] = {"1"};
    CHECK_FALSE(error_of(j).empty());
    j = cigar_json();
    j["f"] = "2";
    CHECK(mentions(error_of(j), "r2.cigar"));
    j = cigar_json();
    j["group"] = "SU(2)";
    CHECK_FALSE(error_of(j).empty());
    j = cigar_json();
    j["X_basis"] = "polar";
    CHECK(mentions(error_of(j), "X_basis"));
    j = cigar_json();
    j["tolerances"]["fd"] = 0;
    CHECK(mentions(error_of(j), "positive"));
    j = cigar_json();
    j["seed"] = -3;
    CHECK(mentions(error_of(j), "seed"));
    j = cigar_json();
    j["expected"]["gradient"] = "yes";
    CHECK(mentions(error_of(j), "gradient"));
    j = cigar_json();
    j["expected"]["sectional"][0]["q"] = 3;
    CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("grid validation")
{
    json j = cigar_json();
    j["grid"] = {{"ranges", {{-1, 1}, {-1, 1}}}, {"counts", {4, 4}}};
    CHECK(case_from_json(j).grid().points().size() == 16);

    j["grid"]["counts"] = {4};
    CHECK(error_of(j).rfind("grid", 0) == 0);
    j["grid"] = {{"ranges", {{1, -1}, {-1, 1}}}, {"counts", {4, 4}}};
    CHECK(error_of(j).rfind("grid", 0) == 0);
    j["grid"] = {{"ranges", {{-1, 1}, {-1, 1}}}, {"counts", {0, 4}}};
    CHECK(error_of(j).rfind("grid", 0) == 0);
    j["grid"] = {{"ranges", {{-1, 1, 2}, {-1, 1}}}, {"counts", {4, 4}}};
    CHECK(error_of(j).rfind("grid", 0) == 0);

    json h = case_to_json(find_case("rxr+.f=y.gradient"));
    h["grid"] = {{"ranges", {{-1, 1}, {-1, 1}}}, {"counts", {3, 3}}};
    CHECK_FALSE(error_of(h).empty());
}

TEST_CASE("invalid JSON reports the byte offset")
{
    try {
        parse_case_text("{\"v\": 1,, }");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(mentions(e.what(), "invalid JSON at byte 9"));
    }
    CHECK_THROWS_AS(parse_case_text(""), InputError);
    CHECK_THROWS_AS(load_case_file(sample("does-not-exist.json")), InputError);
}

TEST_CASE("save and load a case file")
{
    const auto path = (std::filesystem::temp_directory_path() / "solitonforge-casefile-test.json").string();
    const auto c = find_case("rxr+xr.f=1.gaussian");
    save_case_file(c, path);
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == case_to_json(c).dump(2) + "\n");
    CHECK(case_to_json(load_case_file(path)) == case_to_json(c));
    std::remove(path.c_str());
}
