#include "catch_amalgamated.hpp"

#include <set>

#include "solitonforge/casefile.hpp"
#include "solitonforge/catalog.hpp"

using namespace solitonforge;
using Catch::Approx;

TEST_CASE("catalog shape")
{
    const auto& entries = catalog_entries();
    REQUIRE(entries.size() == 6);
    const std::vector<Point> identities{{0, 0}, {0, 1}, {0, 0, 1}, {0, 1, 0}, {0, 1, 0, 0}, {0, 1, 0, 1}};
    std::size_t total = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(entries[i].group->identity() == identities[i]);
        total += entries[i].cases.size();
    }
    CHECK(total == 22);
    CHECK(find_entry("R rtimes R^+").cases.size() == 7);

    std::set<std::string> r2;
    for (const auto& c : find_entry("R^2").cases)
        r2.insert(c.f);
    CHECK(r2.count("1/(1+x^2+y^2)") == 1);
    CHECK(r2.count("exp(x+y)") == 1);
    CHECK(r2.count("exp(x^2+y^2)") == 1);

    int almost = 0;
    for (const auto& c : catalog_cases())
        almost += c.spec().expected.cls == SolitonClass::Almost;
    CHECK(almost == 2);
}

TEST_CASE("case ids are unique and every case carries its expectations")
{
    std::set<std::string> ids;
    for (const auto& c : catalog_cases()) {
        CHECK(ids.insert(c.id()).second);
        CHECK(c.spec().expected.cls.has_value());
        CHECK(c.spec().expected.gradient.has_value());
        CHECK_FALSE(c.spec().expected.sectional.empty());
        CHECK_FALSE(c.spec().title.empty());
    }
}

TEST_CASE("lookup")
{
    const auto cigar = lookup("cigar");
    REQUIRE(std::holds_alternative<SolitonCase>(cigar));
    CHECK(std::get<SolitonCase>(cigar).id() == "r2.cigar");
    CHECK(std::get<SolitonCase>(cigar).spec().f == "1/(1+x^2+y^2)");

    const auto four = lookup("R rtimes R^+ times R rtimes R^+");
    REQUIRE(std::holds_alternative<const CatalogEntry*>(four));
    CHECK(std::get<const CatalogEntry*>(four)->group->dim() == 4);

    const auto by_slug = lookup("rxr+xr");
    REQUIRE(std::holds_alternative<const CatalogEntry*>(by_slug));
    CHECK(std::get<const CatalogEntry*>(by_slug)->id == "R rtimes R^+ times R");

    CHECK(std::get<SolitonCase>(lookup("rxr+.f=y2.dilation")).lambda().to_string() == "1");

    try {
        lookup("nope");
        FAIL("expected a not-found error");
    } catch (const NotFoundError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("nope") != std::string::npos);
        for (const auto& entry : catalog_entries())
            CHECK(msg.find(entry.id) != std::string::npos);
    }
    CHECK_THROWS_AS(lookup("Cigar"), NotFoundError);
}

TEST_CASE("every catalog group passes the structural checks")
{
    std::uint64_t seed = 1;
    for (const auto& e : catalog_entries()) {
        const auto& g = *e.group;
        INFO(e.id);
        CHECK(check_antisymmetry(g.alpha()));
        CHECK(check_jacobi(g.alpha()));
        CHECK(commutator_deviation(g, g.default_grid().random_points(100, seed++)) < 1e-10);
        REQUIRE(g.has_mul());
        CHECK(frame_left_invariance_residual(g, random_pairs(g, 50, seed++)) < 1e-10);
        CHECK(identify_standard_group(g).has_value());
    }
}

TEST_CASE("structure constants of the standard groups")
{
    const auto& rxr = find_entry("R rtimes R^+").group;
    CHECK(rxr->alpha(0, 1, 1) == 1.0);
    CHECK(rxr->alpha(1, 0, 1) == -1.0);
    const auto& r2xr = find_entry("R^2 rtimes R^+").group;
    CHECK(r2xr->alpha(0, 1, 1) == 1.0);
    CHECK(r2xr->alpha(0, 2, 2) == 1.0);
    const auto& four = find_entry("R rtimes R^+ times R rtimes R^+").group;
    CHECK(four->alpha(0, 1, 1) == 1.0);
    CHECK(four->alpha(1, 0, 1) == -1.0);
    CHECK(four->alpha(2, 3, 3) == 1.0);
    CHECK(four->alpha(3, 2, 3) == -1.0);
    int nonzero = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                nonzero += four->alpha(i, j, k) != 0.0;
    CHECK(nonzero == 4);
    CHECK(find_entry("R^2").group->is_commutative());
}

TEST_CASE("expected curvatures hold on the case grids")
{
    for (const auto& c : catalog_cases()) {
        const auto pts = c.grid().random_points(60, c.spec().seed);
        const auto& coords = c.group().coords();
        for (const auto& p : pts) {
            const RealMatrix ric = ricci_frame(c.metric(), p);
            for (const auto& k : c.spec().expected.sectional) {
                const double want = eval(parse(k.expr, coords), p);
                INFO(c.id() << " K(" << k.p + 1 << "," << k.q + 1 << ") at " << LieGroup::format_point(p));
                CHECK(std::abs(sectional(c.metric(), k.p, k.q, p) - want) < 1e-9);
            }
            for (const auto& r : c.spec().expected.ricci) {
                const double want = eval(parse(r.expr, coords), p);
                INFO(c.id() << " Ric(" << r.p + 1 << "," << r.q + 1 << ")");
                CHECK(std::abs(ric(r.p, r.q) - want) < 1e-9);
            }
        }
    }
}

TEST_CASE("flat cases list every plane")
{
    for (const auto& id : {"r2.exp.shrinking", "rxr+.f=y2.dilation", "r2xr+.f=z2.xyz", "rxr+xr.f=y2.dilation"}) {
        const auto c = find_case(id);
        const int n = c.group().dim();
        CHECK(static_cast<int>(c.spec().expected.sectional.size()) == n * (n - 1) / 2);
        for (const auto& k : c.spec().expected.sectional)
            CHECK(k.expr == "0");
    }
}

TEST_CASE("every case round-trips through the case-file serializer")
{
    for (const auto& c : catalog_cases()) {
        const json j = case_to_json(c);
        const SolitonCase back = case_from_json(j);
        INFO(c.id());
        CHECK(case_to_json(back) == j);
        CHECK(back.spec().f == c.spec().f);
        CHECK(back.spec().x == c.spec().x);
        CHECK(back.spec().lambda == c.spec().lambda);
        CHECK(back.spec().phi == c.spec().phi);
        CHECK(back.spec().expected.cls == c.spec().expected.cls);
        CHECK(back.spec().expected.gradient == c.spec().expected.gradient);
        CHECK(back.spec().expected.sectional.size() == c.spec().expected.sectional.size());
        CHECK(back.spec().tol == c.spec().tol);
        CHECK(&back.group() == &c.group());
    }
}
