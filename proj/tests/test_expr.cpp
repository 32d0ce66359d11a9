#include "catch_amalgamated.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "solitonforge/expr.hpp"
#include "support.hpp"

using namespace solitonforge;
using Catch::Approx;

namespace {

const std::vector<std::string> kXY{"x", "y"};

double ev(const std::string& text, const Point& p, const std::vector<std::string>& coords = kXY)
{
    return eval(parse(text, coords), p);
}

} // namespace

TEST_CASE("reciprocal metric factor parses to the expected tree")
{
    const Expr e = parse("1/(1+x^2+y^2)", kXY);
    // 1 / ((1 + x^2) + y^2): div, add, add, pow, pow over six leaves
    CHECK(e.interior_count() == 5);
    CHECK(e.node_count() == 11);
    CHECK(e.op() == Op::Div);
    CHECK(e.lhs().op() == Op::Constant);
    CHECK(e.rhs().op() == Op::Add);
    CHECK(e.rhs().lhs().op() == Op::Add);
    CHECK(e.rhs().rhs().op() == Op::Pow);
}

TEST_CASE("exp(x+y) is a unary node over a sum")
{
    const Expr e = parse("exp(x+y)", kXY);
    CHECK(e.op() == Op::Exp);
    const Expr s = e.lhs();
    CHECK(s.op() == Op::Add);
    CHECK(s.lhs().op() == Op::Variable);
    CHECK(s.lhs().variable_name() == "x");
    CHECK(s.rhs().variable_name() == "y");
    CHECK(eval(e, Point{0.0, 0.0}) == 1.0);
}

TEST_CASE("syntax errors carry the byte offset")
{
    const std::vector<std::string> z{"z"};
    try {
        parse("z*(", z);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 3);
    }
    auto offset_of = [](const std::string& text) -> long {
        try {
            parse(text, kXY);
        } catch (const ParseError& err) {
            return static_cast<long>(err.offset());
        }
        return -1;
    };
    CHECK(offset_of("") == 0);
    CHECK(offset_of("   ") == 3);
    CHECK(offset_of("x+") == 2);
    CHECK(offset_of("(x+y") == 4);
    CHECK(offset_of("x y") == 2);
    CHECK(offset_of("x+q") == 2);
    CHECK(offset_of("2*tan(x)") == 2);
    CHECK(offset_of("x+#") == 2);
    CHECK(offset_of("1e") == 0);
    CHECK(offset_of("1e999") == 0);
    CHECK(offset_of("exp x") == 0);
}

TEST_CASE("unknown identifiers and functions are reported by name")
{
    CHECK_THROWS_WITH(parse("w + 1", kXY), Catch::Matchers::ContainsSubstring("unknown identifier 'w'"));
    CHECK_THROWS_WITH(parse("log(x)", kXY), Catch::Matchers::ContainsSubstring("unknown function 'log'"));
}

TEST_CASE("precedence and associativity")
{
    const Point p{2.0, 3.0};
    CHECK(ev("-x^2", p) == -4.0);
    CHECK(ev("(-x)^2", p) == 4.0);
    CHECK(ev("2^3^2", p) == 512.0);
    CHECK(ev("x-y-1", p) == -2.0);
    CHECK(ev("12/x/y", p) == 2.0);
    CHECK(ev("1+x*y^2", p) == 19.0);
    CHECK(ev("x^-1", p) == 0.5);
    CHECK(ev("--x", p) == 2.0);
    CHECK(ev("2*-y", p) == -6.0);
    CHECK(ev("1.5e1 + .5", p) == 15.5);
    CHECK(ev(" sqrt( y * 3 ) ", p) == 3.0);
}

TEST_CASE("evaluation of elementary functions")
{
    CHECK(ev("y^2", Point{0.0, 3.0}) == 9.0);
    CHECK(ev("ln(x)", Point{1.0, 0.0}) == 0.0);
    CHECK(ev("sin(x)+cos(y)", Point{0.0, 0.0}) == 1.0);
    CHECK(ev("x^y", Point{2.0, 0.5}) == Approx(std::sqrt(2.0)));
    CHECK(ev("exp(x+y)", Point{0.0, 0.0}) == 1.0);
}

TEST_CASE("domain errors name the offending subexpression")
{
    CHECK_THROWS_AS(ev("ln(x)", Point{0.0, 1.0}), DomainError);
    CHECK_THROWS_WITH(ev("1 + ln(x - y)", Point{0.0, 1.0}), Catch::Matchers::ContainsSubstring("ln(x - y)"));
    CHECK_THROWS_WITH(ev("y/(x*0)", Point{1.0, 1.0}), Catch::Matchers::ContainsSubstring("division by zero"));
    CHECK_THROWS_AS(ev("sqrt(x)", Point{-1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(ev("x^0.5", Point{-1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(ev("x^y", Point{-1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(ev("x^(1/0)", Point{2.0, 1.0}), DomainError);
    CHECK(ev("x^3", Point{-2.0, 1.0}) == -8.0);
    CHECK_THROWS_AS(eval_jet(parse("ln(x)", kXY), Point{-1.0, 1.0}, 2), DomainError);
}

TEST_CASE("jet evaluation of the reciprocal factor at the origin")
{
    const Jet j = eval_jet(parse("1/(1+x^2+y^2)", kXY), Point{0.0, 0.0}, 2);
    CHECK(j.value() == 1.0);
    CHECK(j.grad(0) == 0.0);
    CHECK(j.grad(1) == 0.0);
    CHECK(j.hess(0, 0) == Approx(-2.0));
    CHECK(j.hess(1, 1) == Approx(-2.0));
    CHECK(j.hess(0, 1) == Approx(0.0).margin(1e-15));
}

TEST_CASE("catalog expressions round-trip through the printer")
{
    for (const auto& ce : testsupport::catalog_expressions()) {
        const Expr e = parse(ce.text, ce.group->coords());
        const std::string printed = e.to_string();
        INFO(ce.text << " printed as " << printed);
        const Expr back = parse(printed, ce.group->coords());
        CHECK(back == e);
        CHECK(back.to_string() == printed);
    }
}

TEST_CASE("jet values equal plain evaluation exactly")
{
    std::uint64_t seed = 3;
    for (const auto& ce : testsupport::catalog_expressions()) {
        const Expr e = parse(ce.text, ce.group->coords());
        for (const auto& p : ce.group->default_grid().random_points(20, seed++))
            for (int order = 1; order <= 3; ++order)
                CHECK(eval_jet(e, p, order).value() == eval(e, p));
    }
}

TEST_CASE("catalog expressions: order-1 gradients agree with finite differences")
{
    std::uint64_t seed = 101;
    for (const auto& ce : testsupport::catalog_expressions()) {
        const Expr e = parse(ce.text, ce.group->coords());
        auto fn = [&](const Point& q) { return eval(e, q); };
        for (const auto& p : testsupport::inner_box(*ce.group).random_points(100, seed++)) {
            const Jet j = eval_jet(e, p, 1);
            const auto g = testsupport::fd_grad(fn, p, 1e-5);
            for (int i = 0; i < ce.group->dim(); ++i) {
                INFO(ce.text);
                CHECK(testsupport::close_rel(j.grad(i), g[static_cast<std::size_t>(i)], 1e-6));
            }
        }
    }
}

TEST_CASE("random printed trees round-trip")
{
    SplitMix64 rng(2024);
    const std::vector<std::string> xyz{"x", "y", "z"};
    std::function<Expr(int)> gen = [&](int depth) -> Expr {
        const auto pick = rng.next() % (depth > 4 ? 2 : 9);
        switch (pick) {
        case 0:
            return Expr::constant(std::round(rng.uniform(0, 100)) / 8);
        case 1: {
            const int k = static_cast<int>(rng.next() % 3);
            return Expr::variable(k, xyz[static_cast<std::size_t>(k)]);
        }
        case 2:
            return Expr::unary(Op::Neg, gen(depth + 1));
        case 3: {
            static const Op fns[] = {Op::Exp, Op::Log, Op::Sqrt, Op::Sin, Op::Cos};
            return Expr::unary(fns[rng.next() % 5], gen(depth + 1));
        }
        default: {
            static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
            return Expr::binary(ops[rng.next() % 5], gen(depth + 1), gen(depth + 1));
        }
        }
    };
    for (int trial = 0; trial < 2000; ++trial) {
        const Expr e = gen(0);
        const std::string text = e.to_string();
        INFO(text);
        const Expr back = parse(text, xyz);
        CHECK(back == e);
    }
}

TEST_CASE("parsing is total on random input")
{
    SplitMix64 rng(99);
    const std::string alphabet = "xyz0123456789.+-*/^() eE\tlnexpsqrtsincos_#@";
    const std::vector<std::string> xyz{"x", "y", "z"};
    int parsed = 0, rejected = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t len = 1 + rng.next() % 24;
        std::string s;
        for (std::size_t i = 0; i < len; ++i) {
            if (trial % 2 == 0)
                s.push_back(static_cast<char>(rng.next() & 0xff));
            else
                s.push_back(alphabet[rng.next() % alphabet.size()]);
        }
        try {
            const Expr e = parse(s, xyz);
            ++parsed;
            CHECK(e.node_count() >= 1);
        } catch (const ParseError& err) {
            ++rejected;
            CHECK(err.offset() <= s.size());
        }
    }
    CHECK(parsed + rejected == 10000);
}

TEST_CASE("deep nesting is rejected instead of overflowing the stack")
{
    std::string deep(5000, '(');
    deep += "x";
    deep += std::string(5000, ')');
    CHECK_THROWS_AS(parse(deep, kXY), ParseError);
    std::string negs(5000, '-');
    negs += "x";
    CHECK_THROWS_AS(parse(negs, kXY), ParseError);
    std::string pows = "x";
    for (int i = 0; i < 5000; ++i)
        pows += "^x";
    CHECK_THROWS_AS(parse(pows, kXY), ParseError);
}
