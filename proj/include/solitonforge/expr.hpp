#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "solitonforge/error.hpp"
#include "solitonforge/jet.hpp"

namespace solitonforge {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Sin, Cos };

/// Immutable expression tree over a fixed, ordered list of coordinates.
/// Copies share nodes; trees are acyclic by construction.
class Expr {
    struct Node {
        Op op = Op::Constant;
        double value = 0.0;  // Constant
        int var = -1;        // Variable
        std::string name;    // Variable
        std::shared_ptr<const Node> lhs, rhs;
        int max_var = -1;
        // Pow only: exponent subtree is variable-free, with this value.
        bool constant_exponent = false;
        double exponent = 0.0;
    };

public:
    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v)
    {
        auto n = std::make_shared<Node>();
        n->op = Op::Constant;
        n->value = v;
        return Expr(std::move(n));
    }

    static Expr variable(int index, std::string name)
    {
        auto n = std::make_shared<Node>();
        n->op = Op::Variable;
        n->var = index;
        n->name = std::move(name);
        n->max_var = index;
        return Expr(std::move(n));
    }

    static Expr unary(Op op, const Expr& arg)
    {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = arg.root_;
        n->max_var = arg.root_->max_var;
        return Expr(std::move(n));
    }

    static Expr binary(Op op, const Expr& lhs, const Expr& rhs)
    {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = lhs.root_;
        n->rhs = rhs.root_;
        n->max_var = std::max(lhs.root_->max_var, rhs.root_->max_var);
        if (op == Op::Pow && rhs.root_->max_var < 0) {
            // An exponent like 1/0 stays on the general path and fails at evaluation.
            try {
                n->exponent = eval_node<double>(*rhs.root_, std::span<const double>{},
                                                [](double v) { return v; });
                n->constant_exponent = true;
            } catch (const DomainError&) {
                n->constant_exponent = false;
            }
        }
        return Expr(std::move(n));
    }

    Op op() const noexcept { return root_->op; }
    double constant_value() const noexcept { return root_->value; }
    int variable_index() const noexcept { return root_->var; }
    const std::string& variable_name() const noexcept { return root_->name; }
    Expr lhs() const { return Expr(root_->lhs); }
    Expr rhs() const { return Expr(root_->rhs); }

    /// Number of coordinates the tree needs (highest variable index + 1).
    int arity() const noexcept { return root_->max_var + 1; }
    bool has_variables() const noexcept { return root_->max_var >= 0; }

    std::size_t node_count() const noexcept { return count(*root_, false); }
    std::size_t interior_count() const noexcept { return count(*root_, true); }

    friend bool operator==(const Expr& a, const Expr& b) noexcept { return same(*a.root_, *b.root_); }

    /// Canonical text that parses back to a structurally identical tree.
    std::string to_string() const
    {
        std::string out;
        print(*root_, out);
        return out;
    }

    template <class T, class Lift>
    T evaluate(std::span<const T> vars, const Lift& lift) const
    {
        if (static_cast<int>(vars.size()) < arity())
            throw InputError("expression '" + to_string() + "' needs " + std::to_string(arity()) +
                             " coordinates, got " + std::to_string(vars.size()));
        return eval_node<T>(*root_, vars, lift);
    }

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    static bool is_unary(Op op) noexcept { return op >= Op::Neg; }
    static bool is_binary(Op op) noexcept { return op >= Op::Add && op <= Op::Pow; }

    static std::size_t count(const Node& n, bool interior_only) noexcept
    {
        if (n.op == Op::Constant || n.op == Op::Variable)
            return interior_only ? 0 : 1;
        std::size_t c = 1 + count(*n.lhs, interior_only);
        if (n.rhs)
            c += count(*n.rhs, interior_only);
        return c;
    }

    static bool same(const Node& a, const Node& b) noexcept
    {
        if (a.op != b.op)
            return false;
        switch (a.op) {
        case Op::Constant:
            return a.value == b.value;
        case Op::Variable:
            return a.var == b.var && a.name == b.name;
        default:
            break;
        }
        if (!same(*a.lhs, *b.lhs))
            return false;
        return !a.rhs || same(*a.rhs, *b.rhs);
    }

    static int precedence(Op op) noexcept
    {
        switch (op) {
        case Op::Add:
        case Op::Sub:
            return 1;
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Neg:
            return 3;
        case Op::Pow:
            return 4;
        default:
            return 5;
        }
    }

    static const char* function_name(Op op) noexcept
    {
        switch (op) {
        case Op::Exp:
            return "exp";
        case Op::Log:
            return "ln";
        case Op::Sqrt:
            return "sqrt";
        case Op::Sin:
            return "sin";
        case Op::Cos:
            return "cos";
        default:
            return "";
        }
    }

    static void print_number(double v, std::string& out)
    {
        std::array<char, 32> buf{};
        auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out.append(buf.data(), res.ptr);
    }

    static void print_child(const Node& child, bool parens, std::string& out)
    {
        if (parens)
            out += '(';
        print(child, out);
        if (parens)
            out += ')';
    }

    static void print(const Node& n, std::string& out)
    {
        switch (n.op) {
        case Op::Constant:
            if (n.value < 0.0 || std::signbit(n.value)) {
                out += "(-";
                print_number(-n.value, out);
                out += ')';
            } else {
                print_number(n.value, out);
            }
            return;
        case Op::Variable:
            out += n.name;
            return;
        case Op::Neg:
            out += '-';
            print_child(*n.lhs, precedence(n.lhs->op) < 3, out);
            return;
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Sin:
        case Op::Cos:
            out += function_name(n.op);
            print_child(*n.lhs, true, out);
            return;
        case Op::Pow:
            print_child(*n.lhs, precedence(n.lhs->op) <= 4, out);
            out += '^';
            print_child(*n.rhs, precedence(n.rhs->op) < 3, out);
            return;
        default:
            break;
        }
        const int p = precedence(n.op);
        print_child(*n.lhs, precedence(n.lhs->op) < p, out);
        switch (n.op) {
        case Op::Add:
            out += " + ";
            break;
        case Op::Sub:
            out += " - ";
            break;
        case Op::Mul:
            out += '*';
            break;
        default:
            out += '/';
            break;
        }
        print_child(*n.rhs, precedence(n.rhs->op) <= p, out);
    }

    [[noreturn]] static void domain_fail(const Node& n, const std::string& what)
    {
        std::string sub;
        print(n, sub);
        throw DomainError(what + " in '" + sub + "'");
    }

    template <class T, class Lift>
    static T eval_node(const Node& n, std::span<const T> vars, const Lift& lift)
    {
        using std::cos;
        using std::exp;
        using std::log;
        using std::pow;
        using std::sin;
        using std::sqrt;
        switch (n.op) {
        case Op::Constant:
            return lift(n.value);
        case Op::Variable:
            return vars[static_cast<std::size_t>(n.var)];
        case Op::Neg:
            return -eval_node<T>(*n.lhs, vars, lift);
        case Op::Exp:
            return exp(eval_node<T>(*n.lhs, vars, lift));
        case Op::Log: {
            T a = eval_node<T>(*n.lhs, vars, lift);
            if (!(value_of(a) > 0.0))
                domain_fail(n, "ln of non-positive value");
            return log(a);
        }
        case Op::Sqrt: {
            T a = eval_node<T>(*n.lhs, vars, lift);
            if (!(value_of(a) > 0.0))
                domain_fail(n, "sqrt of non-positive value");
            return sqrt(a);
        }
        case Op::Sin:
            return sin(eval_node<T>(*n.lhs, vars, lift));
        case Op::Cos:
            return cos(eval_node<T>(*n.lhs, vars, lift));
        default:
            break;
        }
        T a = eval_node<T>(*n.lhs, vars, lift);
        if (n.op == Op::Pow) {
            const double base = value_of(a);
            if (n.constant_exponent) {
                const double c = n.exponent;
                const bool integral = std::floor(c) == c;
                if (!integral && !(base > 0.0))
                    domain_fail(n, "non-integer power of non-positive value");
                if (base == 0.0 && c < 0.0)
                    domain_fail(n, "negative power of zero");
                return pow(a, c);
            }
            if (!(base > 0.0))
                domain_fail(n, "variable power of non-positive value");
            T b = eval_node<T>(*n.rhs, vars, lift);
            return exp(b * log(a));
        }
        T b = eval_node<T>(*n.rhs, vars, lift);
        switch (n.op) {
        case Op::Add:
            return a + b;
        case Op::Sub:
            return a - b;
        case Op::Mul:
            return a * b;
        default:
            if (value_of(b) == 0.0)
                domain_fail(n, "division by zero");
            return a / b;
        }
    }

    static double value_of(double v) noexcept { return v; }
    static double value_of(const Jet& j) noexcept { return j.value(); }

    std::shared_ptr<const Node> root_;

    friend class ExprParser;
};

/// Recursive-descent parser for the case-file expression grammar
/// (see docs/grammar.md).
class ExprParser {
public:
    static constexpr int kMaxDepth = 200;

    ExprParser(std::string_view text, std::span<const std::string> coords)
        : text_(text), coords_(coords) {}

    Expr parse()
    {
        skip_space();
        if (pos_ >= text_.size())
            throw ParseError("empty expression", pos_);
        Expr e = parse_sum();
        skip_space();
        if (pos_ != text_.size())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    struct DepthGuard {
        explicit DepthGuard(ExprParser& p) : parser(p)
        {
            if (++parser.depth_ > kMaxDepth)
                throw ParseError("expression nested too deeply", parser.pos_);
        }
        ~DepthGuard() { --parser.depth_; }
        ExprParser& parser;
    };

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum()
    {
        DepthGuard guard(*this);
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(Op::Add, lhs, parse_product());
            else if (accept('-'))
                lhs = Expr::binary(Op::Sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    Expr parse_product()
    {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(Op::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = Expr::binary(Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expr parse_unary()
    {
        DepthGuard guard(*this);
        if (accept('-'))
            return Expr::unary(Op::Neg, parse_unary());
        return parse_power();
    }

    Expr parse_power()
    {
        Expr base = parse_primary();
        if (accept('^'))
            return Expr::binary(Op::Pow, base, parse_unary());
        return base;
    }

    Expr parse_primary()
    {
        skip_space();
        if (pos_ >= text_.size())
            throw ParseError("expected expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_sum();
            if (!accept(')'))
                throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0)
            throw ParseError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (digits() == 0)
                throw ParseError("malformed exponent", start);
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(v))
            throw ParseError("number out of range", start);
        return Expr::constant(v);
    }

    Expr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        skip_space();
        const bool call = pos_ < text_.size() && text_[pos_] == '(';
        if (call) {
            Op op;
            if (name == "exp")
                op = Op::Exp;
            else if (name == "ln")
                op = Op::Log;
            else if (name == "sqrt")
                op = Op::Sqrt;
            else if (name == "sin")
                op = Op::Sin;
            else if (name == "cos")
                op = Op::Cos;
            else
                throw ParseError("unknown function '" + std::string(name) + "'", start);
            ++pos_;
            Expr arg = parse_sum();
            if (!accept(')'))
                throw ParseError("expected ')'", pos_);
            return Expr::unary(op, arg);
        }
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (coords_[i] == name)
                return Expr::variable(static_cast<int>(i), std::string(name));
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::span<const std::string> coords_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

inline Expr parse(std::string_view text, std::span<const std::string> coords)
{
    return ExprParser(text, coords).parse();
}

inline Expr parse(std::string_view text, std::initializer_list<std::string> coords)
{
    std::vector<std::string> names(coords);
    return parse(text, std::span<const std::string>(names));
}

inline double eval(const Expr& e, std::span<const double> point)
{
    return e.evaluate<double>(point, [](double v) { return v; });
}

/// Evaluates with caller-supplied jets for each coordinate (all of one
/// dimension and order).
inline Jet eval_jet(const Expr& e, std::span<const Jet> vars)
{
    if (vars.empty())
        throw InputError("eval_jet needs at least one variable jet");
    const int dim = vars.front().dim();
    const int order = vars.front().order();
    return e.evaluate<Jet>(vars, [dim, order](double v) { return Jet::constant(v, dim, order); });
}

/// Evaluates with every coordinate seeded as an independent variable.
inline Jet eval_jet(const Expr& e, std::span<const double> point, int order)
{
    std::vector<Jet> vars;
    vars.reserve(point.size());
    for (std::size_t k = 0; k < point.size(); ++k)
        vars.push_back(Jet::variable(point, static_cast<int>(k), order));
    if (vars.empty())
        return Jet::constant(eval(e, point), 1, order);
    return eval_jet(e, std::span<const Jet>(vars));
}

} // namespace solitonforge
