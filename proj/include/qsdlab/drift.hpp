#pragma once

// Drift specifications q(x): the single model input.
//
// Builtin shorthands "const:a" and "linear:a" cover the two closed-form
// families; anything else goes through a small infix expression grammar over
// {x, literals, + - * / ^, exp, log, sqrt}.

#include "qsdlab/tolerances.hpp"

#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsdlab {

struct DriftParseError : std::runtime_error {
    std::size_t position;
    DriftParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error("drift parse error at position " + std::to_string(pos) + ": " + msg),
          position(pos) {}
};

struct DriftEvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace expr {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Num, Var };

struct Node {
    Op op;
    double num = 0.0;
    std::unique_ptr<Node> lhs, rhs;

    explicit Node(Op o) : op(o) {}
};

using NodePtr = std::unique_ptr<Node>;

inline double eval(const Node* n, double x) {
    switch (n->op) {
        case Op::Num: return n->num;
        case Op::Var: return x;
        case Op::Neg: return -eval(n->lhs.get(), x);
        case Op::Add: return eval(n->lhs.get(), x) + eval(n->rhs.get(), x);
        case Op::Sub: return eval(n->lhs.get(), x) - eval(n->rhs.get(), x);
        case Op::Mul: return eval(n->lhs.get(), x) * eval(n->rhs.get(), x);
        case Op::Div: return eval(n->lhs.get(), x) / eval(n->rhs.get(), x);
        case Op::Pow: return std::pow(eval(n->lhs.get(), x), eval(n->rhs.get(), x));
        case Op::Exp: return std::exp(eval(n->lhs.get(), x));
        case Op::Log: return std::log(eval(n->lhs.get(), x));
        case Op::Sqrt: return std::sqrt(eval(n->lhs.get(), x));
    }
    return std::nan("");
}

inline NodePtr clone(const Node* n) {
    if (!n) return nullptr;
    auto out = std::make_unique<Node>(n->op);
    out->num = n->num;
    out->lhs = clone(n->lhs.get());
    out->rhs = clone(n->rhs.get());
    return out;
}

inline std::string format(const Node* n) {
    switch (n->op) {
        case Op::Num: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n->num);
            return buf;
        }
        case Op::Var: return "x";
        case Op::Neg: return "(-" + format(n->lhs.get()) + ")";
        case Op::Add: return "(" + format(n->lhs.get()) + " + " + format(n->rhs.get()) + ")";
        case Op::Sub: return "(" + format(n->lhs.get()) + " - " + format(n->rhs.get()) + ")";
        case Op::Mul: return "(" + format(n->lhs.get()) + " * " + format(n->rhs.get()) + ")";
        case Op::Div: return "(" + format(n->lhs.get()) + " / " + format(n->rhs.get()) + ")";
        case Op::Pow: return "(" + format(n->lhs.get()) + " ^ " + format(n->rhs.get()) + ")";
        case Op::Exp: return "exp(" + format(n->lhs.get()) + ")";
        case Op::Log: return "log(" + format(n->lhs.get()) + ")";
        case Op::Sqrt: return "sqrt(" + format(n->lhs.get()) + ")";
    }
    return "?";
}

// Recursive-descent parser; whitespace insensitive, '^' is right associative.
class Parser {
public:
    explicit Parser(std::string text) : text_(std::move(text)) {}

    NodePtr parse() {
        auto node = expression();
        skip_ws();
        if (pos_ != text_.size())
            throw DriftParseError(pos_, "unexpected trailing input '" + rest() + "'");
        return node;
    }

private:
    std::string text_;
    std::size_t pos_ = 0;

    std::string rest() const { return text_.substr(pos_, 8); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_])) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            if (eat('+')) {
                auto node = std::make_unique<Node>(Op::Add);
                node->lhs = std::move(lhs);
                node->rhs = term();
                lhs = std::move(node);
            } else if (eat('-')) {
                auto node = std::make_unique<Node>(Op::Sub);
                node->lhs = std::move(lhs);
                node->rhs = term();
                lhs = std::move(node);
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (eat('*')) {
                auto node = std::make_unique<Node>(Op::Mul);
                node->lhs = std::move(lhs);
                node->rhs = unary();
                lhs = std::move(node);
            } else if (eat('/')) {
                auto node = std::make_unique<Node>(Op::Div);
                node->lhs = std::move(lhs);
                node->rhs = unary();
                lhs = std::move(node);
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (eat('-')) {
            auto node = std::make_unique<Node>(Op::Neg);
            node->lhs = unary();
            return node;
        }
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (eat('^')) {
            auto node = std::make_unique<Node>(Op::Pow);
            node->lhs = std::move(base);
            node->rhs = unary();   // right associative
            return node;
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw DriftParseError(pos_, "unexpected end of input");
        char c = text_[pos_];
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (std::isalpha((unsigned char)c)) return identifier();
        if (c == '(') {
            ++pos_;
            auto node = expression();
            if (!eat(')')) throw DriftParseError(pos_, "expected ')'");
            return node;
        }
        throw DriftParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* start = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) throw DriftParseError(pos_, "malformed number");
        pos_ += static_cast<std::size_t>(end - start);
        auto node = std::make_unique<Node>(Op::Num);
        node->num = v;
        return node;
    }

    NodePtr identifier() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(begin, pos_ - begin);
        if (name == "x") {
            return std::make_unique<Node>(Op::Var);
        }
        Op fn;
        if (name == "exp") fn = Op::Exp;
        else if (name == "log") fn = Op::Log;
        else if (name == "sqrt") fn = Op::Sqrt;
        else throw DriftParseError(begin, "unknown identifier '" + name + "'");
        if (!eat('(')) throw DriftParseError(pos_, "expected '(' after '" + name + "'");
        auto node = std::make_unique<Node>(fn);
        node->lhs = expression();
        if (!eat(')')) throw DriftParseError(pos_, "expected ')'");
        return node;
    }
};

} // namespace expr

enum class DriftKind { Constant, Linear, Expression };

// Immutable once constructed; evaluation is reentrant and side-effect free.
class DriftSpec {
public:
    static DriftSpec constant(double a) { return DriftSpec(DriftKind::Constant, a); }
    static DriftSpec linear(double a) { return DriftSpec(DriftKind::Linear, a); }
    static DriftSpec expression(expr::NodePtr ast, std::string text) {
        DriftSpec s(DriftKind::Expression, 0.0);
        s.ast_ = std::move(ast);
        s.text_ = std::move(text);
        return s;
    }

    DriftSpec(const DriftSpec& o) : kind_(o.kind_), a_(o.a_), text_(o.text_) {
        ast_ = expr::clone(o.ast_.get());
    }
    DriftSpec& operator=(const DriftSpec& o) {
        kind_ = o.kind_;
        a_ = o.a_;
        text_ = o.text_;
        ast_ = expr::clone(o.ast_.get());
        return *this;
    }
    DriftSpec(DriftSpec&&) = default;
    DriftSpec& operator=(DriftSpec&&) = default;

    DriftKind kind() const { return kind_; }
    double parameter() const { return a_; }

    // Raw evaluation: NaN/inf pass through (Monte Carlo treats NaN as a
    // per-path diagnostic rather than an exception).
    double operator()(double x) const {
        switch (kind_) {
            case DriftKind::Constant: return a_;
            case DriftKind::Linear: return a_ * x;
            case DriftKind::Expression: return expr::eval(ast_.get(), x);
        }
        return std::nan("");
    }

    std::string to_string() const {
        char buf[48];
        switch (kind_) {
            case DriftKind::Constant:
                std::snprintf(buf, sizeof buf, "const:%.17g", a_);
                return buf;
            case DriftKind::Linear:
                std::snprintf(buf, sizeof buf, "linear:%.17g", a_);
                return buf;
            case DriftKind::Expression:
                return expr::format(ast_.get());
        }
        return {};
    }

private:
    DriftSpec(DriftKind k, double a) : kind_(k), a_(a) {}

    DriftKind kind_;
    double a_;
    expr::NodePtr ast_;
    std::string text_;
};

// Checked evaluation: q(x) must be finite.
inline double eval_drift(const DriftSpec& spec, double x) {
    if (!(x >= 0.0)) throw DriftEvalError("drift evaluation requires x >= 0");
    double v = spec(x);
    if (!std::isfinite(v))
        throw DriftEvalError("drift evaluation not finite at x = " + std::to_string(x));
    return v;
}

namespace detail {

inline std::vector<double> probe_grid(double x_cap) {
    std::vector<double> xs;
    xs.push_back(0.0);
    for (int k = 20; k >= 1; --k) xs.push_back(std::ldexp(1.0, -k));
    int n = 100;
    for (int j = 1; j <= n; ++j) xs.push_back(x_cap * j / n);
    return xs;
}

} // namespace detail

// Parse a drift string; builtin shorthands first, then the expression grammar.
// Expressions are probed for finiteness on [0, x_cap].
inline DriftSpec parse_drift(const std::string& text, double x_cap = Tolerances{}.x_cap) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) throw DriftParseError(0, "empty drift specification");
    std::size_t end = text.find_last_not_of(" \t\r\n");
    std::string body = text.substr(begin, end - begin + 1);

    auto builtin = [&](const char* prefix) -> const char* {
        std::size_t n = std::strlen(prefix);
        return body.compare(0, n, prefix) == 0 ? body.c_str() + n : nullptr;
    };
    auto parse_param = [&](const char* s) {
        char* e = nullptr;
        double a = std::strtod(s, &e);
        if (e == s || *e != '\0')
            throw DriftParseError(begin + (s - body.c_str()), "malformed parameter");
        if (!std::isfinite(a))
            throw DriftParseError(begin + (s - body.c_str()), "parameter must be finite");
        return a;
    };
    if (const char* s = builtin("const:")) return DriftSpec::constant(parse_param(s));
    if (const char* s = builtin("linear:")) return DriftSpec::linear(parse_param(s));

    expr::Parser parser(body);
    auto ast = parser.parse();
    DriftSpec spec = DriftSpec::expression(std::move(ast), body);
    for (double x : detail::probe_grid(x_cap)) {
        double v = spec(x);
        if (!std::isfinite(v))
            throw DriftParseError(0, "expression undefined or overflows at probe point x = " +
                                          std::to_string(x));
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Numerical C^1 gate. The paper-level assumption q in C^1([0,inf)) cannot be
// certified from finitely many samples; this verdict is advisory.

struct SmoothnessReport {
    bool pass = true;
    double worst_value_jump = 0.0;   // relative jump of q between probe neighbours
    double worst_quotient_jump = 0.0;// relative jump between adjacent difference quotients
    double quotient_growth = 0.0;    // growth of |q'| along the geometric sweep toward 0
    double worst_location = 0.0;
    std::string detail;
};

inline SmoothnessReport check_smoothness(const DriftSpec& spec, double x_cap = Tolerances{}.x_cap,
                                         const Tolerances& tol = {}) {
    SmoothnessReport rep;
    auto quotient = [&](double x) {
        double h = std::max(x / 8.0, 1e-7 * std::max(1.0, x));
        if (x - h < 0) h = x;
        if (h == 0) h = 1e-9;
        return (spec(x + h) - spec(x - h)) / (2 * h);
    };

    // geometric sweep toward 0: derivative must not blow up
    double ref = std::fabs(quotient(1.0));
    double worst_growth = 0.0, worst_growth_x = 0.0;
    std::vector<std::pair<double, double>> geo;
    for (int k = 1; k <= 20; ++k) {
        double x = std::ldexp(1.0, -k);
        double d = quotient(x);
        geo.emplace_back(x, d);
        double g = std::fabs(d) / std::max(1.0, ref);
        if (g > worst_growth) {
            worst_growth = g;
            worst_growth_x = x;
        }
    }
    rep.quotient_growth = worst_growth;
    if (worst_growth > tol.smooth_jump_ratio) {
        rep.pass = false;
        rep.worst_location = worst_growth_x;
        rep.detail = "difference quotients grow without bound toward 0";
    }

    // adjacent-quotient jumps on the geometric sweep and a uniform grid
    auto scan_jumps = [&](const std::vector<std::pair<double, double>>& pts) {
        for (std::size_t i = 1; i < pts.size(); ++i) {
            double denom = std::max({1.0, std::fabs(pts[i - 1].second), std::fabs(pts[i].second)});
            double jump = std::fabs(pts[i].second - pts[i - 1].second) / denom;
            if (jump > rep.worst_quotient_jump) {
                rep.worst_quotient_jump = jump;
                if (jump > tol.smooth_jump_ratio) {
                    rep.pass = false;
                    rep.worst_location = pts[i].first;
                    if (rep.detail.empty()) rep.detail = "derivative jump between adjacent probes";
                }
            }
        }
    };
    scan_jumps(geo);

    std::vector<std::pair<double, double>> uni;
    std::vector<double> qv;
    int n = 200;
    for (int j = 1; j <= n; ++j) {
        double x = x_cap * j / n;
        uni.emplace_back(x, quotient(x));
        qv.push_back(spec(x));
    }
    scan_jumps(uni);

    for (std::size_t i = 1; i < qv.size(); ++i) {
        double denom = std::max({1.0, std::fabs(qv[i - 1]), std::fabs(qv[i])});
        double jump = std::fabs(qv[i] - qv[i - 1]) / denom;
        rep.worst_value_jump = std::max(rep.worst_value_jump, jump);
    }

    return rep;
}

} // namespace qsdlab
