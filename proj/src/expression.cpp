#include "pia/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pia/error.hpp"

namespace pia {

namespace {

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    return std::make_shared<const Node>(Node{op, {}, {}, std::move(a), std::move(b)});
}

const char* function_name(Op op) {
    switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    default: return "?";
    }
}

bool lookup_function(const std::string& s, Op& op) {
    if (s == "exp") op = Op::Exp;
    else if (s == "ln" || s == "log") op = Op::Ln;
    else if (s == "sqrt") op = Op::Sqrt;
    else if (s == "sin") op = Op::Sin;
    else if (s == "cos") op = Op::Cos;
    else return false;
    return true;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expression run() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return Expression(e);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::SyntaxError, msg + " at position " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool accept_pow() {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            return true;
        }
        if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') {
            pos_ += 2;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr l = term();
        for (;;) {
            if (accept('+')) l = make(Op::Add, l, term());
            else if (accept('-')) l = make(Op::Sub, l, term());
            else return l;
        }
    }

    NodePtr term() {
        NodePtr l = unary();
        for (;;) {
            skip();
            if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') return l;
            if (accept('*')) l = make(Op::Mul, l, unary());
            else if (accept('/')) l = make(Op::Div, l, unary());
            else return l;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept_pow()) return make(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        const std::string tok(s_.substr(start, pos_ - start));
        if (tok == ".") {
            pos_ = start;
            fail("malformed number");
        }
        return Expression::number(std::stod(tok)).root();
    }

    NodePtr identifier() {
        const size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string id(s_.substr(start, pos_ - start));
        skip();
        const bool call = pos_ < s_.size() && s_[pos_] == '(';
        Op f;
        if (call) {
            if (!lookup_function(id, f)) {
                pos_ = start;
                throw Error(ErrorKind::UnknownFunction,
                            "'" + id + "' at position " + std::to_string(start));
            }
            ++pos_;
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')' after function argument");
            return make(f, arg);
        }
        if (lookup_function(id, f)) {
            pos_ = start;
            fail("function '" + id + "' needs an argument");
        }
        if (id == "x") return make(Op::Var);
        if (id == "i") return Expression::number(cplx(0.0, 1.0)).root();
        if (id == "pi") return Expression::number(std::numbers::pi).root();
        return Expression::parameter(id).root();
    }

    std::string_view s_;
    size_t pos_ = 0;
};

// ---------------------------------------------------------------- printer

int precedence(const Node& n) {
    switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Num:
        if (n.num.imag() != 0.0 && n.num != cplx(0.0, 1.0)) return 0;
        if (n.num.real() < 0.0 || std::signbit(n.num.real())) return 0;
        return 5;
    default: return 5;
    }
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print(const Node& n);

std::string wrap(const Node& n, bool paren) {
    return paren ? "(" + print(n) + ")" : print(n);
}

std::string print(const Node& n) {
    switch (n.op) {
    case Op::Num:
        if (n.num.imag() == 0.0) return fmt_real(n.num.real());
        if (n.num == cplx(0.0, 1.0)) return "i";
        if (n.num.real() == 0.0) return fmt_real(n.num.imag()) + "*i";
        return fmt_real(n.num.real()) + "+" + fmt_real(n.num.imag()) + "*i";
    case Op::Var: return "x";
    case Op::Param: return n.name;
    case Op::Neg: return "-" + wrap(*n.a, precedence(*n.a) < 3);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        const int p = precedence(n);
        const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
        return wrap(*n.a, precedence(*n.a) < p) + sym + wrap(*n.b, precedence(*n.b) <= p);
    }
    case Op::Pow: return wrap(*n.a, precedence(*n.a) <= 4) + "^" + wrap(*n.b, precedence(*n.b) < 3);
    default: return std::string(function_name(n.op)) + "(" + print(*n.a) + ")";
    }
}

// ---------------------------------------------------------------- evaluation

TaylorJet eval_node(const Node& n, double x0, int K, const Params& p);

cplx constant_value(const Node& n, const Params& p) { return eval_node(n, 0.0, 0, p)[0]; }

bool node_depends_on_x(const Node& n) {
    if (n.op == Op::Var) return true;
    return (n.a && node_depends_on_x(*n.a)) || (n.b && node_depends_on_x(*n.b));
}

TaylorJet eval_node(const Node& n, double x0, int K, const Params& p) {
    switch (n.op) {
    case Op::Num: return TaylorJet::constant(x0, K, n.num);
    case Op::Var: return TaylorJet::variable(x0, K);
    case Op::Param: {
        auto it = p.find(n.name);
        if (it == p.end()) throw Error(ErrorKind::UnboundParameter, "'" + n.name + "'");
        return TaylorJet::constant(x0, K, it->second);
    }
    case Op::Neg: return -eval_node(*n.a, x0, K, p);
    case Op::Add: return eval_node(*n.a, x0, K, p) + eval_node(*n.b, x0, K, p);
    case Op::Sub: return eval_node(*n.a, x0, K, p) - eval_node(*n.b, x0, K, p);
    case Op::Mul: return eval_node(*n.a, x0, K, p) * eval_node(*n.b, x0, K, p);
    case Op::Div: return eval_node(*n.a, x0, K, p) / eval_node(*n.b, x0, K, p);
    case Op::Pow: {
        TaylorJet base = eval_node(*n.a, x0, K, p);
        if (!node_depends_on_x(*n.b)) return pow(base, constant_value(*n.b, p));
        return exp(eval_node(*n.b, x0, K, p) * log(base));
    }
    case Op::Exp: return exp(eval_node(*n.a, x0, K, p));
    case Op::Ln: return log(eval_node(*n.a, x0, K, p));
    case Op::Sqrt: return sqrt(eval_node(*n.a, x0, K, p));
    case Op::Sin: return sin(eval_node(*n.a, x0, K, p));
    case Op::Cos: return cos(eval_node(*n.a, x0, K, p));
    }
    return TaylorJet(x0, K);
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    if (a.op == Op::Num) return a.num == b.num;
    if (a.op == Op::Param) return a.name == b.name;
    if (bool(a.a) != bool(b.a) || bool(a.b) != bool(b.b)) return false;
    if (a.a && !equal_nodes(*a.a, *b.a)) return false;
    if (a.b && !equal_nodes(*a.b, *b.b)) return false;
    return true;
}

void collect_params(const Node& n, std::set<std::string>& out) {
    if (n.op == Op::Param) out.insert(n.name);
    if (n.a) collect_params(*n.a, out);
    if (n.b) collect_params(*n.b, out);
}

}  // namespace

Expression::Expression() : root_(number(0.0).root_) {}

Expression Expression::number(cplx v) {
    return Expression(std::make_shared<const Node>(Node{Op::Num, v, {}, nullptr, nullptr}));
}

Expression Expression::variable() { return Expression(make(Op::Var)); }

Expression Expression::parameter(const std::string& name) {
    return Expression(std::make_shared<const Node>(Node{Op::Param, {}, name, nullptr, nullptr}));
}

bool Expression::depends_on_x() const { return node_depends_on_x(*root_); }

std::set<std::string> Expression::parameters() const {
    std::set<std::string> s;
    collect_params(*root_, s);
    return s;
}

Expression operator+(const Expression& a, const Expression& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().num + b.node().num);
    return Expression(make(Op::Add, a.root(), b.root()));
}

Expression operator-(const Expression& a, const Expression& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().num - b.node().num);
    return Expression(make(Op::Sub, a.root(), b.root()));
}

Expression operator*(const Expression& a, const Expression& b) {
    if (a.is_zero() || b.is_zero()) return Expression::number(0.0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().num * b.node().num);
    return Expression(make(Op::Mul, a.root(), b.root()));
}

Expression operator/(const Expression& a, const Expression& b) {
    if (a.is_zero()) return Expression::number(0.0);
    if (b.is_one()) return a;
    if (a.is_number() && b.is_number() && b.node().num != cplx(0.0))
        return Expression::number(a.node().num / b.node().num);
    return Expression(make(Op::Div, a.root(), b.root()));
}

Expression operator-(const Expression& a) {
    if (a.is_number()) return Expression::number(-a.node().num);
    if (a.node().op == Op::Neg) return Expression(a.node().a);
    return Expression(make(Op::Neg, a.root()));
}

Expression pow(const Expression& a, const Expression& b) {
    if (b.is_zero()) return Expression::number(1.0);
    if (b.is_one()) return a;
    if (a.is_number() && b.is_number()) return Expression::number(std::pow(a.node().num, b.node().num));
    return Expression(make(Op::Pow, a.root(), b.root()));
}

Expression apply(Op f, const Expression& a) { return Expression(make(f, a.root())); }

Expression parse_expr(std::string_view text) { return Parser(text).run(); }

std::string to_string(const Expression& e) { return print(e.node()); }

bool structurally_equal(const Expression& a, const Expression& b) {
    return equal_nodes(a.node(), b.node());
}

Expression diff_expr(const Expression& e) {
    const Node& n = e.node();
    auto A = [&] { return Expression(n.a); };
    auto B = [&] { return Expression(n.b); };
    const Expression one = Expression::number(1.0);
    switch (n.op) {
    case Op::Num:
    case Op::Param: return Expression::number(0.0);
    case Op::Var: return one;
    case Op::Neg: return -diff_expr(A());
    case Op::Add: return diff_expr(A()) + diff_expr(B());
    case Op::Sub: return diff_expr(A()) - diff_expr(B());
    case Op::Mul: return diff_expr(A()) * B() + A() * diff_expr(B());
    case Op::Div:
        return (diff_expr(A()) * B() - A() * diff_expr(B())) / pow(B(), Expression::number(2.0));
    case Op::Pow:
        if (!B().depends_on_x()) return B() * pow(A(), B() - one) * diff_expr(A());
        return e * (diff_expr(B()) * apply(Op::Ln, A()) + B() * diff_expr(A()) / A());
    case Op::Exp: return e * diff_expr(A());
    case Op::Ln: return diff_expr(A()) / A();
    case Op::Sqrt: return diff_expr(A()) / (Expression::number(2.0) * e);
    case Op::Sin: return apply(Op::Cos, A()) * diff_expr(A());
    case Op::Cos: return -(apply(Op::Sin, A()) * diff_expr(A()));
    }
    return Expression::number(0.0);
}

TaylorJet eval_expr_jet(const Expression& e, double x0, int order, const Params& params) {
    try {
        return eval_node(e.node(), x0, order, params);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::DivisionByZeroLeadCoefficient ||
            err.kind() == ErrorKind::BranchPointEvaluation)
            throw Error(ErrorKind::EvaluationSingularity,
                        "'" + to_string(e) + "' at x=" + fmt_real(x0) + " (" + err.what() + ")");
        throw;
    }
}

cplx eval_expr(const Expression& e, double x, const Params& params) {
    return eval_expr_jet(e, x, 0, params)[0];
}

cplx eval_constant(const Expression& e, const Params& params) { return eval_expr(e, 0.0, params); }

}  // namespace pia
