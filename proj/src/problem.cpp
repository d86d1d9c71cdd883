#include "pia/problem.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pia/error.hpp"

namespace pia {

using nlohmann::json;

const char* to_string(HermitianHint h) {
    switch (h) {
    case HermitianHint::real_symmetric: return "real_symmetric";
    case HermitianHint::hermitian: return "hermitian";
    case HermitianHint::general: return "general";
    }
    return "general";
}

const char* to_string(ProblemForm f) {
    return f == ProblemForm::reduced ? "reduced" : "schrodinger_like";
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ProblemFormat, msg); }

Expression expr_field(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where + " must be an expression string");
    return parse_expr(j.get<std::string>());
}

cplx scalar_field(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    bad(where + " must be a number or [re, im]");
}

void check_parameters(const ProblemSpec& p) {
    auto check = [&](const Expression& e) {
        for (const auto& name : e.parameters())
            if (!p.params.count(name))
                throw Error(ErrorKind::UnboundParameter, "'" + name + "' is not declared in params");
    };
    for (const auto& row : p.R)
        for (const auto& e : row) check(e);
    for (const auto& e : p.first_derivative) check(e);
    if (p.a) check(*p.a);
}

// Zeros of `den` on [lo, hi]: sign changes of the real or imaginary part, refined by bisection.
std::vector<double> zeros_of(const Expression& den, double lo, double hi, const Params& params) {
    std::vector<double> roots;
    const int n = 2000;
    auto val = [&](double x, bool& ok) {
        try {
            ok = true;
            return eval_expr(den, x, params);
        } catch (const Error&) {
            ok = false;
            return cplx(0.0);
        }
    };
    double xp = lo;
    bool okp;
    cplx vp = val(xp, okp);
    if (okp && std::abs(vp) == 0.0) roots.push_back(lo);
    for (int k = 1; k <= n; ++k) {
        const double x = lo + (hi - lo) * k / n;
        bool ok;
        const cplx v = val(x, ok);
        if (ok && std::abs(v) == 0.0) {
            roots.push_back(x);
        } else if (ok && okp) {
            for (int part = 0; part < 2; ++part) {
                const double fa = part ? vp.imag() : vp.real(), fb = part ? v.imag() : v.real();
                if (fa * fb < 0.0) {
                    double a = xp, b = x, ga = fa;
                    for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
                        const double m = 0.5 * (a + b);
                        bool okm;
                        const cplx vm = val(m, okm);
                        const double gm = part ? vm.imag() : vm.real();
                        if (!okm || gm == 0.0) {
                            a = b = m;
                            break;
                        }
                        if ((gm < 0.0) == (ga < 0.0)) {
                            a = m;
                            ga = gm;
                        } else {
                            b = m;
                        }
                    }
                    const double r = 0.5 * (a + b);
                    bool okr;
                    const cplx vr = val(r, okr);
                    // a sign change of a pole (e.g. 1/x) is not a zero of the denominator's value
                    if (!okr || std::abs(vr) < 1e-8 * (1.0 + std::abs(vp) + std::abs(v))) roots.push_back(r);
                }
            }
        } else if (!ok) {
            roots.push_back(x);
        }
        xp = x;
        vp = v;
        okp = ok;
    }
    return roots;
}

void collect_denominators(const Node& n, std::vector<Expression>& out) {
    if (n.op == Op::Div) out.emplace_back(n.b);
    if (n.op == Op::Pow && n.b->op == Op::Num && n.b->num.real() < 0.0) out.emplace_back(n.a);
    if (n.op == Op::Pow && n.b->op == Op::Neg) out.emplace_back(n.a);
    if (n.op == Op::Ln || n.op == Op::Sqrt) out.emplace_back(n.a);
    if (n.a) collect_denominators(*n.a, out);
    if (n.b) collect_denominators(*n.b, out);
}

}  // namespace

ProblemSpec problem_from_json(const json& j) {
    if (!j.is_object()) bad("problem must be a JSON object");
    ProblemSpec p;
    if (j.contains("name")) p.name = j["name"].get<std::string>();
    if (!j.contains("n") || !j["n"].is_number_integer()) bad("'n' (integer) is required");
    p.n = j["n"].get<int>();
    if (p.n < 1) bad("'n' must be positive");
    const std::string form = j.value("form", std::string("reduced"));
    if (form == "reduced") p.form = ProblemForm::reduced;
    else if (form == "schrodinger_like") p.form = ProblemForm::schrodinger_like;
    else bad("unknown form '" + form + "'");
    if (!j.contains("R") || !j["R"].is_array() || static_cast<int>(j["R"].size()) != p.n)
        bad("'R' must be an n x n array of expressions");
    for (int r = 0; r < p.n; ++r) {
        const json& row = j["R"][r];
        if (!row.is_array() || static_cast<int>(row.size()) != p.n) bad("'R' row " + std::to_string(r) + " has wrong size");
        std::vector<Expression> er;
        for (int c = 0; c < p.n; ++c)
            er.push_back(expr_field(row[c], "R[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
        p.R.push_back(std::move(er));
    }
    const bool has_fd = j.contains("first_derivative");
    if (has_fd != (p.form == ProblemForm::schrodinger_like))
        bad("'first_derivative' must be present exactly when form is schrodinger_like");
    if (has_fd) {
        const json& fd = j["first_derivative"];
        if (!fd.is_array() || static_cast<int>(fd.size()) != p.n) bad("'first_derivative' must have n entries");
        for (int r = 0; r < p.n; ++r)
            p.first_derivative.push_back(expr_field(fd[r], "first_derivative[" + std::to_string(r) + "]"));
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) bad("'params' must be an object");
        for (const auto& [k, v] : j["params"].items()) p.params[k] = scalar_field(v, "params." + k);
    }
    if (!j.contains("domain") || !j["domain"].is_array() || j["domain"].size() != 2)
        bad("'domain' must be [lo, hi]");
    p.x_lo = j["domain"][0].get<double>();
    p.x_hi = j["domain"][1].get<double>();
    if (!(p.x_lo < p.x_hi)) bad("'domain' must satisfy lo < hi");
    const std::string hint = j.value("hermitian_hint", std::string("general"));
    if (hint == "real_symmetric") p.hint = HermitianHint::real_symmetric;
    else if (hint == "hermitian") p.hint = HermitianHint::hermitian;
    else if (hint == "general") p.hint = HermitianHint::general;
    else bad("unknown hermitian_hint '" + hint + "'");
    if (j.contains("a")) p.a = expr_field(j["a"], "a");
    if (j.contains("lambda")) {
        p.lambda = j["lambda"].get<double>();
        if (!(p.lambda > 0.0 && p.lambda <= 1.0)) bad("'lambda' must lie in (0, 1]");
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_array() || g.size() != 3) bad("'grid' must be [lo, hi, step]");
        p.grid = std::array<double, 3>{g[0].get<double>(), g[1].get<double>(), g[2].get<double>()};
        if (!((*p.grid)[2] > 0.0 && (*p.grid)[0] <= (*p.grid)[1])) bad("'grid' needs lo <= hi and step > 0");
    }
    check_parameters(p);
    return p;
}

json problem_to_json(const ProblemSpec& p) {
    json j;
    if (!p.name.empty()) j["name"] = p.name;
    j["n"] = p.n;
    j["form"] = to_string(p.form);
    json R = json::array();
    for (const auto& row : p.R) {
        json r = json::array();
        for (const auto& e : row) r.push_back(to_string(e));
        R.push_back(r);
    }
    j["R"] = R;
    if (p.form == ProblemForm::schrodinger_like) {
        json fd = json::array();
        for (const auto& e : p.first_derivative) fd.push_back(to_string(e));
        j["first_derivative"] = fd;
    }
    if (p.a) j["a"] = to_string(*p.a);
    if (p.lambda != 1.0) j["lambda"] = p.lambda;
    json params = json::object();
    for (const auto& [k, v] : p.params) {
        if (v.imag() == 0.0) params[k] = v.real();
        else params[k] = json::array({v.real(), v.imag()});
    }
    j["params"] = params;
    j["domain"] = json::array({p.x_lo, p.x_hi});
    j["hermitian_hint"] = to_string(p.hint);
    if (!p.amplitude_rate.empty()) {
        json ar = json::array();
        for (const auto& e : p.amplitude_rate) ar.push_back(to_string(e));
        j["amplitude_rate"] = ar;
    }
    if (!p.flagged_endpoints.empty()) j["flagged_endpoints"] = p.flagged_endpoints;
    if (p.grid) j["grid"] = *p.grid;
    return j;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ProblemFormat, "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ProblemFormat, std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return problem_from_json(j);
}

ProblemSpec reduce_first_derivative(const ProblemSpec& spec) {
    if (spec.form != ProblemForm::schrodinger_like)
        throw Error(ErrorKind::InvalidArgument, "reduce_first_derivative needs a schrodinger_like problem");
    ProblemSpec out = spec;
    const double width = spec.x_hi - spec.x_lo;
    const double edge = 1e-9 * (1.0 + std::abs(spec.x_lo) + std::abs(spec.x_hi));
    for (int j = 0; j < spec.n; ++j) {
        const Expression& a = spec.first_derivative[j];
        std::vector<Expression> dens;
        collect_denominators(a.node(), dens);
        for (const auto& d : dens) {
            if (!d.depends_on_x()) continue;
            for (double r : zeros_of(d, spec.x_lo, spec.x_hi, spec.params)) {
                if (r - spec.x_lo <= edge || spec.x_hi - r <= edge) {
                    out.flagged_endpoints.push_back(r - spec.x_lo <= edge ? spec.x_lo : spec.x_hi);
                } else {
                    throw Error(ErrorKind::SingularCoefficient,
                                "first-derivative coefficient '" + to_string(a) + "' is singular near x=" +
                                    std::to_string(r) + " inside the domain of width " + std::to_string(width));
                }
            }
        }
    }
    const Expression half = Expression::number(0.5), two = Expression::number(2.0);
    for (int j = 0; j < spec.n; ++j) {
        const Expression& a = spec.first_derivative[j];
        out.R[j][j] = spec.R[j][j] - half * (half * pow(a, two) + diff_expr(a));
        out.amplitude_rate.push_back(half * a);
    }
    std::sort(out.flagged_endpoints.begin(), out.flagged_endpoints.end());
    out.flagged_endpoints.erase(std::unique(out.flagged_endpoints.begin(), out.flagged_endpoints.end()),
                                out.flagged_endpoints.end());
    out.form = ProblemForm::reduced;
    out.first_derivative.clear();
    return out;
}

ReducedProblem split_R(const ProblemSpec& spec, double lambda, const Expression& a) {
    if (spec.form != ProblemForm::reduced)
        throw Error(ErrorKind::InvalidArgument, "split_R needs a reduced problem");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must lie in (0, 1]");
    ReducedProblem p;
    p.name = spec.name;
    p.a = a;
    p.lambda = lambda;
    p.hint = spec.hint;
    p.params = spec.params;
    p.x_lo = spec.x_lo;
    p.x_hi = spec.x_hi;
    const Expression l2 = Expression::number(lambda * lambda);
    p.G.resize(spec.n);
    for (int r = 0; r < spec.n; ++r)
        for (int c = 0; c < spec.n; ++c) p.G[r].push_back(l2 * (r == c ? spec.R[r][c] - a : spec.R[r][c]));
    return p;
}

ReducedProblem make_reduced(const ProblemSpec& spec) {
    const ProblemSpec red = spec.form == ProblemForm::reduced ? spec : reduce_first_derivative(spec);
    return split_R(red, spec.lambda, spec.a.value_or(Expression()));
}

Expression langer_auxiliary(double c_a, const Expression& d_a) {
    if (c_a == 0.0) return Expression();
    return Expression::number(c_a) * pow(Expression::variable(), Expression::number(-2.0)) *
           (Expression::number(1.0) + d_a);
}

void verify_hermitian_hint(const ReducedProblem& p, int samples) {
    if (p.hint == HermitianHint::general) return;
    const int n = p.n();
    for (int k = 0; k < samples; ++k) {
        const double x = p.x_lo + (p.x_hi - p.x_lo) * (k + 0.5) / samples;
        Eigen::MatrixXcd g;
        try {
            g = eval_matrix(p.G, x, p.params);
        } catch (const Error&) {
            continue;
        }
        const double tol = 1e-12 * (1.0 + g.cwiseAbs().maxCoeff());
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                const cplx other = p.hint == HermitianHint::real_symmetric ? g(c, r) : std::conj(g(c, r));
                bool bad_entry = std::abs(g(r, c) - other) > tol;
                if (p.hint == HermitianHint::real_symmetric && std::abs(g(r, c).imag()) > tol) bad_entry = true;
                if (bad_entry)
                    throw Error(ErrorKind::ProblemFormat,
                                std::string("declared hermitian_hint '") + to_string(p.hint) +
                                    "' violated at x=" + std::to_string(x) + " entry (" + std::to_string(r + 1) +
                                    "," + std::to_string(c + 1) + ")");
            }
    }
}

Eigen::MatrixXcd eval_matrix(const ExprMatrix& m, double x, const Params& params) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = eval_expr(m[i][j], x, params);
    return r;
}

JetMatrix eval_matrix_jet(const ExprMatrix& m, double x0, int order, const Params& params) {
    JetMatrix r(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        for (const auto& e : m[i]) r[i].push_back(eval_expr_jet(e, x0, order, params));
    return r;
}

Eigen::MatrixXcd eval_R(const ReducedProblem& p, double x) {
    Eigen::MatrixXcd r = eval_matrix(p.G, x, p.params) / (p.lambda * p.lambda);
    const cplx a = eval_expr(p.a, x, p.params);
    for (int j = 0; j < p.n(); ++j) r(j, j) += a;
    return r;
}

namespace {

json mat(const std::vector<std::vector<std::string>>& m) {
    json r = json::array();
    for (const auto& row : m) r.push_back(json(row));
    return r;
}

json example_json(const std::string& name) {
    if (name == "fulling-pos")
        return {{"name", name},
                {"n", 2},
                {"form", "reduced"},
                {"R",
                 mat({{"x*cos(x)^2 + sin(x)^2", "(x - 1)*cos(x)*sin(x)"},
                      {"(x - 1)*cos(x)*sin(x)", "x*sin(x)^2 + cos(x)^2"}})},
                {"params", json::object()},
                {"domain", json::array({0.1, 10.0})},
                {"grid", json::array({3.0, 8.0, 0.05})},
                {"hermitian_hint", "real_symmetric"}};
    if (name == "fulling-neg")
        return {{"name", name},
                {"n", 2},
                {"form", "reduced"},
                {"R",
                 mat({{"-(x*cos(x)^2 + sin(x)^2)", "(x - 1)*cos(x)*sin(x)"},
                      {"(x - 1)*cos(x)*sin(x)", "-(x*sin(x)^2 + cos(x)^2)"}})},
                {"params", json::object()},
                {"domain", json::array({0.1, 10.0})},
                {"grid", json::array({3.0, 8.0, 0.05})},
                {"hermitian_hint", "real_symmetric"}};
    if (name == "nonhermitian")
        return {{"name", name},
                {"n", 2},
                {"form", "reduced"},
                {"R",
                 mat({{"x*cos(x)^2 + sin(x)^2", "2*i*(x - 1)*cos(x)*sin(x)"},
                      {"-0.5*i*(x - 1)*cos(x)*sin(x)", "x*sin(x)^2 + cos(x)^2"}})},
                {"params", json::object()},
                {"domain", json::array({0.1, 10.0})},
                {"grid", json::array({2.0, 6.0, 0.05})},
                {"hermitian_hint", "general"}};
    if (name == "bec-vortex") {
        const std::string d0 = "(1/(4*x^2) + 4/x^4 + 38/x^6 + 748/x^8)";
        const std::string d1 = "(1/x^2 + 2/x^4 + 19/x^6 + 374/x^8)";
        const std::string h0 = "(-1 - k^2 + " + d0 + ")";
        const std::string h1 = "(2*(omega + x^-2))";
        const std::string h2 = "(-1 + " + d1 + ")";
        return {{"name", name},
                {"n", 2},
                {"form", "reduced"},
                {"R", mat({{h0 + " - " + h1, h2}, {h2, h0 + " + " + h1}})},
                {"params", {{"k", 0.04}, {"omega", 0.002604}}},
                {"domain", json::array({20.0, 120.0})},
                {"grid", json::array({55.0, 80.0, 0.25})},
                {"hermitian_hint", "real_symmetric"}};
    }
    if (name == "scalar-quadratic")
        return {{"name", name},
                {"n", 1},
                {"form", "reduced"},
                {"R", mat({{"x^2 + 1"}})},
                {"params", json::object()},
                {"domain", json::array({0.0, 5.0})},
                {"grid", json::array({1.0, 3.0, 0.05})},
                {"hermitian_hint", "real_symmetric"}};
    throw Error(ErrorKind::UnknownExample, "'" + name + "'");
}

}  // namespace

ProblemSpec builtin_example(const std::string& name) { return problem_from_json(example_json(name)); }

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names = {"fulling-pos", "fulling-neg", "nonhermitian", "bec-vortex",
                                                   "scalar-quadratic"};
    return names;
}

}  // namespace pia
