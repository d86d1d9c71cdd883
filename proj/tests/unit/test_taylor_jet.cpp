#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "pia/error.hpp"
#include "pia/expression.hpp"
#include "pia/taylor_jet.hpp"

using namespace pia;
using pia_test::rel_err;

namespace {

TaylorJet poly(double x0, std::vector<cplx> c) { return TaylorJet(x0, std::move(c)); }

void check_against_symbolic(const TaylorJet& j, const Expression& e, double x0, double tol) {
    double f = 1.0;
    for (int p = 0; p <= j.order(); ++p) {
        if (p > 0) f *= p;
        const cplx want = pia_test::symbolic_derivative(e, p, x0) / f;
        CHECK(rel_err(j[p], want) < tol);
    }
}

}  // namespace

TEST_CASE("product and quotient of simple series") {
    auto p = poly(0, {1, 1, 0}) * poly(0, {1, -1, 0});
    CHECK(p[0] == cplx(1));
    CHECK(p[1] == cplx(0));
    CHECK(p[2] == cplx(-1));
    auto q = TaylorJet::constant(0, 3, 1.0) / poly(0, {1, -1, 0, 0});
    for (int k = 0; k <= 3; ++k) CHECK(std::abs(q[k] - 1.0) < 1e-15);
}

TEST_CASE("sin*cos against symbolic derivatives") {
    const double x0 = 0.7;
    auto x = TaylorJet::variable(x0, 4);
    check_against_symbolic(sin(x) * cos(x), parse_expr("sin(x)*cos(x)"), x0, 1e-13);
}

TEST_CASE("elementary functions") {
    auto x = TaylorJet::variable(0, 3);
    auto s = sin(x);
    CHECK(std::abs(s[0]) < 1e-16);
    CHECK(std::abs(s[1] - 1.0) < 1e-16);
    CHECK(std::abs(s[2]) < 1e-16);
    CHECK(std::abs(s[3] + 1.0 / 6) < 1e-16);
    auto r = sqrt(poly(0, {1, 1, 0}));
    CHECK(std::abs(r[0] - 1.0) < 1e-16);
    CHECK(std::abs(r[1] - 0.5) < 1e-16);
    CHECK(std::abs(r[2] + 0.125) < 1e-16);
    auto x1 = TaylorJet::variable(1, 3);
    check_against_symbolic(exp(x1 * x1), parse_expr("exp(x^2)"), 1.0, 1e-13);
    check_against_symbolic(log(x1 + 1.0), parse_expr("ln(x + 1)"), 1.0, 1e-13);
    check_against_symbolic(pow(x1 + 1.0, 1.5), parse_expr("(x + 1)^1.5"), 1.0, 1e-13);
    check_against_symbolic(pow(x1, -3.0), parse_expr("x^-3"), 1.0, 1e-13);
}

TEST_CASE("derivative extraction") {
    auto x = TaylorJet::variable(2, 3);
    auto c = x * x * x;
    CHECK(std::abs(c.derivative(1) - 12.0) < 1e-13);
    CHECK(c.derivative(0) == c[0]);
    CHECK(std::abs(sin(TaylorJet::variable(0, 3)).derivative(3) + 1.0) < 1e-15);
    CHECK_THROWS_AS(c.derivative(4), Error);
    try {
        c.derivative(4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrderExceeded);
    }
}

TEST_CASE("error kinds") {
    auto z = TaylorJet::variable(0, 2);
    auto check_kind = [](auto&& f, ErrorKind k) {
        try {
            f();
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.kind() == k);
        }
    };
    check_kind([&] { return 1.0 / z; }, ErrorKind::DivisionByZeroLeadCoefficient);
    check_kind([&] { return sqrt(z); }, ErrorKind::BranchPointEvaluation);
    check_kind([&] { return log(z); }, ErrorKind::BranchPointEvaluation);
    check_kind([&] { return pow(z, 0.5); }, ErrorKind::BranchPointEvaluation);
    check_kind([&] { return z + TaylorJet::variable(0, 3); }, ErrorKind::MismatchedJets);
    check_kind([&] { return z * TaylorJet::variable(1, 2); }, ErrorKind::MismatchedJets);
}

TEST_CASE("random polynomial arithmetic is exact") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 50; ++t) {
        const int K = 6;
        std::vector<cplx> a(K + 1), b(K + 1);
        for (int k = 0; k <= K; ++k) {
            a[k] = {u(rng), u(rng)};
            b[k] = {u(rng), u(rng)};
        }
        auto pa = poly(0.3, a), pb = poly(0.3, b);
        auto s = pa + pb, d = pa - pb, m = pa * pb;
        for (int k = 0; k <= K; ++k) {
            cplx want = 0;
            for (int j = 0; j <= k; ++j) want += a[j] * b[k - j];
            CHECK(std::abs(m[k] - want) <= 1e-14 * (1 + std::abs(want)) * 8);
            CHECK(s[k] == a[k] + b[k]);
            CHECK(d[k] == a[k] - b[k]);
        }
    }
}

TEST_CASE("mul/div round trip") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 50; ++t) {
        std::vector<cplx> a(6), b(6);
        for (int k = 0; k < 6; ++k) {
            a[k] = {u(rng), u(rng)};
            b[k] = {u(rng), u(rng)};
        }
        if (std::abs(b[0]) < 1e-6) b[0] = 1e-3;
        auto pa = poly(0, a), pb = poly(0, b);
        auto r = (pa * pb) / pb;
        for (int k = 0; k < 6; ++k) CHECK(std::abs(r[k] - a[k]) <= 1e-12 * (1 + pa.max_abs()) / std::min(1.0, std::pow(std::abs(b[0]), k + 1)));
    }
}

TEST_CASE("random compositions match symbolic derivatives") {
    std::mt19937 rng(2024);
    for (int t = 0; t < 20; ++t) {
        const std::string s = pia_test::random_expr(rng, 3);
        const Expression e = parse_expr(s);
        const double x0 = 0.5 + 0.07 * t;
        INFO(s);
        check_against_symbolic(eval_expr_jet(e, x0, 4, {}), e, x0, 1e-10);
    }
}

TEST_CASE("integrate and diff are inverse") {
    auto x = TaylorJet::variable(0.4, 5);
    auto f = exp(x) * cos(x);
    auto g = f.integrate(2.0).diff();
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(g[k] - f[k]) < 1e-15);
    CHECK(std::abs(f.integrate(2.0)[0] - 2.0) < 1e-16);
}

TEST_CASE("aligning helpers truncate to the smaller order") {
    auto a = TaylorJet::variable(0, 4), b = TaylorJet::variable(0, 2);
    CHECK(mul(a, b).order() == 2);
    CHECK(add(a, b).order() == 2);
    CHECK(std::abs(mul(a, b)[2] - 1.0) < 1e-16);
}
