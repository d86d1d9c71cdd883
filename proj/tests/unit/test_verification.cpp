#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pia/error.hpp"
#include "pia/problem.hpp"
#include "pia/verification.hpp"

using namespace pia;

namespace {

MatrixFn scalar_R(double c) {
    return [c](double) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = c;
        return m;
    };
}

Eigen::VectorXcd vec1(cplx a) {
    Eigen::VectorXcd v(1);
    v(0) = a;
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int k = 0; k < n; ++k) v.push_back(a + (b - a) * k / (n - 1));
    return v;
}

ReducedProblem constant_problem() {
    ReducedProblem p;
    p.G = {{parse_expr("2"), parse_expr("0.5")}, {parse_expr("0.5"), parse_expr("-1")}};
    p.a = Expression::number(0.0);
    p.hint = HermitianHint::real_symmetric;
    p.x_lo = 0.0;
    p.x_hi = 5.0;
    return p;
}

}  // namespace

TEST_CASE("reference integration of trivial problems") {
    const double half_pi[] = {std::numbers::pi / 2};
    auto w = reference_integrate(scalar_R(1.0), 0.0, vec1(0.0), vec1(1.0), half_pi, 1e-12);
    CHECK(std::abs(w[0].u[0] - 1.0) < 1e-9);
    const double five[] = {5.0};
    w = reference_integrate(scalar_R(-1.0), 0.0, vec1(1.0), vec1(-1.0), five, 1e-12);
    CHECK(std::abs(w[0].u[0] - std::exp(-5.0)) < 1e-9);
    // integration towards smaller x
    const double back[] = {-1.0, -2.0};
    w = reference_integrate(scalar_R(1.0), 0.0, vec1(0.0), vec1(1.0), back, 1e-12);
    CHECK(std::abs(w[1].u[0] - std::sin(-2.0)) < 1e-9);
    CHECK_THROWS_AS(reference_integrate(scalar_R(1.0), 0.0, vec1(0.0), vec1(1.0), five, 1e-3), Error);
}

TEST_CASE("reference solutions of a symmetric system") {
    const ReducedProblem p = make_reduced(builtin_example("fulling-pos"));
    const MatrixFn R = [&](double x) { return eval_R(p, x); };
    const auto grid = linspace(2.0, 9.0, 36);
    for (double tol : {1e-8, 1e-10}) {
        Eigen::VectorXcd a(2), da(2), b(2), db(2);
        a << 1.0, 0.3;
        da << 0.0, -0.5;
        b << cplx(0.2, 0.1), -1.0;
        db << 0.7, cplx(0.0, 0.4);
        const auto w1 = reference_integrate(R, 2.0, a, da, grid, tol);
        const auto w2 = reference_integrate(R, 2.0, b, db, grid, tol);
        for (const auto& r : residual(w1, R)) CHECK(r.relative <= 10 * tol);
        const auto ws = wronskian(w1, w2, WronskianKind::symmetric);
        CHECK(ws.drift <= 10 * tol);
        CHECK(std::abs(ws.samples.front().second - (a.cwiseProduct(db).sum() - b.cwiseProduct(da).sum())) < 1e-12);
    }
}

TEST_CASE("Wronskian and current basics") {
    const ReducedProblem p = make_reduced(builtin_example("fulling-neg"));
    EngineConfig cfg;
    cfg.variant = TheoryVariant::wronskian_conserving;
    cfg.branch.index = 1;
    cfg.m_max = 2;
    cfg.anchor = 3.0;
    const VectorEngine e(p, cfg);
    const auto grid = linspace(3.0, 6.0, 13);
    const auto u1 = e.wave(1, grid, 0.5), u2 = e.wave(-1, grid, 0.5);
    for (const auto& s : u1)
        for (const cplx& c : s.u) CHECK(std::abs(c.imag()) <= 1e-12 * (1.0 + std::abs(c)));
    CHECK(std::abs(current_sigma(u1).median) < 1e-14);
    const auto self = wronskian(u1, u1, WronskianKind::generalized);
    for (const auto& [x, v] : self.samples) CHECK(std::abs(v) < 1e-14);
    // sigma of u1 + i u2 equals W(u1, u2) pointwise
    auto mix = u1;
    for (size_t k = 0; k < mix.size(); ++k)
        for (size_t j = 0; j < 2; ++j) {
            mix[k].u[j] += cplx(0, 1) * u2[k].u[j];
            mix[k].u_prime[j] += cplx(0, 1) * u2[k].u_prime[j];
        }
    const auto sig = current_sigma(mix), w = wronskian(u1, u2, WronskianKind::generalized);
    for (size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(sig.samples[k].second - w.samples[k].second) < 1e-12 * (1.0 + std::abs(w.samples[k].second)));
    auto shifted = u2;
    shifted[3].x += 0.01;
    try {
        wronskian(u1, shifted, WronskianKind::symmetric);
        FAIL("expected GridMismatch");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::GridMismatch);
    }
    CHECK_THROWS_AS(wronskian(u1, std::vector<WaveSample>(u2.begin(), u2.end() - 1), WronskianKind::symmetric), Error);
}

TEST_CASE("constant R is reproduced exactly") {
    const ReducedProblem p = constant_problem();
    for (int idx : {0, 1})
        for (int m : {0, 1, 3}) {
            EngineConfig cfg;
            cfg.variant = TheoryVariant::fulling_current;
            cfg.branch.index = idx;
            cfg.m_max = m;
            cfg.anchor = 0.5;
            const VectorEngine e(p, cfg);
            for (int sign : {1, -1})
                for (const auto& r : residual(e.wave(sign, linspace(0.5, 4.0, 15), 0.3), p, 0.3))
                    CHECK(r.relative <= 1e-12);
        }
    ScalingSetup s;
    s.m_max = 2;
    const std::vector<double> lams = {0.2, 0.1, 0.05}, probes = {1.0, 2.0};
    const ScalingReport rep = order_scaling(p, s, lams, probes);
    CHECK(rep.status == "NotMeasurable");
    CHECK_FALSE(rep.slope.has_value());
}

TEST_CASE("order scaling on the scalar quadratic problem") {
    const ReducedProblem p = make_reduced(builtin_example("scalar-quadratic"));
    const std::vector<double> lams = {0.2, 0.1, 0.05}, probes = {1.0, 2.0, 3.0};
    for (int m : {0, 2, 4}) {
        ScalingSetup s;
        s.m_max = m;
        const ScalingReport rep = order_scaling(p, s, lams, probes);
        REQUIRE(rep.slope.has_value());
        CHECK(std::abs(*rep.slope - (m + 2.0)) < 0.3);
    }
    const std::vector<double> two = {0.2, 0.1};
    CHECK_THROWS_AS(order_scaling(p, ScalingSetup{}, two, probes), Error);
}

TEST_CASE("log-log slope") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0}, y = {3.0, 24.0, 192.0, 1536.0};
    CHECK(std::abs(loglog_slope(x, y) - 3.0) < 1e-12);
}

TEST_CASE("crossing diagnostics") {
    const ReducedProblem f = make_reduced(builtin_example("fulling-pos"));
    auto c = crossing_diagnostics(f.G, f.params, 0.1, 10.0);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].x_cr - 1.0) < 1e-6);
    CHECK(std::abs(c[0].p - 1.0) < 0.05);
    CHECK(crossing_diagnostics(constant_problem().G, {}, 0.0, 5.0).empty());
    const ExprMatrix diag = {{parse_expr("x"), parse_expr("0")}, {parse_expr("0"), parse_expr("2*x")}};
    c = crossing_diagnostics(diag, {}, -1.0, 1.3);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].x_cr) < 1e-6);
    CHECK(std::abs(c[0].p - 1.0) < 0.05);
    const ExprMatrix quad = {{parse_expr("(x - 2)^2"), parse_expr("0")}, {parse_expr("0"), parse_expr("0")}};
    c = crossing_diagnostics(quad, {}, 0.0, 3.1);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].p - 2.0) < 0.05);
    CHECK_THROWS_AS(crossing_diagnostics(diag, {}, 1.0, 1.0), Error);
}
