#include "pia/verification.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "pia/error.hpp"
#include "pia/ode.hpp"

namespace pia {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void finish(ConservationReport& r, double floor) {
    if (r.samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
    std::vector<double> re, im;
    for (const auto& [x, v] : r.samples) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    r.median = cplx(median_of(re), median_of(im));
    double worst = 0.0;
    for (const auto& [x, v] : r.samples) worst = std::max(worst, std::abs(v - r.median));
    r.drift = worst / (std::abs(r.median) + floor);
}

Eigen::VectorXcd vec(const std::vector<cplx>& v) { return Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size()); }

double eigen_gap(const ExprMatrix& g, const Params& params, double x) {
    const Eigen::MatrixXcd m = eval_matrix(g, x, params);
    if (m.rows() == 2) {
        const cplx d = (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4.0 * m(0, 1) * m(1, 0);
        return std::sqrt(std::abs(d));
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.rows(); ++j)
            gap = std::min(gap, std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)));
    return gap;
}

}  // namespace

const char* to_string(ConservedQuantity q) {
    switch (q) {
    case ConservedQuantity::current_sigma: return "current_sigma";
    case ConservedQuantity::wronskian_generalized: return "wronskian_generalized";
    case ConservedQuantity::wronskian_symmetric: return "wronskian_symmetric";
    }
    return "current_sigma";
}

ConservationReport current_sigma(const std::vector<WaveSample>& w, double floor) {
    ConservationReport r;
    r.quantity = ConservedQuantity::current_sigma;
    for (const auto& s : w) r.samples.emplace_back(s.x, vec(s.u).dot(vec(s.u_prime)).imag());
    finish(r, floor);
    return r;
}

ConservationReport wronskian(const std::vector<WaveSample>& w1, const std::vector<WaveSample>& w2, WronskianKind kind,
                             double floor) {
    if (w1.size() != w2.size()) throw Error(ErrorKind::GridMismatch, "sample counts differ");
    ConservationReport r;
    r.quantity = kind == WronskianKind::generalized ? ConservedQuantity::wronskian_generalized
                                                    : ConservedQuantity::wronskian_symmetric;
    for (size_t k = 0; k < w1.size(); ++k) {
        if (std::abs(w1[k].x - w2[k].x) > 1e-12 * (1.0 + std::abs(w1[k].x)))
            throw Error(ErrorKind::GridMismatch, "abscissae differ at sample " + std::to_string(k));
        const Eigen::VectorXcd u1 = vec(w1[k].u), d1 = vec(w1[k].u_prime), u2 = vec(w2[k].u), d2 = vec(w2[k].u_prime);
        const cplx v = kind == WronskianKind::generalized ? cplx((u1.dot(d2) - u2.dot(d1)).real(), 0.0)
                                                          : u1.cwiseProduct(d2).sum() - u2.cwiseProduct(d1).sum();
        r.samples.emplace_back(w1[k].x, v);
    }
    finish(r, floor);
    return r;
}

std::vector<ResidualPoint> residual(const std::vector<WaveSample>& w, const MatrixFn& R) {
    std::vector<ResidualPoint> out;
    for (const auto& s : w) {
        if (s.u_second.size() != s.u.size()) throw Error(ErrorKind::InvalidArgument, "samples carry no second derivative");
        const Eigen::MatrixXcd r = R(s.x);
        const Eigen::VectorXcd u = vec(s.u);
        ResidualPoint p;
        p.x = s.x;
        p.absolute = (vec(s.u_second) + r * u).norm();
        p.scale = r.norm() * u.norm();
        p.relative = p.scale > 0.0 ? p.absolute / p.scale : p.absolute;
        out.push_back(p);
    }
    return out;
}

std::vector<ResidualPoint> residual(const std::vector<WaveSample>& w, const ReducedProblem& prob, double lambda) {
    ReducedProblem p = prob;
    p.lambda = lambda;
    return residual(w, [&](double x) { return eval_R(p, x); });
}

std::vector<WaveSample> reference_integrate(const MatrixFn& R, double x_start, const Eigen::VectorXcd& u0,
                                            const Eigen::VectorXcd& du0, std::span<const double> outputs, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-4)) throw Error(ErrorKind::InvalidArgument, "tolerance must lie in [1e-12, 1e-4]");
    const Eigen::Index n = u0.size();
    State y(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        y[j] = u0(j);
        y[n + j] = du0(j);
    }
    OdeRhs f = [&](double x, const State& s, State& ds) {
        ds.resize(2 * n);
        const Eigen::Map<const Eigen::VectorXcd> u(s.data(), n);
        const Eigen::VectorXcd a = -R(x) * u;
        for (Eigen::Index j = 0; j < n; ++j) {
            ds[j] = s[n + j];
            ds[n + j] = a(j);
        }
    };
    // local control a decade below tol keeps the accumulated error near tol
    OdeOptions opt;
    opt.rtol = 0.1 * tol;
    opt.atol = 1e-4 * tol;
    const std::vector<State> ys = integrate_ode(f, x_start, y, outputs, opt);
    std::vector<WaveSample> out;
    for (size_t k = 0; k < ys.size(); ++k) {
        WaveSample w;
        w.x = outputs[k];
        w.u.assign(ys[k].begin(), ys[k].begin() + n);
        w.u_prime.assign(ys[k].begin() + n, ys[k].end());
        const Eigen::VectorXcd a = -R(w.x) * vec(w.u);
        w.u_second.assign(a.data(), a.data() + n);
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<WaveSample> filtered_reference(const MatrixFn& R, double x_start, const Eigen::VectorXcd& u_slow,
                                           const Eigen::VectorXcd& du_slow, const Eigen::VectorXcd& u_fast,
                                           const Eigen::VectorXcd& du_fast, const Eigen::VectorXcd& fast_dir,
                                           std::span<const double> outputs, double tol) {
    std::vector<WaveSample> a = reference_integrate(R, x_start, u_slow, du_slow, outputs, tol);
    const std::vector<WaveSample> b = reference_integrate(R, x_start, u_fast, du_fast, outputs, tol);
    if (a.empty()) return a;
    const cplx den = fast_dir.dot(vec(b.back().u));
    if (std::abs(den) == 0.0) throw Error(ErrorKind::InvalidArgument, "fast seed has no component along fast_dir");
    const cplx alpha = fast_dir.dot(vec(a.back().u)) / den;
    for (size_t k = 0; k < a.size(); ++k)
        for (size_t j = 0; j < a[k].u.size(); ++j) {
            a[k].u[j] -= alpha * b[k].u[j];
            a[k].u_prime[j] -= alpha * b[k].u_prime[j];
            a[k].u_second[j] -= alpha * b[k].u_second[j];
        }
    return a;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    const size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw Error(ErrorKind::InvalidArgument, "slope needs matching arrays of length >= 2");
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < n; ++k) {
        mx += std::log(xs[k]) / n;
        my += std::log(ys[k]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double dx = std::log(xs[k]) - mx;
        sxy += dx * (std::log(ys[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ScalingReport order_scaling(const ReducedProblem& prob, const ScalingSetup& setup, std::span<const double> lambdas,
                            std::span<const double> probe_x) {
    if (lambdas.size() < 3) throw Error(ErrorKind::InvalidArgument, "order scaling needs at least 3 lambda values");
    if (probe_x.empty()) throw Error(ErrorKind::InvalidArgument, "no probe points");
    std::vector<double> probes(probe_x.begin(), probe_x.end());
    std::sort(probes.begin(), probes.end());
    EngineConfig cfg;
    cfg.variant = setup.variant;
    cfg.branch = setup.branch;
    cfg.gauge = setup.gauge;
    cfg.m_max = setup.m_max;
    cfg.anchor = probes.front();
    const VectorEngine engine(prob, cfg);
    ScalingReport rep;
    for (double lam : lambdas) {
        const auto w = engine.wave(setup.sign, probes, lam);
        double worst = 0.0;
        for (const auto& r : residual(w, prob, lam)) worst = std::max(worst, r.relative);
        rep.lambdas.push_back(lam);
        rep.residuals.push_back(worst);
    }
    const bool floor_hit = std::any_of(rep.residuals.begin(), rep.residuals.end(), [](double r) { return r < 1e-13; });
    if (floor_hit) {
        rep.status = "NotMeasurable";
        return rep;
    }
    rep.slope = loglog_slope(rep.lambdas, rep.residuals);
    rep.status = "ok";
    return rep;
}

std::vector<Crossing> crossing_diagnostics(const ExprMatrix& G, const Params& params, double lo, double hi,
                                           int samples) {
    if (!(hi > lo) || samples < 3) throw Error(ErrorKind::InvalidArgument, "bad crossing search interval");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto gap = [&](double x) {
        try {
            return eigen_gap(G, params, x);
        } catch (const Error&) {
            return nan;
        }
    };
    std::vector<double> xs(samples), gs(samples);
    double scale = 0.0;
    for (int k = 0; k < samples; ++k) {
        xs[k] = lo + (hi - lo) * k / (samples - 1);
        gs[k] = gap(xs[k]);
        if (std::isfinite(gs[k])) scale = std::max(scale, gs[k]);
    }
    std::vector<Crossing> out;
    for (int k = 1; k + 1 < samples; ++k) {
        if (!std::isfinite(gs[k]) || !std::isfinite(gs[k - 1]) || !std::isfinite(gs[k + 1])) continue;
        if (!(gs[k] <= gs[k - 1] && gs[k] < gs[k + 1])) continue;
        const auto [xm, gm] = boost::math::tools::brent_find_minima(
            [&](double x) {
                const double v = gap(x);
                return std::isfinite(v) ? v : std::numeric_limits<double>::max();
            },
            xs[k - 1], xs[k + 1], std::numeric_limits<double>::digits);
        if (gm > 1e-6 * (1.0 + scale)) continue;
        // exponent from |D| ~ |x - x_cr|^p on both sides
        double psum = 0.0;
        int pn = 0;
        for (double side : {-1.0, 1.0}) {
            const double h1 = 1e-2 * (hi - lo) / 10.0, h2 = h1 / 10.0;
            const double a = xm + side * h1, b = xm + side * h2;
            if (a < lo || a > hi) continue;
            const double ga = gap(a), gb = gap(b);
            if (!(ga > 0.0 && gb > 0.0)) continue;
            psum += std::log(ga / gb) / std::log(h1 / h2);
            ++pn;
        }
        out.push_back({xm, pn ? psum / pn : nan, gm});
    }
    return out;
}

}  // namespace pia
