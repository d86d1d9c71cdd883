#include "pia/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pia/error.hpp"

namespace pia {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double err_norm(const State& y, const State& yn, const State& e, const OdeOptions& o) {
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
        const double r = std::abs(e[i]) / sc;
        s += r * r;
    }
    return y.empty() ? 0.0 : std::sqrt(s / y.size());
}

}  // namespace

std::vector<State> integrate_ode(const OdeRhs& f, double x0, State y0, std::span<const double> outputs,
                                 const OdeOptions& opt, OdeStats* stats) {
    std::vector<State> out;
    out.reserve(outputs.size());
    OdeStats st;
    const size_t n = y0.size();
    State y = std::move(y0), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), yn(n), err(n);
    double x = x0;
    double h = 0.0;
    bool have_k1 = false;

    auto stage = [&](State& dst, double xs, auto&& combine) {
        for (size_t i = 0; i < n; ++i) tmp[i] = combine(i);
        f(xs, tmp, dst);
        ++st.evaluations;
    };

    for (double target : outputs) {
        const double dir = target >= x ? 1.0 : -1.0;
        while (x != target) {
            if (!have_k1) {
                f(x, y, k1);
                ++st.evaluations;
                have_k1 = true;
            }
            if (h == 0.0) {
                double ny = 0.0, nf = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    const double sc = opt.atol + opt.rtol * std::abs(y[i]);
                    ny = std::max(ny, std::abs(y[i]) / sc);
                    nf = std::max(nf, std::abs(k1[i]) / sc);
                }
                h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
                h = std::min(h, std::abs(target - x));
            }
            h = std::abs(h);
            bool last = false;
            if (h >= std::abs(target - x)) {
                h = std::abs(target - x);
                last = true;
            }
            const double hs = dir * h;
            if (h < 1e-14 * std::max(1.0, std::abs(x)))
                throw Error(ErrorKind::StepSizeUnderflow, "at x=" + std::to_string(x));
            if (++st.steps > opt.max_steps)
                throw Error(ErrorKind::StepSizeUnderflow, "step budget exhausted at x=" + std::to_string(x));

            stage(k2, x + c2 * hs, [&](size_t i) { return y[i] + hs * (a21 * k1[i]); });
            stage(k3, x + c3 * hs, [&](size_t i) { return y[i] + hs * (a31 * k1[i] + a32 * k2[i]); });
            stage(k4, x + c4 * hs,
                  [&](size_t i) { return y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]); });
            stage(k5, x + c5 * hs, [&](size_t i) {
                return y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            });
            const double xe = last ? target : x + hs;
            stage(k6, xe, [&](size_t i) {
                return y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            });
            for (size_t i = 0; i < n; ++i)
                yn[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(xe, yn, k7);
            ++st.evaluations;
            for (size_t i = 0; i < n; ++i)
                err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double en = err_norm(y, yn, err, opt);
            const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (en <= 1.0) {
                x = xe;
                y.swap(yn);
                k1.swap(k7);
                h = h * fac;
            } else {
                ++st.rejected;
                h = h * std::min(fac, 1.0);
            }
        }
        out.push_back(y);
    }
    if (stats) *stats = st;
    return out;
}

}  // namespace pia
