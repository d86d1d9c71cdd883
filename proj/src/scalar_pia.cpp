#include "pia/scalar_pia.hpp"

#include <cmath>

#include "pia/error.hpp"
#include "pia/quadrature.hpp"
#include "pia/spectral.hpp"

namespace pia {

namespace {

// Cauchy product of two series of jets, truncated at index n; missing entries count as zero
std::vector<TaylorJet> series_mul(const std::vector<TaylorJet>& a, const std::vector<TaylorJet>& b, int n,
                                  const TaylorJet& zero) {
    std::vector<TaylorJet> r(n + 1, zero);
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= k; ++j)
            if (j < static_cast<int>(a.size()) && k - j < static_cast<int>(b.size())) r[k] = add(r[k], mul(a[j], b[k - j]));
    return r;
}

}  // namespace

ScalarCorrections scalar_corrections(const TaylorJet& eps0, const TaylorJet& qsq, int n_max) {
    if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 0");
    if (eps0.order() < 2 * n_max || (n_max > 0 && qsq.order() < 1))
        throw Error(ErrorKind::InsufficientJetOrder, "eps0 jet of order " + std::to_string(eps0.order()) +
                                                         " cannot carry Y up to order " + std::to_string(2 * n_max));
    if (std::abs(qsq[0]) < qsq.lead_tol()) throw Error(ErrorKind::TurningPoint, "Q^2 vanishes at x=" + std::to_string(qsq.center()));
    const double x0 = eps0.center();
    ScalarCorrections out;
    out.eps0 = eps0;
    out.Y.push_back(TaylorJet::constant(x0, eps0.order(), 1.0));
    const TaylorJet inv_q2 = 1.0 / qsq;
    const TaylorJet half_log_rate = 0.5 * div(qsq.diff(), qsq);
    for (int n = 1; n <= n_max; ++n) {
        const TaylorJet zero(x0, eps0.order());
        const auto p2 = series_mul(out.Y, out.Y, n, zero);
        const auto p4 = series_mul(p2, p2, n, zero);
        TaylorJet acc = sub(p2[n], p4[n]);
        for (int a = 0; a <= n - 1; ++a) {
            const int b = n - 1 - a;
            const TaylorJet& ya = out.Y[a];
            const TaylorJet& yb = out.Y[b];
            TaylorJet term = mul(eps0, mul(ya, yb));
            if (a > 0 || b > 0) {
                const TaylorJet da = ya.diff(), db = yb.diff();
                const TaylorJet dzdz = mul(da, db);  // Y_a'(x) Y_b'(x)
                const TaylorJet ddb = mul(inv_q2, sub(db.diff(), mul(half_log_rate, db)));
                term = add(term, sub(0.75 * mul(inv_q2, dzdz), 0.5 * mul(ya, ddb)));
            }
            acc = add(acc, term);
        }
        out.Y.push_back(0.5 * acc);
    }
    return out;
}

TaylorJet truncate_q(const TaylorJet& qsq, const ScalarCorrections& corr, double lambda, int N, int sign) {
    if (N > corr.n_max()) throw Error(ErrorKind::InvalidArgument, "N exceeds the computed corrections");
    TaylorJet y = corr.Y[0];
    double l2 = 1.0;
    for (int n = 1; n <= N; ++n) {
        l2 *= lambda * lambda;
        y = add(y, l2 * corr.Y[n]);
    }
    return (sign >= 0 ? 1.0 : -1.0) * mul(q_root(qsq), y);
}

cplx normal_form_factor(cplx q) {
    const cplx q2 = q * q;
    if (std::abs(q2.imag()) <= 1e-12 * std::abs(q2) && std::abs(q) > 0.0) return std::abs(q) / q;
    return 1.0;
}

std::vector<WaveSample> assemble_scalar_wave(const QJetFn& q, int sign, const std::vector<double>& grid,
                                             double anchor, double lambda) {
    const double sg = sign >= 0 ? 1.0 : -1.0;
    auto qjet = [&](double x) {
        try {
            TaylorJet j = q(x);
            if (j.order() < 2) throw Error(ErrorKind::InsufficientJetOrder, "q jet needs order >= 2");
            if (std::abs(j[0]) == 0.0) throw Error(ErrorKind::TurningPointOnGrid, "q vanishes at x=" + std::to_string(x));
            return sg * j;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::TurningPoint) throw Error(ErrorKind::TurningPointOnGrid, e.what());
            throw;
        }
    };
    const std::vector<cplx> phi = cumulative_integral([&](double x) { return qjet(x)[0]; }, grid, anchor);
    std::vector<WaveSample> out;
    const cplx i(0.0, 1.0);
    for (size_t k = 0; k < grid.size(); ++k) {
        const TaylorJet qj = qjet(grid[k]);
        const cplx q0 = qj[0], q1 = qj[1], q2 = 2.0 * qj[2];
        const cplx kappa = normal_form_factor(q0);
        const cplx phase = phi[k] / lambda;
        const cplx u = std::pow(kappa * q0, -0.5) * std::exp(i * phase);
        const cplx g = i * q0 / lambda - q1 / (2.0 * q0);
        const cplx gp = i * q1 / lambda - q2 / (2.0 * q0) + q1 * q1 / (2.0 * q0 * q0);
        WaveSample s;
        s.x = grid[k];
        s.u = {u};
        s.u_prime = {u * g};
        s.u_second = {u * (gp + g * g)};
        s.phase = phase;
        out.push_back(std::move(s));
    }
    return out;
}

cplx model_epsilon00(const SingularityModel& model, const Expression& d, double x0, const Params& params) {
    if (x0 == 0.0) throw Error(ErrorKind::ModelSingularity, "model evaluated at x=0");
    const TaylorJet dj = eval_expr_jet(d, x0, 2, params);
    const cplx d0 = dj[0], d1 = dj[1], d2 = 2.0 * dj[2];
    const double x = x0;
    if (model.kind == SingularityModel::Kind::bounded) {
        const cplx den = model.c + d0;
        if (std::abs(den) == 0.0) throw Error(ErrorKind::ModelSingularity, "c0 + d vanishes at x=" + std::to_string(x0));
        const cplx r = x * d1 / den;
        return -0.25 / den * (1.0 + (x * d1 + x * x * d2) / den - 1.25 * r * r);
    }
    if (std::abs(1.0 + d0) == 0.0) throw Error(ErrorKind::ModelSingularity, "1 + d vanishes at x=" + std::to_string(x0));
    if (std::abs(model.c) == 0.0) throw Error(ErrorKind::ModelSingularity, "model constant c is zero");
    const cplx gam = 1.0 / (1.0 + d0);
    const cplx c = model.c, eta = model.eta;
    switch (model.kind) {
    case SingularityModel::Kind::power: {
        const double m = model.m;
        const cplx xd = x * d1;
        return gam / (16.0 * c * std::pow(x, m + 2.0)) *
               (m * (m + 4.0) + 2.0 * gam * (m * xd - 2.0 * x * x * d2) + 5.0 * gam * gam * xd * xd);
    }
    case SingularityModel::Kind::exp_pole: {
        const cplx x2d = x * x * d1;
        return gam / (16.0 * c * std::exp(eta / x)) *
               (eta * eta - 2.0 * gam * ((4.0 * x + eta) * x * x * d1 + 2.0 * std::pow(x, 4) * d2) +
                5.0 * gam * gam * x2d * x2d);
    }
    case SingularityModel::Kind::exp_flat: {
        const cplx x2d = x * x * d1;
        return gam / (16.0 * c * std::pow(x, 4) * std::exp(eta / x)) *
               (eta * (eta - 8.0 * x) - 2.0 * gam * (eta * x * x * d1 + 2.0 * std::pow(x, 4) * d2) +
                5.0 * gam * gam * x2d * x2d);
    }
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model");
}

Expression model_qsq(const SingularityModel& model, const Expression& d) {
    const Expression x = Expression::variable(), one = Expression::number(1.0);
    const Expression c = Expression::number(model.c), eta = Expression::number(model.eta);
    switch (model.kind) {
    case SingularityModel::Kind::power: return c * pow(x, Expression::number(model.m)) * (one + d);
    case SingularityModel::Kind::exp_pole:
        return c * pow(x, Expression::number(-4.0)) * apply(Op::Exp, eta / x) * (one + d);
    case SingularityModel::Kind::exp_flat: return c * apply(Op::Exp, eta / x) * (one + d);
    case SingularityModel::Kind::bounded: return pow(x, Expression::number(-2.0)) * (c + d);
    }
    return Expression();
}

}  // namespace pia
