#include "pia/vector_pia.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pia/error.hpp"

namespace pia {

namespace {

const cplx I(0.0, 1.0);

std::vector<TaylorJet> series_mul(const std::vector<TaylorJet>& a, const std::vector<TaylorJet>& b, int n,
                                  const TaylorJet& zero) {
    std::vector<TaylorJet> r(n + 1, zero);
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= k; ++j)
            if (j < static_cast<int>(a.size()) && k - j < static_cast<int>(b.size())) r[k] = add(r[k], mul(a[j], b[k - j]));
    return r;
}

JetVector vmadd(const JetVector& acc, const TaylorJet& c, const JetVector& v) { return vadd(acc, vscale(c, v)); }

bool kato_like(const EigenBranch& b, HermitianHint hint) {
    return b.gauge.kind == GaugeKind::kato || (b.gauge.kind == GaugeKind::normalized && hint == HermitianHint::real_symmetric);
}

double sign_pow(int eps, int k) { return (eps < 0 && k % 2 != 0) ? -1.0 : 1.0; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(TheoryVariant v) {
    switch (v) {
    case TheoryVariant::fulling_current: return "fulling";
    case TheoryVariant::wronskian_conserving: return "wronskian";
    case TheoryVariant::simplified_hermitian: return "simplified";
    case TheoryVariant::non_hermitian: return "nonhermitian";
    }
    return "fulling";
}

TheoryVariant parse_variant(const std::string& t) {
    if (t == "fulling" || t == "fulling_current" || t == "current") return TheoryVariant::fulling_current;
    if (t == "wronskian" || t == "wronskian_conserving") return TheoryVariant::wronskian_conserving;
    if (t == "simplified" || t == "simplified_hermitian") return TheoryVariant::simplified_hermitian;
    if (t == "nonhermitian" || t == "non_hermitian" || t == "non-hermitian") return TheoryVariant::non_hermitian;
    throw Error(ErrorKind::InvalidArgument, "unknown theory '" + t + "'");
}

bool is_hermitian_variant(TheoryVariant v) { return v != TheoryVariant::non_hermitian; }

bool fixes_parallel(TheoryVariant v) {
    return v == TheoryVariant::fulling_current || v == TheoryVariant::wronskian_conserving;
}

JetVector compute_b(int m, const CorrectionSet& h) {
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "b_m needs m >= 1");
    if (static_cast<int>(h.Y.size()) < m || static_cast<int>(h.s.size()) < m || static_cast<int>(h.b.size()) < m)
        throw Error(ErrorKind::InvalidArgument, "history incomplete below order " + std::to_string(m));
    const JetVector& s0 = h.s[0];
    const double x0 = h.x0;
    auto dz = [&](const TaylorJet& f) {
        if (f.order() < 1) throw Error(ErrorKind::InsufficientJetOrder, "jet exhausted at order m=" + std::to_string(m));
        return div(f.diff(), h.Q);
    };
    auto vdz = [&](const JetVector& v) {
        JetVector r;
        for (const auto& e : v) r.push_back(dz(e));
        return r;
    };
    const std::vector<TaylorJet> y(h.Y.begin(), h.Y.begin() + m);
    const TaylorJet zero(x0, h.Y[0].order());
    const auto p2 = series_mul(y, y, m, zero);
    const auto p3 = series_mul(p2, y, m, zero);
    const auto p4 = series_mul(p2, p2, m, zero);

    JetVector acc = vscale(sub(p2[m], p4[m]), s0);
    for (int sg = 1; sg <= m - 1; ++sg) {
        const JetVector t = vadd(h.s[sg], vscale(2.0, vsub(vscale(h.Y[sg], s0), h.b[sg])));
        acc = vmadd(acc, p2[m - sg], t);
        acc = vmadd(acc, -1.0 * p4[m - sg], h.s[sg]);
    }
    std::vector<JetVector> ds(m);
    for (int sg = 0; sg <= m - 1; ++sg) {
        ds[sg] = vdz(h.s[sg]);
        acc = vmadd(acc, 2.0 * I * p3[m - 1 - sg], ds[sg]);
    }
    if (m >= 2) {
        std::vector<TaylorJet> dY(m - 1), ddY(m - 1);
        for (int a = 0; a <= m - 2; ++a) {
            dY[a] = dz(h.Y[a]);
            ddY[a] = dz(dY[a]);
        }
        for (int sg = 0; sg <= m - 2; ++sg) {
            const JetVector dds = vdz(ds[sg]);
            for (int a = 0; a <= m - 2 - sg; ++a) {
                const int b = m - 2 - sg - a;
                const TaylorJet yy = mul(h.Y[a], h.Y[b]);
                const TaylorJet cs = add(sub(mul(h.eps0, yy), 0.5 * mul(h.Y[a], ddY[b])), 0.75 * mul(dY[a], dY[b]));
                acc = vmadd(acc, yy, dds);
                acc = vmadd(acc, -1.0 * mul(h.Y[a], dY[b]), ds[sg]);
                acc = vmadd(acc, cs, h.s[sg]);
            }
        }
    }
    return vscale(cplx(0.5), acc);
}

PerpSolution solve_s_perp(const JetVector& b_m, const CorrectionSet& h, const ComplementBasis& comp,
                          TheoryVariant variant) {
    const EigenBranch& br = h.branch;
    const JetVector& s0 = br.s0;
    const int n = br.n();
    const TaylorJet& q2 = h.Qsq;
    const double x0 = h.x0;
    PerpSolution out;
    if (variant != TheoryVariant::non_hermitian) {
        if (n == 2) {
            const JetVector& sp = comp.vectors.at(0);
            const TaylorJet d = sub(inner(sp, matvec(br.G, sp)), mul(inner(sp, sp), q2));
            if (std::abs(d[0]) < 1e-13 * (1.0 + values(br.G).norm()))
                throw Error(ErrorKind::CrossingPoint, "complement denominator vanishes at x=" + std::to_string(x0));
            const TaylorJet c = -2.0 * mul(q2, div(inner(sp, b_m), d));
            out.c_perp = c[0];
            out.s_perp = vscale(c, sp);
            return out;
        }
        // (G - Q^2 + P) s = -2 Q^2 (b - P b), P the projector on s0
        const TaylorJet nn = inner(s0, s0);
        JetMatrix m(n, JetVector(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                TaylorJet e = add(br.G[i][j], div(mul(s0[i], s0[j].conj()), nn));
                if (i == j) e = sub(e, q2);
                m[i][j] = e;
            }
        const TaylorJet proj = div(inner(s0, b_m), nn);
        const JetVector rhs = vscale(-2.0 * q2, vsub(b_m, vscale(proj, s0)));
        out.s_perp = solve(m, rhs, ErrorKind::CrossingPoint);
        out.c_perp = norm(out.s_perp);
        return out;
    }
    // non-hermitian: eliminate component 1 with (s0, s_m) = 0
    const int k = n - 1;
    const TaylorJet s01 = s0[0];
    const TaylorJet a01 = mul(s01.conj(), s01);
    const TaylorJet g11 = sub(br.G[0][0], q2);
    JetMatrix d(k, JetVector(k));
    JetVector rhs(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            TaylorJet e = mul(a01, i == j ? sub(br.G[i + 1][j + 1], q2) : br.G[i + 1][j + 1]);
            e = add(e, mul(g11, mul(s0[i + 1], s0[j + 1].conj())));
            e = sub(e, mul(s01.conj(), mul(s0[i + 1], br.G[0][j + 1])));
            e = sub(e, mul(s01, mul(br.G[i + 1][0], s0[j + 1].conj())));
            d[i][j] = e;
        }
        rhs[i] = 2.0 * mul(q2, sub(mul(b_m[0], s0[i + 1]), mul(s01, b_m[i + 1])));
    }
    const JetVector t = solve(d, rhs, ErrorKind::MinorSingular);
    out.s_perp = JetVector(n);
    TaylorJet s1(x0, min_order(t));
    for (int i = 0; i < k; ++i) {
        out.s_perp[i + 1] = mul(s01.conj(), t[i]);
        s1 = sub(s1, mul(s0[i + 1].conj(), t[i]));
    }
    out.s_perp[0] = s1;
    out.c_perp = k == 1 ? t[0][0] : norm(t);
    return out;
}

TaylorJet compute_Y(const JetVector& b_m, const JetVector& s_m, const CorrectionSet& h, TheoryVariant variant) {
    const EigenBranch& br = h.branch;
    const JetVector& s0 = br.s0;
    if (variant != TheoryVariant::non_hermitian) return div(inner(s0, b_m), inner(s0, s0));
    // row p of Y s0 = b + (G - Q^2) s / (2 Q^2), p the largest component of s0
    const Eigen::VectorXcd v = values(s0);
    Eigen::Index p;
    v.cwiseAbs().maxCoeff(&p);
    TaylorJet acc(h.x0, min_order(s_m));
    for (int j = 0; j < br.n(); ++j) {
        const TaylorJet g = j == p ? sub(br.G[p][j], h.Qsq) : br.G[p][j];
        acc = add(acc, mul(g, s_m[j]));
    }
    return div(add(b_m[p], div(acc, 2.0 * h.Qsq)), s0[p]);
}

ParallelTerms parallel_terms(int m, const CorrectionSet& h, const JetVector& s_perp, TheoryVariant variant) {
    const int eps = variant == TheoryVariant::wronskian_conserving ? -1 : 1;
    const JetVector& e1 = h.branch.s0;
    const JetVector de1 = vdiff(e1);
    auto ds = [&](int a) { return vdiff(h.s[a]); };
    const TaylorJet base = inner(de1, s_perp);
    ParallelTerms t{base, TaylorJet(h.x0, min_order(s_perp))};
    if (m % 2 == 0) {
        const int n = m / 2;
        TaylorJet g = sub(base, 0.5 * sign_pow(eps, n) * inner(h.s[n], ds(n)));
        t.local = -0.5 * sign_pow(eps, n) * inner(h.s[n], h.s[n]);
        for (int a = 1; a <= n - 1; ++a) {
            g = sub(g, sign_pow(eps, a) * inner(h.s[m - a], ds(a)));
            t.local = sub(t.local, sign_pow(eps, a) * inner(h.s[a], h.s[m - a]));
        }
        t.rate = 2.0 * I * g.imag();
    } else {
        const int n = (m - 1) / 2;
        TaylorJet g = base;
        for (int a = 1; a <= n; ++a) {
            g = add(g, sign_pow(eps, a) * inner(ds(a), h.s[m - a]));
            t.local = sub(t.local, sign_pow(eps, a) * inner(h.s[a], h.s[m - a]));
        }
        t.rate = eps > 0 ? 2.0 * I * g.imag() : 2.0 * g.real();
    }
    return t;
}

CorrectionSet vector_corrections(const ReducedProblem& prob, const EigenBranch& br, TheoryVariant variant,
                                 int m_max, std::span<const cplx> integrals, int q_sign) {
    if (m_max < 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
    const int n = br.n();
    const double x0 = br.x0;
    const bool degenerate = n == 1 || br.d == n;
    if (is_hermitian_variant(variant) && prob.hint == HermitianHint::general)
        throw Error(ErrorKind::InvalidArgument, std::string(to_string(variant)) + " theory needs a hermitian problem");
    if (br.d > 1 && !degenerate) throw Error(ErrorKind::UnsupportedDegeneracy, "partially degenerate eigenvalue");
    if (fixes_parallel(variant) && !degenerate && !kato_like(br, prob.hint))
        throw Error(ErrorKind::GaugeNotFixed, std::string(to_string(variant)) + " theory needs the Kato gauge");

    CorrectionSet h;
    h.x0 = x0;
    h.m_max = m_max;
    h.branch = br;
    h.Qsq = br.Qsq;
    h.Q = (q_sign >= 0 ? 1.0 : -1.0) * q_root(br.Qsq);
    h.eps0 = epsilon0(br, prob.a, prob.params);
    const int K = br.Qsq.order();
    const JetVector zero = vzero(x0, K, n);
    h.Y = {TaylorJet::constant(x0, K, 1.0)};
    h.s = {br.s0};
    h.s_perp = {zero};
    h.b = {zero};
    h.c_perp = {0.0};
    h.c_par = {0.0};
    h.c_par_jet = {TaylorJet(x0, K)};
    h.c_rate = {0.0};
    h.self_check = {0.0};
    const ComplementBasis comp = degenerate ? ComplementBasis{} : complement_basis(br);

    for (int m = 1; m <= m_max; ++m) {
        const JetVector b = compute_b(m, h);
        JetVector sp = zero, s = zero;
        TaylorJet y, cj(x0, K);
        cplx cperp = 0.0, rate = 0.0;
        if (degenerate) {
            y = div(inner(br.s0, b), inner(br.s0, br.s0));
        } else {
            const PerpSolution ps = solve_s_perp(b, h, comp, variant);
            sp = ps.s_perp;
            cperp = ps.c_perp;
            y = compute_Y(b, sp, h, variant);
            s = sp;
            if (fixes_parallel(variant)) {
                const ParallelTerms pt = parallel_terms(m, h, sp, variant);
                const cplx i0 = static_cast<int>(integrals.size()) >= m ? integrals[m - 1] : cplx(0.0);
                cj = add(pt.rate.integrate(i0), pt.local);
                rate = pt.rate[0];
                s = vadd(sp, vscale(cj, br.s0));
            }
        }
        // order-m equation: Y s0 - (G - Q^2) s / (2 Q^2) - b = 0
        double resid = 0.0;
        if (!degenerate) {
            const Eigen::MatrixXcd g = values(br.G);
            const cplx q2 = h.Qsq[0];
            const Eigen::VectorXcd sv = values(s), bv = values(b), s0v = values(br.s0);
            const Eigen::VectorXcd r = y[0] * s0v - (g * sv - q2 * sv) / (2.0 * q2) - bv;
            const double scale = bv.norm() + std::abs(y[0]) * s0v.norm() + (g * sv).norm() / std::abs(2.0 * q2) + 1e-300;
            resid = r.norm() / scale;
            if (resid > 1e-6)
                throw Error(ErrorKind::CompatibilityViolation, "order " + std::to_string(m) + " residual " + fmt(resid) +
                                                                   " at x=" + std::to_string(x0));
            if (resid > 1e-8) h.warnings.push_back("order " + std::to_string(m) + ": self-check residual " + fmt(resid));
        }
        h.b.push_back(b);
        h.s_perp.push_back(sp);
        h.s.push_back(s);
        h.Y.push_back(y);
        h.c_perp.push_back(cperp);
        h.c_par_jet.push_back(cj);
        h.c_par.push_back(cj[0]);
        h.c_rate.push_back(rate);
        h.self_check.push_back(resid);
    }

    if (fixes_parallel(variant) && !degenerate) {
        const int eps = variant == TheoryVariant::wronskian_conserving ? -1 : 1;
        for (int m = 1; m <= m_max; ++m) {
            cplx sum = 0.0;
            double scale = 0.0;
            for (int a = 0; a <= m; ++a) {
                const cplx t = sign_pow(eps, a) * inner(h.s[a], vdiff(h.s[m - a]))[0];
                sum += t;
                scale += std::abs(t);
            }
            h.constraint.push_back(std::abs(sum) / (scale + 1e-300));
        }
    }
    for (int m = 1; m <= m_max; ++m) {
        if (std::abs(h.Y[m][0]) > 1.0) h.warnings.push_back("order " + std::to_string(m) + ": |Y| = " + fmt(std::abs(h.Y[m][0])) + " > 1");
        if (std::abs(h.c_perp[m]) > 1.0 + 1e-9) h.warnings.push_back("order " + std::to_string(m) + ": |c_perp| = " + fmt(std::abs(h.c_perp[m])) + " > 1");
        if (std::abs(h.c_par[m]) > 1.0) h.warnings.push_back("order " + std::to_string(m) + ": |c| = " + fmt(std::abs(h.c_par[m])) + " > 1");
    }
    return h;
}

std::vector<cplx> p_coefficients(const CorrectionSet& c) {
    std::vector<cplx> p;
    const cplx q2 = c.Qsq[0];
    for (int m = 0; m <= c.m_max; ++m) {
        cplx s = 0.0;
        for (int a = 0; a <= m; ++a) s += c.Y[a][0] * c.Y[m - a][0];
        p.push_back(q2 * s);
    }
    return p;
}

Gauge default_gauge(TheoryVariant v, HermitianHint hint) {
    if (v == TheoryVariant::non_hermitian || hint == HermitianHint::general) return Gauge::raw();
    return Gauge::kato();
}

VectorEngine::VectorEngine(const ReducedProblem& prob, EngineConfig cfg)
    : prob_(prob),
      cfg_(std::move(cfg)),
      ev_(prob_, cfg_.branch, cfg_.gauge ? *cfg_.gauge : default_gauge(cfg_.variant, prob_.hint), cfg_.anchor) {
    if (cfg_.m_max < 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
    if (is_hermitian_variant(cfg_.variant) && prob_.hint == HermitianHint::general)
        throw Error(ErrorKind::InvalidArgument, std::string(to_string(cfg_.variant)) + " theory needs a hermitian problem");
    needs_i_ = fixes_parallel(cfg_.variant) && !ev_.fully_degenerate() && cfg_.m_max > 0;
}

int VectorEngine::integral_count() const { return (ev_.needs_theta() ? 1 : 0) + (needs_i_ ? cfg_.m_max : 0); }

CorrectionSet VectorEngine::local(double x, const State& st) const {
    const int off = ev_.needs_theta() ? 1 : 0;
    const cplx theta = off ? st[0] : cplx(0.0);
    const EigenBranch br = ev_.at(x, jet_order(), theta);
    std::span<const cplx> ints;
    if (needs_i_) ints = std::span<const cplx>(st.data() + off, cfg_.m_max);
    return vector_corrections(prob_, br, cfg_.variant, cfg_.m_max, ints, cfg_.q_sign);
}

std::vector<State> VectorEngine::march(std::span<const double> xs, int wave_sign, double lambda) const {
    const int ni = integral_count();
    const int size = ni + (wave_sign != 0 ? 1 : 0);
    const double a = cfg_.anchor;
    std::vector<State> out(xs.size(), State(size, 0.0));
    if (size == 0) return out;
    const double sg = wave_sign >= 0 ? 1.0 : -1.0;
    OdeRhs rhs = [&](double x, const State& y, State& dy) {
        dy.assign(size, 0.0);
        int k = 0;
        if (ev_.needs_theta()) dy[k++] = ev_.theta_rate(x);
        const bool need_local = needs_i_ || wave_sign != 0;
        if (!need_local) return;
        const CorrectionSet c = local(x, y);
        if (needs_i_)
            for (int m = 1; m <= cfg_.m_max; ++m) dy[k++] = c.c_rate[m];
        if (wave_sign != 0) {
            cplx ysum = 0.0, lp = 1.0;
            for (int m = 0; m <= cfg_.m_max; ++m) {
                ysum += c.Y[m][0] * lp;
                lp *= sg * lambda;
            }
            dy[k] = sg * c.Q[0] * ysum;
        }
    };
    OdeOptions opt;
    opt.rtol = cfg_.rtol;
    opt.atol = cfg_.atol;
    std::vector<size_t> up, down;
    for (size_t i = 0; i < xs.size(); ++i) (xs[i] >= a ? up : down).push_back(i);
    std::sort(up.begin(), up.end(), [&](size_t p, size_t q) { return xs[p] < xs[q]; });
    std::sort(down.begin(), down.end(), [&](size_t p, size_t q) { return xs[p] > xs[q]; });
    for (const auto* idx : {&up, &down}) {
        if (idx->empty()) continue;
        std::vector<double> pts;
        for (size_t i : *idx) pts.push_back(xs[i]);
        const std::vector<State> ys = integrate_ode(rhs, a, State(size, 0.0), pts, opt);
        for (size_t j = 0; j < idx->size(); ++j) out[(*idx)[j]] = ys[j];
    }
    return out;
}

CorrectionSet VectorEngine::at(double x) const {
    const double xs[1] = {x};
    return on_grid(xs).front();
}

std::vector<CorrectionSet> VectorEngine::on_grid(std::span<const double> xs) const {
    const std::vector<State> st = march(xs, 0, 0.0);
    std::vector<CorrectionSet> out;
    out.reserve(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out.push_back(local(xs[i], st[i]));
    return out;
}

std::vector<WaveSample> VectorEngine::wave(int sign, std::span<const double> grid, double lambda,
                                           std::vector<std::string>* warnings) const {
    if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
    for (size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
    const double sg = sign >= 0 ? 1.0 : -1.0;
    const std::vector<State> st = march(grid, sign >= 0 ? 1 : -1, lambda);
    const bool align = prob_.hint == HermitianHint::real_symmetric && ev_.gauge().kind != GaugeKind::raw;
    std::vector<WaveSample> out;
    Eigen::VectorXcd prev_s0;
    double flip = 1.0;
    bool warned = false;
    for (size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        CorrectionSet c;
        try {
            c = local(x, st[k]);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::TurningPoint) throw Error(ErrorKind::TurningPointOnGrid, e.what());
            throw;
        }
        const Eigen::VectorXcd s0v = values(c.s[0]);
        if (align && k > 0 && prev_s0.dot(s0v).real() < 0.0) flip = -flip;
        prev_s0 = s0v;
        const int n = c.n();
        const int K = c.Y[0].order();
        JetVector s = vzero(x, K, n);
        TaylorJet y = TaylorJet::constant(x, K, 0.0);
        cplx lp = 1.0;
        for (int m = 0; m <= c.m_max; ++m) {
            s = vadd(s, vscale(lp, c.s[m]));
            y = add(y, lp * c.Y[m]);
            lp *= sg * lambda;
        }
        s = vscale(cplx(flip), s);
        if (y.order() < 2 || min_order(s) < 2) throw Error(ErrorKind::InsufficientJetOrder, "wave assembly needs order >= 2");
        if (y[0].real() <= 0.0 && !warned) {
            warned = true;
            if (warnings) warnings->push_back("NonPositiveY: Re Y" + std::string(sign >= 0 ? "+" : "-") + " <= 0 at x=" + std::to_string(x));
        }
        const TaylorJet q = sg * mul(c.Q, y);
        const cplx q0 = q[0], q1 = q[1], q2 = 2.0 * q[2];
        if (std::abs(q0) == 0.0) throw Error(ErrorKind::TurningPointOnGrid, "q vanishes at x=" + std::to_string(x));
        const cplx kappa = normal_form_factor(sg * c.Q[0]);
        const cplx phase = st[k].back() / lambda;
        const cplx amp = std::pow(kappa * q0, -0.5) * std::exp(I * phase);
        const cplx g = I * q0 / lambda - q1 / (2.0 * q0);
        const cplx gp = I * q1 / lambda - q2 / (2.0 * q0) + q1 * q1 / (2.0 * q0 * q0);
        WaveSample w;
        w.x = x;
        w.phase = phase;
        for (int j = 0; j < n; ++j) {
            const cplx s0 = s[j][0], s1 = s[j][1], s2 = 2.0 * s[j][2];
            w.u.push_back(s0 * amp);
            w.u_prime.push_back((s1 + s0 * g) * amp);
            w.u_second.push_back((s2 + 2.0 * s1 * g + s0 * (gp + g * g)) * amp);
        }
        out.push_back(std::move(w));
        if (warnings)
            for (const auto& wmsg : c.warnings) warnings->push_back("x=" + std::to_string(x) + " " + wmsg);
    }
    return out;
}

}  // namespace pia
