#include "pia/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "pia/error.hpp"
#include "pia/quadrature.hpp"

namespace pia {

const char* to_string(GaugeKind k) {
    switch (k) {
    case GaugeKind::raw: return "raw";
    case GaugeKind::normalized: return "normalized";
    case GaugeKind::kato: return "kato";
    }
    return "kato";
}

double crossing_tol(const Eigen::MatrixXcd& g) {
    const double n = g.norm();
    return 1e-8 * (1.0 + n * n);
}

cplx q_root(cplx qsq) {
    if (qsq.real() >= 0.0) return std::sqrt(qsq);
    return cplx(0.0, -1.0) * std::sqrt(-qsq);
}

TaylorJet q_root(const TaylorJet& qsq) {
    if (std::abs(qsq[0]) < qsq.lead_tol()) throw Error(ErrorKind::TurningPoint, "Q^2 vanishes at x=" + std::to_string(qsq.center()));
    return sqrt(qsq, q_root(qsq[0]));
}

namespace {

std::string at_x(double x) { return "at x=" + std::to_string(x); }

// eigenvalues sorted by ascending real part, ties by imaginary part
std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXcd& g) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, false);
    std::vector<cplx> v(es.eigenvalues().data(), es.eigenvalues().data() + g.rows());
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return v;
}

// null vector of the 2x2 matrix g - lambda, from the better-conditioned row
Eigen::VectorXcd null_vector_2x2(const Eigen::MatrixXcd& g, cplx lambda) {
    Eigen::VectorXcd v(2);
    const double r1 = std::abs(g(0, 1)) + std::abs(g(0, 0) - lambda);
    const double r2 = std::abs(g(1, 0)) + std::abs(g(1, 1) - lambda);
    if (r1 >= r2) v << g(0, 1), lambda - g(0, 0);
    else v << lambda - g(1, 1), g(1, 0);
    if (v.norm() == 0.0) v << 1.0, 0.0;
    return v;
}

Eigen::VectorXcd null_vector(const Eigen::MatrixXcd& g, cplx lambda) {
    if (g.rows() == 2) return null_vector_2x2(g, lambda);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, true);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < g.rows(); ++k)
        if (std::abs(es.eigenvalues()(k) - lambda) < std::abs(es.eigenvalues()(best) - lambda)) best = k;
    return es.eigenvectors().col(best);
}

int argmax_abs(const Eigen::VectorXcd& v) {
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    return static_cast<int>(i);
}

TaylorJet positive_sqrt(const TaylorJet& a) { return sqrt(a, std::sqrt(std::abs(a[0]))); }

JetVector normalize(const JetVector& v) {
    const TaylorJet nrm = positive_sqrt(inner(v, v));
    JetVector r(v.size());
    for (size_t j = 0; j < v.size(); ++j) r[j] = div(v[j], nrm);
    return r;
}

TaylorJet jet_delta(const JetMatrix& g) {
    const TaylorJet d = g[0][0] - g[1][1];
    return d * d + 4.0 * g[0][1] * g[1][0];
}

}  // namespace

EigenJets eigen_perturbation(const JetMatrix& g, cplx lambda0, const Eigen::VectorXcd& v0in, int pivot) {
    const int n = static_cast<int>(g.size());
    const int K = g[0][0].order();
    const double x0 = g[0][0].center();
    if (std::abs(v0in(pivot)) == 0.0) throw Error(ErrorKind::DegenerateParameterization, "pivot component vanishes " + at_x(x0));
    const Eigen::VectorXcd v0 = v0in / v0in(pivot);
    std::vector<Eigen::MatrixXcd> gk(K + 1, Eigen::MatrixXcd(n, n));
    for (int k = 0; k <= K; ++k)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) gk[k](r, c) = g[r][c][k];
    Eigen::MatrixXcd m = gk[0] - lambda0 * Eigen::MatrixXcd::Identity(n, n);
    m.col(pivot) = -v0;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (lu.rank() < n || lu.rcond() < 1e-14)
        throw Error(ErrorKind::CrossingPoint, "eigenvalue is not simple " + at_x(x0));
    std::vector<Eigen::VectorXcd> v(K + 1);
    std::vector<cplx> lam(K + 1);
    v[0] = v0;
    lam[0] = lambda0;
    for (int k = 1; k <= K; ++k) {
        Eigen::VectorXcd r = Eigen::VectorXcd::Zero(n);
        for (int j = 1; j <= k; ++j) r -= gk[j] * v[k - j];
        for (int j = 1; j < k; ++j) r += lam[j] * v[k - j];
        Eigen::VectorXcd z = lu.solve(r);
        lam[k] = z(pivot);
        z(pivot) = 0.0;
        v[k] = z;
    }
    EigenJets out{TaylorJet(x0, lam), JetVector(n)};
    for (int r = 0; r < n; ++r) {
        std::vector<cplx> c(K + 1);
        for (int k = 0; k <= K; ++k) c[k] = v[k](r);
        out.v[r] = TaylorJet(x0, std::move(c));
    }
    return out;
}

EigenBranch eigen_n2_closed_form(const ExprMatrix& gexpr, const Params& params, double x0, int order, int sign,
                                 const std::optional<Expression>& gauge_g) {
    if (gexpr.size() != 2) throw Error(ErrorKind::InvalidArgument, "closed form needs N=2");
    EigenBranch b;
    b.x0 = x0;
    b.G = eval_matrix_jet(gexpr, x0, order, params);
    const Eigen::MatrixXcd g0 = values(b.G);
    const TaylorJet delta = jet_delta(b.G);
    if (std::abs(delta[0]) < crossing_tol(g0)) throw Error(ErrorKind::CrossingPoint, "Delta vanishes " + at_x(x0));
    const TaylorJet sq = sqrt(delta, std::sqrt(delta[0]));
    b.Qsq = 0.5 * (b.G[0][0] + b.G[1][1] + (sign >= 0 ? 1.0 : -1.0) * sq);
    b.branch_id = sign >= 0 ? 1 : 0;
    const double tol = 1e-13 * (1.0 + g0.cwiseAbs().maxCoeff());
    if (std::abs(g0(0, 1)) < tol && std::abs(g0(1, 0)) < tol && std::abs(g0(0, 0) - g0(1, 1)) > tol)
        throw Error(ErrorKind::DegenerateParameterization, "both off-diagonal entries vanish " + at_x(x0));
    b.pivot = std::abs(g0(0, 1)) >= std::abs(g0(1, 0)) ? 0 : 1;
    const Eigen::VectorXcd v0 = null_vector_2x2(g0, b.Qsq[0]);
    if (std::abs(v0(b.pivot)) < 1e-10 * v0.norm())
        throw Error(ErrorKind::DegenerateParameterization, "eigenvector parameterization breaks down " + at_x(x0));
    const JetVector v = eigen_perturbation(b.G, b.Qsq[0], v0, b.pivot).v;
    if (gauge_g) {
        b.gauge = Gauge::raw(*gauge_g);
        b.s0 = vscale(eval_expr_jet(*gauge_g, x0, order, params), v);
    } else {
        b.gauge = Gauge::normalized();
        b.s0 = normalize(v);
    }
    return b;
}

std::vector<EigenBranch> eigen_track(const ExprMatrix& gexpr, const Params& params, const std::vector<double>& grid,
                                     int seed, int order) {
    const int n = static_cast<int>(gexpr.size());
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "eigen_track needs N >= 2");
    if (seed < 0 || seed >= n) throw Error(ErrorKind::InvalidArgument, "branch seed out of range");
    for (size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
    std::vector<EigenBranch> out;
    cplx prev = 0.0, prev2 = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        const Eigen::MatrixXcd g0 = eval_matrix(gexpr, x, params);
        const std::vector<cplx> ev = sorted_eigenvalues(g0);
        cplx lam;
        if (k == 0) {
            lam = ev[seed];
        } else {
            const cplx pred = k >= 2 ? prev + (prev - prev2) * (x - grid[k - 1]) / (grid[k - 1] - grid[k - 2]) : prev;
            std::vector<double> d(n);
            for (int j = 0; j < n; ++j) d[j] = std::abs(ev[j] - pred);
            std::vector<int> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
            if (std::abs(d[idx[1]] - d[idx[0]]) < std::sqrt(crossing_tol(g0)))
                throw Error(ErrorKind::BranchSwapDetected, "ambiguous continuation " + at_x(x));
            lam = ev[idx[0]];
        }
        for (const cplx& other : ev)
            if (other != lam && std::norm(other - lam) < crossing_tol(g0))
                throw Error(ErrorKind::CrossingPoint, "eigenvalues coincide " + at_x(x));
        EigenBranch b;
        b.x0 = x;
        b.G = eval_matrix_jet(gexpr, x, order, params);
        b.gauge = Gauge::normalized();
        b.branch_id = seed;
        const Eigen::VectorXcd v0 = null_vector(g0, lam);
        b.pivot = argmax_abs(v0);
        EigenJets ej = eigen_perturbation(b.G, lam, v0, b.pivot);
        b.Qsq = ej.lambda;
        if (n == 2) {
            const TaylorJet delta = jet_delta(b.G);
            const TaylorJet sq = sqrt(delta, std::sqrt(delta[0]));
            const TaylorJet lo = 0.5 * (b.G[0][0] + b.G[1][1] - sq), hi = 0.5 * (b.G[0][0] + b.G[1][1] + sq);
            b.Qsq = std::abs(lo[0] - lam) <= std::abs(hi[0] - lam) ? lo : hi;
        }
        b.s0 = normalize(ej.v);
        if (!out.empty()) {
            const Eigen::VectorXcd a = values(out.back().s0), c = values(b.s0);
            const cplx ov = a.dot(c);
            if (std::abs(ov) > 0.0) b.s0 = vscale(std::conj(ov) / std::abs(ov), b.s0);
        }
        out.push_back(std::move(b));
        prev2 = prev;
        prev = lam;
    }
    return out;
}

BranchSelector BranchSelector::parse(const std::string& text) {
    BranchSelector s;
    if (text == "lower") s.kind = Kind::lower;
    else if (text == "upper") s.kind = Kind::upper;
    else {
        try {
            size_t pos = 0;
            s.index = std::stoi(text, &pos);
            if (pos != text.size() || s.index < 0) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "branch must be an index, 'lower' or 'upper', got '" + text + "'");
        }
    }
    return s;
}

std::string BranchSelector::str() const {
    switch (kind) {
    case Kind::lower: return "lower";
    case Kind::upper: return "upper";
    default: return std::to_string(index);
    }
}

BranchEvaluator::BranchEvaluator(const ReducedProblem& prob, BranchSelector sel, Gauge gauge, double anchor)
    : prob_(prob), gauge_(std::move(gauge)), anchor_(anchor) {
    const int n = prob_.n();
    if (gauge_.kind == GaugeKind::kato && prob_.hint == HermitianHint::general)
        throw Error(ErrorKind::GaugeNotFixed, "the Kato gauge needs a hermitian problem");
    const Eigen::MatrixXcd g0 = eval_matrix(prob_.G, anchor_, prob_.params);
    const std::vector<cplx> ev = sorted_eigenvalues(g0);
    switch (sel.kind) {
    case BranchSelector::Kind::index: index_ = sel.index; break;
    case BranchSelector::Kind::lower:
        index_ = static_cast<int>(std::min_element(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) - ev.begin());
        break;
    case BranchSelector::Kind::upper:
        index_ = static_cast<int>(std::max_element(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) - ev.begin());
        break;
    }
    if (index_ < 0 || index_ >= n) throw Error(ErrorKind::InvalidArgument, "branch index " + std::to_string(index_) + " out of range for N=" + std::to_string(n));
    auto scalar_like = [n](const Eigen::MatrixXcd& g) {
        const cplx mu = g.trace() / static_cast<double>(n);
        return (g - mu * Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-12 * (1.0 + g.norm());
    };
    full_degenerate_ = n == 1 || scalar_like(g0);
    if (full_degenerate_ && n > 1) {
        // d = N has to hold identically; at isolated points it is a crossing
        for (int k = 0; k < 9; ++k) {
            const double x = prob_.x_lo + (prob_.x_hi - prob_.x_lo) * (k + 0.5) / 9.0;
            Eigen::MatrixXcd g;
            try {
                g = eval_matrix(prob_.G, x, prob_.params);
            } catch (const Error&) {
                continue;
            }
            if (!scalar_like(g))
                throw Error(ErrorKind::CrossingPoint, "all eigenvalues coincide at the anchor x=" + std::to_string(anchor_));
        }
    }
    if (full_degenerate_) return;
    needs_theta_ = gauge_.kind == GaugeKind::kato && prob_.hint == HermitianHint::hermitian;
    const cplx target = ev[index_];
    if (n == 2) {
        const cplx delta = (g0(0, 0) - g0(1, 1)) * (g0(0, 0) - g0(1, 1)) + 4.0 * g0(0, 1) * g0(1, 0);
        if (std::abs(delta) < crossing_tol(g0)) throw Error(ErrorKind::CrossingPoint, "Delta vanishes at the anchor x=" + std::to_string(anchor_));
        const cplx sq = std::sqrt(delta), tr = g0(0, 0) + g0(1, 1);
        sqrt_sign_ = std::abs(0.5 * (tr + sq) - target) <= std::abs(0.5 * (tr - sq) - target) ? 1 : -1;
    } else {
        for (int k = 0; k < n; ++k)
            if (k != index_ && std::abs(ev[k] - target) < crossing_tol(g0))
                throw Error(ErrorKind::UnsupportedDegeneracy,
                            "eigenvalue " + std::to_string(index_) + " is partially degenerate at the anchor");
        // reference track across the domain, walked outward from the anchor
        const int pts = 2001;
        std::vector<double> xs;
        for (int k = 0; k < pts; ++k) xs.push_back(prob_.x_lo + (prob_.x_hi - prob_.x_lo) * k / (pts - 1));
        xs.push_back(anchor_);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        const auto ia = std::find(xs.begin(), xs.end(), anchor_) - xs.begin();
        std::vector<cplx> vals(xs.size());
        vals[ia] = target;
        long lo = ia, hi = ia;
        for (int dir : {1, -1}) {
            cplx prev = target, prev2 = target;
            for (long k = ia + dir; k >= 0 && k < static_cast<long>(xs.size()); k += dir) {
                Eigen::MatrixXcd g;
                try {
                    g = eval_matrix(prob_.G, xs[k], prob_.params);
                } catch (const Error&) {
                    break;
                }
                const std::vector<cplx> e = sorted_eigenvalues(g);
                const cplx pred = k == ia + dir ? prev : prev + (prev - prev2);
                std::vector<double> d;
                for (const cplx& v : e) d.push_back(std::abs(v - pred));
                std::vector<int> idx(e.size());
                std::iota(idx.begin(), idx.end(), 0);
                std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
                if (std::abs(d[idx[1]] - d[idx[0]]) < std::sqrt(crossing_tol(g))) break;
                vals[k] = e[idx[0]];
                prev2 = prev;
                prev = vals[k];
                (dir > 0 ? hi : lo) = k;
            }
        }
        track_x_.assign(xs.begin() + lo, xs.begin() + hi + 1);
        track_v_.assign(vals.begin() + lo, vals.begin() + hi + 1);
        track_lo_ = xs[lo];
        track_hi_ = xs[hi];
    }
    if (prob_.hint == HermitianHint::real_symmetric && gauge_.kind != GaugeKind::raw) {
        fixed_pivot_ = -1;
        // the per-point pivot flips the sign wherever the largest component changes;
        // walk out from the anchor keeping neighbouring vectors aligned
        const int pts = 4001;
        std::vector<double> xs;
        for (int k = 0; k < pts; ++k) xs.push_back(prob_.x_lo + (prob_.x_hi - prob_.x_lo) * k / (pts - 1));
        xs.push_back(anchor_);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        const long ia = std::find(xs.begin(), xs.end(), anchor_) - xs.begin();
        std::vector<Eigen::VectorXcd> vs(xs.size());
        auto unit = [&](double x) {
            Eigen::VectorXcd v;
            select_eigenvalue(x, eval_matrix(prob_.G, x, prob_.params), &v);
            v /= v(argmax_abs(v));
            return Eigen::VectorXcd(v / v.norm());
        };
        vs[ia] = unit(anchor_);
        long lo = ia, hi = ia;
        for (int dir : {1, -1}) {
            for (long k = ia + dir; k >= 0 && k < static_cast<long>(xs.size()); k += dir) {
                Eigen::VectorXcd v;
                try {
                    v = unit(xs[k]);
                } catch (const Error&) {
                    break;
                }
                const double d = vs[k - dir].dot(v).real();
                if (std::abs(d) < 0.5) break;
                vs[k] = d < 0 ? Eigen::VectorXcd(-v) : v;
                (dir > 0 ? hi : lo) = k;
            }
        }
        sign_x_.assign(xs.begin() + lo, xs.begin() + hi + 1);
        sign_v_.assign(vs.begin() + lo, vs.begin() + hi + 1);
    } else if (n == 2 && gauge_.kind == GaugeKind::raw) {
        fixed_pivot_ = std::abs(g0(0, 1)) >= std::abs(g0(1, 0)) ? 0 : 1;
    } else {
        Eigen::VectorXcd v;
        select_eigenvalue(anchor_, g0, &v);
        fixed_pivot_ = argmax_abs(v);
    }
}

std::vector<cplx> BranchEvaluator::eigenvalues(double x) const {
    return sorted_eigenvalues(eval_matrix(prob_.G, x, prob_.params));
}

cplx BranchEvaluator::select_eigenvalue(double x, const Eigen::MatrixXcd& g0, Eigen::VectorXcd* vec) const {
    const int n = prob_.n();
    cplx lam;
    if (n == 2) {
        const cplx delta = (g0(0, 0) - g0(1, 1)) * (g0(0, 0) - g0(1, 1)) + 4.0 * g0(0, 1) * g0(1, 0);
        if (std::abs(delta) < crossing_tol(g0)) throw Error(ErrorKind::CrossingPoint, "Delta vanishes " + at_x(x));
        lam = 0.5 * (g0(0, 0) + g0(1, 1) + static_cast<double>(sqrt_sign_) * std::sqrt(delta));
    } else {
        if (x < track_lo_ || x > track_hi_)
            throw Error(ErrorKind::BranchSwapDetected, "branch cannot be continued from the anchor to x=" + std::to_string(x));
        const auto it = std::lower_bound(track_x_.begin(), track_x_.end(), x);
        size_t k = std::min<size_t>(it - track_x_.begin(), track_x_.size() - 1);
        cplx ref = track_v_[k];
        if (k > 0 && track_x_[k] != x) {
            const double t = (x - track_x_[k - 1]) / (track_x_[k] - track_x_[k - 1]);
            ref = track_v_[k - 1] + t * (track_v_[k] - track_v_[k - 1]);
        }
        const std::vector<cplx> ev = sorted_eigenvalues(g0);
        std::vector<double> d;
        for (const cplx& v : ev) d.push_back(std::abs(v - ref));
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
        if (std::abs(d[idx[1]] - d[idx[0]]) < std::sqrt(crossing_tol(g0)))
            throw Error(ErrorKind::BranchSwapDetected, "ambiguous eigenvalue assignment " + at_x(x));
        lam = ev[idx[0]];
        if (std::norm(ev[idx[1]] - lam) < crossing_tol(g0)) throw Error(ErrorKind::CrossingPoint, "eigenvalues coincide " + at_x(x));
    }
    if (vec) *vec = null_vector(g0, lam);
    return lam;
}

EigenBranch BranchEvaluator::build(double x0, int order, bool rotate, cplx theta1) const {
    const int n = prob_.n();
    EigenBranch b;
    b.x0 = x0;
    b.G = eval_matrix_jet(prob_.G, x0, order, prob_.params);
    b.gauge = gauge_;
    b.branch_id = index_;
    if (full_degenerate_) {
        b.d = n;
        b.pivot = index_;
        b.Qsq = b.G[index_][index_];
        b.s0 = vzero(x0, order, n);
        b.s0[index_] = TaylorJet::constant(x0, order, 1.0);
        return b;
    }
    const Eigen::MatrixXcd g0 = values(b.G);
    Eigen::VectorXcd v0;
    const cplx lam = select_eigenvalue(x0, g0, &v0);
    b.pivot = fixed_pivot_ >= 0 ? fixed_pivot_ : argmax_abs(v0);
    if (std::abs(v0(b.pivot)) < 1e-10 * v0.norm())
        throw Error(ErrorKind::DegenerateParameterization, "eigenvector component " + std::to_string(b.pivot + 1) + " vanishes " + at_x(x0));
    EigenJets ej = eigen_perturbation(b.G, lam, v0, b.pivot);
    if (n == 2) {
        const TaylorJet delta = jet_delta(b.G);
        b.Qsq = 0.5 * (b.G[0][0] + b.G[1][1] + static_cast<double>(sqrt_sign_) * sqrt(delta, std::sqrt(delta[0])));
    } else {
        b.Qsq = ej.lambda;
    }
    if (gauge_.kind == GaugeKind::raw) {
        b.s0 = vscale(eval_expr_jet(gauge_.g, x0, order, prob_.params), ej.v);
        return b;
    }
    b.s0 = normalize(ej.v);
    if (!sign_x_.empty() && x0 >= sign_x_.front() && x0 <= sign_x_.back()) {
        const auto it = std::lower_bound(sign_x_.begin(), sign_x_.end(), x0);
        size_t k = it - sign_x_.begin();
        if (k > 0 && (k == sign_x_.size() || x0 - sign_x_[k - 1] < sign_x_[k] - x0)) --k;
        if (sign_v_[k].dot(values(b.s0)).real() < 0) b.s0 = vscale(TaylorJet::constant(x0, order, -1.0), b.s0);
    }
    if (needs_theta_ && rotate) {
        b.theta1 = theta1;
        b.s0 = kato_rotate(b.s0, theta1);
    }
    return b;
}

EigenBranch BranchEvaluator::at(double x0, int order, cplx theta1) const { return build(x0, order, true, theta1); }

cplx BranchEvaluator::theta_rate(double x) const {
    if (!needs_theta_) return 0.0;
    const EigenBranch b = build(x, 1, false, 0.0);
    return cplx(0.0, 1.0) * inner(b.s0, vdiff(b.s0))[0];
}

cplx BranchEvaluator::theta_at(double x) const {
    if (!needs_theta_ || x == anchor_) return 0.0;
    return integrate_gk([this](double t) { return theta_rate(t); }, anchor_, x).value;
}

JetVector kato_rotate(const JetVector& e_tilde, cplx theta_x0) {
    const TaylorJet rate = cplx(0.0, 1.0) * inner(fit(e_tilde, min_order(e_tilde) - 1), vdiff(e_tilde));
    const TaylorJet theta = rate.integrate(theta_x0);
    return vscale(exp(cplx(0.0, 1.0) * theta), e_tilde);
}

cplx kato_theta(const std::function<JetVector(double)>& e_tilde, double anchor, double x) {
    if (x == anchor) return 0.0;
    return integrate_gk(
               [&](double t) {
                   const JetVector e = e_tilde(t);
                   return cplx(0.0, 1.0) * inner(fit(e, 0), vdiff(e))[0];
               },
               anchor, x)
        .value;
}

EigenBranch kato_gauge(const BranchEvaluator& ev, const EigenBranch& b, double anchor) {
    if (b.d > 1 && b.d < b.n() && ev.problem().hint != HermitianHint::real_symmetric)
        throw Error(ErrorKind::DegenerateComplexGauge, "complex degenerate eigenvectors");
    EigenBranch out = b;
    out.gauge = Gauge::kato();
    if (!ev.needs_theta()) return out;
    const cplx theta = anchor == ev.anchor() ? ev.theta_at(b.x0) : ev.theta_at(b.x0) - ev.theta_at(anchor);
    out.theta1 = theta;
    out.s0 = kato_rotate(normalize(b.s0), theta);
    return out;
}

ComplementBasis complement_basis(const EigenBranch& b) {
    const int n = b.n();
    ComplementBasis c;
    if (n == 2) {
        c.vectors.push_back({-b.s0[1].conj(), b.s0[0].conj()});
        return c;
    }
    const double x0 = b.x0;
    const int K = min_order(b.s0);
    std::vector<JetVector> basis = {normalize(b.s0)};
    for (int j = 0; j < n; ++j) {
        if (j == b.pivot) continue;
        JetVector w = vzero(x0, K, n);
        w[j] = TaylorJet::constant(x0, K, 1.0);
        for (const auto& e : basis) w = vsub(w, vscale(inner(e, w), e));
        if (norm(w) < 1e-10) throw Error(ErrorKind::GramSchmidtBreakdown, "near-collinear vectors at x=" + std::to_string(x0));
        basis.push_back(normalize(w));
    }
    c.vectors.assign(basis.begin() + 1, basis.end());
    return c;
}

cplx schwartzian(const TaylorJet& qsq) {
    if (qsq.order() < 2) throw Error(ErrorKind::InsufficientJetOrder, "S_x needs order >= 2");
    if (std::abs(qsq[0]) < qsq.lead_tol()) throw Error(ErrorKind::ZeroAtEvaluationPoint, "q^2 vanishes at x=" + std::to_string(qsq.center()));
    const cplx r1 = qsq[1] / qsq[0], r2 = 2.0 * qsq[2] / qsq[0];
    return 5.0 / 16.0 * r1 * r1 - 0.25 * r2;
}

TaylorJet schwartzian_jet(const TaylorJet& qsq) {
    if (qsq.order() < 2) throw Error(ErrorKind::InsufficientJetOrder, "S_x needs order >= 2");
    if (std::abs(qsq[0]) < qsq.lead_tol()) throw Error(ErrorKind::ZeroAtEvaluationPoint, "q^2 vanishes at x=" + std::to_string(qsq.center()));
    const TaylorJet d1 = qsq.diff(), d2 = d1.diff();
    const TaylorJet r1 = div(d1, qsq), r2 = div(d2, qsq);
    return sub(5.0 / 16.0 * mul(r1, r1), 0.25 * r2);
}

TaylorJet epsilon0(const TaylorJet& qsq, const TaylorJet& a) {
    if (std::abs(qsq[0]) < qsq.lead_tol()) throw Error(ErrorKind::TurningPoint, "Q^2 vanishes at x=" + std::to_string(qsq.center()));
    return div(add(schwartzian_jet(qsq), a), qsq);
}

TaylorJet epsilon0(const EigenBranch& b, const Expression& a, const Params& params) {
    return epsilon0(b.Qsq, eval_expr_jet(a, b.x0, b.Qsq.order(), params));
}

}  // namespace pia
