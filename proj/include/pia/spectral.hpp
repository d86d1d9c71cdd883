#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pia/jet_linalg.hpp"
#include "pia/problem.hpp"

namespace pia {

enum class GaugeKind { raw, normalized, kato };

struct Gauge {
    GaugeKind kind = GaugeKind::kato;
    Expression g = Expression::number(1.0);  // raw gauge multiplier

    static Gauge raw(Expression g = Expression::number(1.0)) { return {GaugeKind::raw, std::move(g)}; }
    static Gauge normalized() { return {GaugeKind::normalized, Expression::number(1.0)}; }
    static Gauge kato() { return {GaugeKind::kato, Expression::number(1.0)}; }
};

const char* to_string(GaugeKind k);

struct EigenBranch {
    double x0 = 0.0;
    JetMatrix G;
    TaylorJet Qsq;
    JetVector s0;
    int d = 1;
    Gauge gauge;
    int branch_id = 0;
    int pivot = 0;      // component held at 1 before gauge scaling
    cplx theta1 = 0.0;  // Kato phase at x0 (complex eigenvectors only)
    int n() const { return static_cast<int>(s0.size()); }
};

struct ComplementBasis {
    std::vector<JetVector> vectors;
};

// |Delta| (N=2) or squared eigen gap (N>2) below this marks a crossing
double crossing_tol(const Eigen::MatrixXcd& g);

// Q = sqrt(Q^2): principal root if Re Q^2 >= 0, otherwise -i sqrt(-Q^2)
cplx q_root(cplx qsq);
TaylorJet q_root(const TaylorJet& qsq);

// Jets of a simple eigenvalue and its eigenvector normalized by v[pivot] == 1.
// v0 is the eigenvector at the center (any scaling, v0[pivot] != 0).
struct EigenJets {
    TaylorJet lambda;
    JetVector v;
};
EigenJets eigen_perturbation(const JetMatrix& g, cplx lambda0, const Eigen::VectorXcd& v0, int pivot);

// Q^2 = (G11 + G22 + sign*sqrt(Delta))/2; s0 = g*{1, (Q^2 - G11)/G12} (or the
// row-swapped form when |G21| > |G12|), normalized when no g is supplied.
EigenBranch eigen_n2_closed_form(const ExprMatrix& g, const Params& params, double x0, int order, int sign,
                                 const std::optional<Expression>& gauge_g = std::nullopt);

// Nearest-value tracking along an increasing grid; eigenvectors normalized and
// phase aligned with the previous point.
std::vector<EigenBranch> eigen_track(const ExprMatrix& g, const Params& params, const std::vector<double>& grid,
                                     int seed, int order);

struct BranchSelector {
    enum class Kind { index, lower, upper } kind = Kind::index;
    int index = 0;
    static BranchSelector parse(const std::string& text);
    std::string str() const;
};

// Evaluates one eigen branch of G at arbitrary points with a fixed gauge.
// Branch identity, root sign (N=2) and the eigenvector pivot policy are fixed at the anchor.
class BranchEvaluator {
public:
    BranchEvaluator(const ReducedProblem& prob, BranchSelector sel, Gauge gauge, double anchor);

    // theta1 is the accumulated Kato phase at x0 (ignored unless needs_theta())
    EigenBranch at(double x0, int order, cplx theta1 = 0.0) const;
    // i (e~, e~') for the normalized, un-rotated eigenvector
    cplx theta_rate(double x) const;
    // Kato phase by adaptive quadrature from the anchor
    cplx theta_at(double x) const;

    bool needs_theta() const { return needs_theta_; }
    bool fully_degenerate() const { return full_degenerate_; }
    int index() const { return index_; }
    int n() const { return prob_.n(); }
    double anchor() const { return anchor_; }
    const Gauge& gauge() const { return gauge_; }
    const ReducedProblem& problem() const { return prob_; }
    std::vector<cplx> eigenvalues(double x) const;

private:
    cplx select_eigenvalue(double x, const Eigen::MatrixXcd& g0, Eigen::VectorXcd* vec) const;
    EigenBranch build(double x0, int order, bool rotate, cplx theta1) const;

    ReducedProblem prob_;
    Gauge gauge_;
    double anchor_;
    int index_ = 0;
    int sqrt_sign_ = 1;
    int fixed_pivot_ = -1;  // -1: choose per point
    bool needs_theta_ = false;
    bool full_degenerate_ = false;
    // tracked reference eigenvalues for N > 2
    std::vector<double> track_x_;
    std::vector<cplx> track_v_;
    double track_lo_ = 0.0, track_hi_ = 0.0;
    // sign-continuous real eigenvectors when the pivot is chosen per point
    std::vector<double> sign_x_;
    std::vector<Eigen::VectorXcd> sign_v_;
};

// Applies the Kato phase exp(i theta1) with theta1 = i * integral of (e~, e~') from the anchor.
EigenBranch kato_gauge(const BranchEvaluator& ev, const EigenBranch& b, double anchor);
// Kato rotation of a user-supplied normalized vector field.
cplx kato_theta(const std::function<JetVector(double)>& e_tilde, double anchor, double x);
JetVector kato_rotate(const JetVector& e_tilde, cplx theta_x0);

ComplementBasis complement_basis(const EigenBranch& b);

// S_x[q] from the q^2 jet: (5/16)((q^2)'/q^2)^2 - (1/4)(q^2)''/q^2
cplx schwartzian(const TaylorJet& qsq);
TaylorJet schwartzian_jet(const TaylorJet& qsq);
// (S_x[Q] + a)/Q^2
TaylorJet epsilon0(const TaylorJet& qsq, const TaylorJet& a);
TaylorJet epsilon0(const EigenBranch& b, const Expression& a, const Params& params);

}  // namespace pia
