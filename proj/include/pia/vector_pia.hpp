#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pia/ode.hpp"
#include "pia/scalar_pia.hpp"
#include "pia/spectral.hpp"

namespace pia {

enum class TheoryVariant { fulling_current, wronskian_conserving, simplified_hermitian, non_hermitian };

const char* to_string(TheoryVariant v);
// accepts the short CLI names (fulling, wronskian, simplified, nonhermitian) and the full ones
TheoryVariant parse_variant(const std::string& text);
bool is_hermitian_variant(TheoryVariant v);
bool fixes_parallel(TheoryVariant v);

// All corrections at one point, as jets centered there. Index m runs 0..m_max.
struct CorrectionSet {
    double x0 = 0.0;
    int m_max = 0;
    TaylorJet Qsq, Q, eps0;
    std::vector<TaylorJet> Y;
    std::vector<JetVector> s, s_perp, b;
    std::vector<cplx> c_perp, c_par;
    std::vector<TaylorJet> c_par_jet;
    // integrands of the parallel coordinates at x0 (zero unless fixes_parallel)
    std::vector<cplx> c_rate;
    EigenBranch branch;
    std::vector<double> self_check;       // order-m equation residual, relative
    std::vector<double> constraint;       // conservation constraint per order (empty if not applicable)
    std::vector<std::string> warnings;
    int n() const { return branch.n(); }
};

// b_m from the history through order m-1 (uses h.Q, h.eps0)
JetVector compute_b(int m, const CorrectionSet& h);

struct PerpSolution {
    JetVector s_perp;
    cplx c_perp = 0.0;
};
// Complement part of s_m. For non_hermitian the result is the whole s_m (its s0 coordinate is zero).
PerpSolution solve_s_perp(const JetVector& b_m, const CorrectionSet& h, const ComplementBasis& comp,
                          TheoryVariant variant);

TaylorJet compute_Y(const JetVector& b_m, const JetVector& s_m, const CorrectionSet& h, TheoryVariant variant);

// (e1, s_m) = integral of `rate` + `local`
struct ParallelTerms {
    TaylorJet rate, local;
};
ParallelTerms parallel_terms(int m, const CorrectionSet& h, const JetVector& s_perp, TheoryVariant variant);

// Corrections at branch.x0. `integrals` holds the accumulated integrals of the parallel
// rates, I_m(x0) for m = 1..m_max (zeros if empty). q_sign = -1 evaluates with Q -> -Q.
CorrectionSet vector_corrections(const ReducedProblem& prob, const EigenBranch& branch, TheoryVariant variant,
                                 int m_max, std::span<const cplx> integrals = {}, int q_sign = 1);

// p_m = Q^2 sum_a Y_a Y_{m-a}
std::vector<cplx> p_coefficients(const CorrectionSet& c);

struct EngineConfig {
    TheoryVariant variant = TheoryVariant::fulling_current;
    BranchSelector branch;
    std::optional<Gauge> gauge;  // default per variant
    int m_max = 2;
    double anchor = 0.0;
    int q_sign = 1;
    double rtol = 1e-12;
    double atol = 1e-13;
};

Gauge default_gauge(TheoryVariant v, HermitianHint hint);

// Marches the accumulated integrals (Kato phase, parallel coordinates, phases) outward
// from the anchor with an embedded RK scheme and evaluates corrections anywhere.
class VectorEngine {
public:
    VectorEngine(const ReducedProblem& prob, EngineConfig cfg);

    CorrectionSet at(double x) const;
    std::vector<CorrectionSet> on_grid(std::span<const double> xs) const;
    // u+ (sign = +1) or u- (sign = -1) on an increasing grid
    std::vector<WaveSample> wave(int sign, std::span<const double> grid, double lambda,
                                 std::vector<std::string>* warnings = nullptr) const;

    const BranchEvaluator& evaluator() const { return ev_; }
    const ReducedProblem& problem() const { return prob_; }
    const EngineConfig& config() const { return cfg_; }
    int jet_order() const { return 2 * cfg_.m_max + 4; }
    // integrals carried by the march, excluding wave phases
    int integral_count() const;

private:
    CorrectionSet local(double x, const State& st) const;
    std::vector<State> march(std::span<const double> xs, int wave_sign, double lambda) const;

    ReducedProblem prob_;
    EngineConfig cfg_;
    BranchEvaluator ev_;
    bool needs_i_ = false;
};

}  // namespace pia
