#pragma once

#include <functional>
#include <vector>

#include "pia/expression.hpp"
#include "pia/taylor_jet.hpp"

namespace pia {

struct ScalarCorrections {
    TaylorJet eps0;
    std::vector<TaylorJet> Y;  // Y[n] holds Y_{2n}; Y[0] == 1
    int n_max() const { return static_cast<int>(Y.size()) - 1; }
};

// Explicit Y_{2n} recurrence with zeta-derivatives rewritten through Q^2.
ScalarCorrections scalar_corrections(const TaylorJet& eps0, const TaylorJet& qsq, int n_max);

// q = sign * Q * sum_{n<=N} Y_{2n} lambda^{2n}
TaylorJet truncate_q(const TaylorJet& qsq, const ScalarCorrections& corr, double lambda, int N, int sign);

struct WaveSample {
    double x = 0.0;
    std::vector<cplx> u, u_prime, u_second;
    cplx phase = 0.0;  // lambda^-1 * integral of q from the anchor
};

// jet (order >= 2) of the upper-sign q at x; the lower wave uses -q
using QJetFn = std::function<TaylorJet(double x)>;

// u = (kappa q)^{-1/2} exp(i lambda^-1 int q), kappa picking the real normal forms
std::vector<WaveSample> assemble_scalar_wave(const QJetFn& q, int sign, const std::vector<double>& grid,
                                             double anchor, double lambda);

// kappa with kappa*q = |q| when q^2 is real (1 otherwise)
cplx normal_form_factor(cplx q);

struct SingularityModel {
    enum class Kind { power, exp_pole, exp_flat, bounded } kind = Kind::power;
    double m = 0.0;   // power exponent
    cplx eta = 1.0;   // exponential phase factor
    cplx c = 1.0;     // c, or c0 for the bounded model
};

// epsilon_0 (a == 0) of Q^2 = Q_M^2 (1 + d) in closed form
cplx model_epsilon00(const SingularityModel& model, const Expression& d, double x0, const Params& params = {});
// exact Q^2 of the model, for cross-checks
Expression model_qsq(const SingularityModel& model, const Expression& d);

}  // namespace pia
