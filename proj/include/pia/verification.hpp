#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pia/scalar_pia.hpp"
#include "pia/vector_pia.hpp"

namespace pia {

enum class ConservedQuantity { current_sigma, wronskian_generalized, wronskian_symmetric };
const char* to_string(ConservedQuantity q);

struct ConservationReport {
    ConservedQuantity quantity = ConservedQuantity::current_sigma;
    std::vector<std::pair<double, cplx>> samples;
    cplx median = 0.0;
    // max |value - median| / (|median| + floor)
    double drift = 0.0;
};

// sigma = Im sum_j conj(u_j) u_j'
ConservationReport current_sigma(const std::vector<WaveSample>& w, double floor = 1e-12);

enum class WronskianKind { generalized, symmetric };
// generalized: Re[(u1, u2') - (u2, u1')]; symmetric: u1.u2' - u2.u1' without conjugation
ConservationReport wronskian(const std::vector<WaveSample>& w1, const std::vector<WaveSample>& w2, WronskianKind kind,
                             double floor = 1e-12);

struct ResidualPoint {
    double x = 0.0;
    double absolute = 0.0;  // |u'' + R u|
    double scale = 0.0;     // |R| |u|
    double relative = 0.0;
};
// R = lambda^-2 G + a I; u'' taken from the samples' analytic second derivative
std::vector<ResidualPoint> residual(const std::vector<WaveSample>& w, const ReducedProblem& prob, double lambda);
using MatrixFn = std::function<Eigen::MatrixXcd(double)>;
std::vector<ResidualPoint> residual(const std::vector<WaveSample>& w, const MatrixFn& R);

// Dormand-Prince solution of u'' + R u = 0 from (u0, u0') at x_start, sampled at `outputs`
// (monotone away from x_start). u_second is -R u.
std::vector<WaveSample> reference_integrate(const MatrixFn& R, double x_start, const Eigen::VectorXcd& u0,
                                            const Eigen::VectorXcd& du0, std::span<const double> outputs,
                                            double tol = 1e-10);

// Integration against a fast mode that grows in the integration direction: the slow seed and a
// seed of the fast mode are integrated together and the fast component, measured along `fast_dir`
// at the last output, is subtracted everywhere.
std::vector<WaveSample> filtered_reference(const MatrixFn& R, double x_start, const Eigen::VectorXcd& u_slow,
                                           const Eigen::VectorXcd& du_slow, const Eigen::VectorXcd& u_fast,
                                           const Eigen::VectorXcd& du_fast, const Eigen::VectorXcd& fast_dir,
                                           std::span<const double> outputs, double tol = 1e-10);

struct ScalingReport {
    std::vector<double> lambdas;
    std::vector<double> residuals;  // max relative residual over the probes
    std::optional<double> slope;    // empty when NotMeasurable
    std::string status;             // "ok" or "NotMeasurable"
};

struct ScalingSetup {
    BranchSelector branch;
    TheoryVariant variant = TheoryVariant::fulling_current;
    std::optional<Gauge> gauge;
    int m_max = 2;
    int sign = 1;
};
// least-squares slope of log(residual) against log(lambda)
ScalingReport order_scaling(const ReducedProblem& prob, const ScalingSetup& setup, std::span<const double> lambdas,
                            std::span<const double> probe_x);

// drift slope of a conservation law across a lambda ladder
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct Crossing {
    double x_cr = 0.0;
    double p = 0.0;
    double gap = 0.0;
};
std::vector<Crossing> crossing_diagnostics(const ExprMatrix& G, const Params& params, double lo, double hi,
                                           int samples = 4000);

}  // namespace pia
