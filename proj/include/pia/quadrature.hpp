#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pia/taylor_jet.hpp"

namespace pia {

using ComplexFn = std::function<cplx(double)>;

struct QuadResult {
    cplx value;
    double error = 0.0;
    int evaluations = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod. Throws QuadratureFailure when the
// subdivision budget runs out before max(abs_tol, rel_tol*|I|) is met.
QuadResult integrate_gk(const ComplexFn& f, double a, double b, double rel_tol = 1e-10,
                        double abs_tol = 1e-14, int max_intervals = 4000);

// Integral of f from `anchor` to each grid point (grid sorted ascending); the
// grid is walked outward from the anchor so every panel is integrated once.
std::vector<cplx> cumulative_integral(const ComplexFn& f, std::span<const double> grid,
                                      double anchor, double rel_tol = 1e-10,
                                      double abs_tol = 1e-14);

}  // namespace pia
