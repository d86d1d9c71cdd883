#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pia/taylor_jet.hpp"

namespace pia {

using State = std::vector<cplx>;
using OdeRhs = std::function<void(double x, const State& y, State& dy)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    int max_steps = 1000000;
};

struct OdeStats {
    int steps = 0;
    int rejected = 0;
    int evaluations = 0;
};

// Dormand-Prince 5(4). Steps are clipped so every output abscissa is hit
// exactly; `outputs` must be monotone in the direction of integration.
std::vector<State> integrate_ode(const OdeRhs& f, double x0, State y0, std::span<const double> outputs,
                                 const OdeOptions& opt = {}, OdeStats* stats = nullptr);

}  // namespace pia
