#pragma once

#include <cmath>
#include <random>
#include <string>

#include "pia/expression.hpp"

namespace pia_test {

inline double rel_err(pia::cplx a, pia::cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// f^(p)(x0) by p-fold symbolic differentiation
inline pia::cplx symbolic_derivative(const pia::Expression& e, int p, double x0, const pia::Params& params = {}) {
    pia::Expression d = e;
    for (int k = 0; k < p; ++k) d = pia::diff_expr(d);
    return pia::eval_expr(d, x0, params);
}

// Random expression well-behaved near x in [0.5, 2]
inline std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
    std::uniform_real_distribution<double> coef(0.3, 1.7);
    auto num = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", coef(rng));
        return std::string(buf);
    };
    switch (pick(rng)) {
    case 0: return "x";
    case 1: return num();
    case 2: return "(" + num() + "*x + " + num() + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
    case 6: return "(" + random_expr(rng, depth - 1) + "/(2 + sin(x)))";
    case 7: return "exp(" + num() + "*" + random_expr(rng, depth - 1) + "/(3 + x^2))";
    case 8: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 9: return "cos(" + random_expr(rng, depth - 1) + ")";
    case 10: return "sqrt(1 + x^2 + " + random_expr(rng, depth - 1) + "^2)";
    default: return "ln(2 + cos(" + random_expr(rng, depth - 1) + "))";
    }
}

}  // namespace pia_test
