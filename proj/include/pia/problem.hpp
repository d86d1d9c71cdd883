#pragma once

#include <Eigen/Dense>
#include <array>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pia/expression.hpp"
#include "pia/jet_linalg.hpp"

namespace pia {

using ExprMatrix = std::vector<std::vector<Expression>>;

enum class ProblemForm { reduced, schrodinger_like };
enum class HermitianHint { real_symmetric, hermitian, general };

const char* to_string(HermitianHint h);
const char* to_string(ProblemForm f);

// u'' + R u = 0 (reduced) or u'' + A u' + R_bar u = 0 with A = diag(a_j)
struct ProblemSpec {
    std::string name;
    int n = 1;
    ProblemForm form = ProblemForm::reduced;
    ExprMatrix R;
    std::vector<Expression> first_derivative;
    Params params;
    double x_lo = 0.0, x_hi = 1.0;
    HermitianHint hint = HermitianHint::general;
    std::optional<Expression> a;
    double lambda = 1.0;
    // after reduction: u_j = exp(∫ amplitude_rate_j dx) * ubar_j
    std::vector<Expression> amplitude_rate;
    // endpoints at which a first-derivative coefficient is singular
    std::vector<double> flagged_endpoints;
    // default sampling range lo:hi:step for tools
    std::optional<std::array<double, 3>> grid;
};

// R = lambda^-2 G + a I
struct ReducedProblem {
    std::string name;
    ExprMatrix G;
    Expression a;
    double lambda = 1.0;
    HermitianHint hint = HermitianHint::general;
    Params params;
    double x_lo = 0.0, x_hi = 1.0;
    int n() const { return static_cast<int>(G.size()); }
};

ProblemSpec problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemSpec& p);
ProblemSpec load_problem(const std::string& path);

ProblemSpec reduce_first_derivative(const ProblemSpec& spec);
ReducedProblem split_R(const ProblemSpec& spec, double lambda, const Expression& a);
// reduce if needed, then split with the spec's own lambda and a (defaults 1 and 0)
ReducedProblem make_reduced(const ProblemSpec& spec);
Expression langer_auxiliary(double c_a, const Expression& d_a);

// Checks the declared hermitian hint on a sample grid; throws ProblemFormat on violation.
void verify_hermitian_hint(const ReducedProblem& p, int samples = 100);

ProblemSpec builtin_example(const std::string& name);
const std::vector<std::string>& example_names();

Eigen::MatrixXcd eval_matrix(const ExprMatrix& m, double x, const Params& params);
JetMatrix eval_matrix_jet(const ExprMatrix& m, double x0, int order, const Params& params);
// R(x) = lambda^-2 G(x) + a(x) I
Eigen::MatrixXcd eval_R(const ReducedProblem& p, double x);

}  // namespace pia
