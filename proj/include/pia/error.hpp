#pragma once

#include <stdexcept>
#include <string>

namespace pia {

enum class ErrorKind {
    DivisionByZeroLeadCoefficient,
    MismatchedJets,
    BranchPointEvaluation,
    OrderExceeded,
    SyntaxError,
    UnknownFunction,
    EvaluationSingularity,
    UnboundParameter,
    SingularCoefficient,
    CrossingPoint,
    DegenerateParameterization,
    BranchSwapDetected,
    DegenerateComplexGauge,
    GramSchmidtBreakdown,
    ZeroAtEvaluationPoint,
    TurningPoint,
    InsufficientJetOrder,
    QuadratureFailure,
    TurningPointOnGrid,
    ModelSingularity,
    MinorSingular,
    UnsupportedDegeneracy,
    GaugeNotFixed,
    CompatibilityViolation,
    GridMismatch,
    StepSizeUnderflow,
    UnknownExample,
    InvalidArgument,
    ProblemFormat,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// input-side errors map to CLI exit code 2, everything else is an evaluation error
bool is_input_error(ErrorKind k);

}  // namespace pia
