#include "pia/error.hpp"

namespace pia {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::DivisionByZeroLeadCoefficient: return "DivisionByZeroLeadCoefficient";
    case ErrorKind::MismatchedJets: return "MismatchedJets";
    case ErrorKind::BranchPointEvaluation: return "BranchPointEvaluation";
    case ErrorKind::OrderExceeded: return "OrderExceeded";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::EvaluationSingularity: return "EvaluationSingularity";
    case ErrorKind::UnboundParameter: return "UnboundParameter";
    case ErrorKind::SingularCoefficient: return "SingularCoefficient";
    case ErrorKind::CrossingPoint: return "CrossingPoint";
    case ErrorKind::DegenerateParameterization: return "DegenerateParameterization";
    case ErrorKind::BranchSwapDetected: return "BranchSwapDetected";
    case ErrorKind::DegenerateComplexGauge: return "DegenerateComplexGauge";
    case ErrorKind::GramSchmidtBreakdown: return "GramSchmidtBreakdown";
    case ErrorKind::ZeroAtEvaluationPoint: return "ZeroAtEvaluationPoint";
    case ErrorKind::TurningPoint: return "TurningPoint";
    case ErrorKind::InsufficientJetOrder: return "InsufficientJetOrder";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::TurningPointOnGrid: return "TurningPointOnGrid";
    case ErrorKind::ModelSingularity: return "ModelSingularity";
    case ErrorKind::MinorSingular: return "MinorSingular";
    case ErrorKind::UnsupportedDegeneracy: return "UnsupportedDegeneracy";
    case ErrorKind::GaugeNotFixed: return "GaugeNotFixed";
    case ErrorKind::CompatibilityViolation: return "CompatibilityViolation";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::UnknownExample: return "UnknownExample";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ProblemFormat: return "ProblemFormat";
    }
    return "Error";
}

bool is_input_error(ErrorKind k) {
    switch (k) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownFunction:
    case ErrorKind::UnboundParameter:
    case ErrorKind::SingularCoefficient:
    case ErrorKind::UnknownExample:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ProblemFormat:
        return true;
    default:
        return false;
    }
}

}  // namespace pia
