#include "hardylab/errors.hpp"

namespace hardylab {

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::OutsideTube: return "OutsideTube";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::EtaNegative: return "EtaNegative";
    case ErrorCode::EtaNotVanishing: return "EtaNotVanishing";
    case ErrorCode::EtaNotLipschitz: return "EtaNotLipschitz";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::NonIsolatedMaximizers: return "NonIsolatedMaximizers";
    case ErrorCode::PoorFit: return "PoorFit";
    case ErrorCode::FDUnstable: return "FDUnstable";
    case ErrorCode::NoValidRadius: return "NoValidRadius";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InnerSolveBreakdown: return "InnerSolveBreakdown";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotConverged:
    case ErrorCode::InnerSolveBreakdown:
      return 3;
    case ErrorCode::IOError:
      return 4;
    default:
      return 2;
  }
}

static std::string compose(ErrorCode c, const std::string& detail) {
  std::string s(to_string(c));
  if (!detail.empty()) s += ": " + detail;
  return s;
}

Error::Error(ErrorCode c, const std::string& detail)
    : std::runtime_error(compose(c, detail)), code_(c) {}

void fail(ErrorCode c, const std::string& detail) { throw Error(c, detail); }

}  // namespace hardylab
