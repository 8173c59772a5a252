#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardylab {

enum class ErrorCode {
  // validation (exit 2)
  InvalidConfig,
  DegenerateGrid,
  OutsideTube,
  BadParams,
  NonPositiveWeight,
  EtaNegative,
  EtaNotVanishing,
  EtaNotLipschitz,
  NotNormalized,
  NegativeRadicand,
  OutOfDomain,
  StepTooLarge,
  ZeroDenominator,
  SingularMass,
  NoBracket,
  NonIsolatedMaximizers,
  PoorFit,
  FDUnstable,
  NoValidRadius,
  // solver (exit 3)
  NotConverged,
  InnerSolveBreakdown,
  // io (exit 4)
  IOError,
};

std::string_view to_string(ErrorCode c);

// 0 ok, 2 validation, 3 non-convergence, 4 I/O
int exit_code(ErrorCode c);

class Error : public std::runtime_error {
public:
  Error(ErrorCode c, const std::string& detail);
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode c, const std::string& detail = {});

}  // namespace hardylab
