#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magree {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedInput,
  MissingCell,
  RaggedReplicates,
  NonNumericValue,
  DuplicateKey,
  UnknownRater,
  TooFewRaters,
  InsufficientReplicates,
  CapExceeded,
  NonPositiveDeltaMax,
  ZeroDerivative,
  ZeroVariance,
  SingularMatrix,
  DegenerateScores,
  NotPSD,
  InfeasibleTarget,
  CurveDomainTooShort,
  Degenerate,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace magree
