#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnet {

enum class ErrorCode {
  UnknownParty,
  DegenerateSource,
  EmptyNetwork,
  HOutOfRange,
  NotHermitian,
  DimensionMismatch,
  SameParty,
  BadDims,
  NotAState,
  SingletNeedsQubits,
  MissingSource,
  LayoutMismatch,
  NonCommutingFactors,
  InvalidIndependentSet,
  NotCommuting,
  ThetaOutOfRange,
  NoIndependentSet,
  UnsupportedTopology,
  EvenDimension,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status and tests can match on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace qnet
