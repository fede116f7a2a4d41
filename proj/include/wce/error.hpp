#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wce {

enum class ErrorCode {
  kInvalidArgument = 1,
  kMalformedInput,
  kIndexOutOfRange,
  kEmptyTarget,
  kUnsortedIndices,
  kDuplicateIndex,
  kEmptyDistribution,
  kDimensionMismatch,
  kSupportViolation,
  kMissingObservation,
  kNonFinite,
  kInfeasibleBall,
  kNotConverged,
  kNoCertificate,
  kTooLarge,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; the code is
// stable and maps onto CLI exit statuses.
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

}  // namespace wce
