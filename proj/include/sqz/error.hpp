#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqz {

enum class ErrorCode {
  InvalidConfig,
  AboveThreshold,
  SingularSystem,
  NumericalDomain,
  NoCrossing,
  QuadratureFailure,
  NonConvergence,
  DegenerateJacobian,
  InsufficientData,
  InvalidData,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every failure the library reports. The code is
/// what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sqz
