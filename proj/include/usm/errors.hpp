#ifndef USM_ERRORS_HPP_
#define USM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace usm {

enum class ErrorCode {
  NonConvergence,
  NotSymmetric,
  NotPositiveDefinite,
  DimensionMismatch,
  GeometryMismatch,
  PlacementFailure,
  DegenerateAffinity,
  DegenerateCoefficients,
  LengthMismatch,
  OutOfBounds,
  NonFiniteLoss,
  ParseError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace usm

#endif  // USM_ERRORS_HPP_
