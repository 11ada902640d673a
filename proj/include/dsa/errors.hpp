#ifndef DSA_ERRORS_HPP
#define DSA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParam : Error {
  using Error::Error;
};

// Raised when repeated random graph draws all come out disconnected.
struct ConnectivityFailure : Error {
  using Error::Error;
};

struct AssumptionViolation : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct MissingHistory : Error {
  using Error::Error;
};

struct TableUninitialized : Error {
  using Error::Error;
};

// An iterate became NaN/Inf; usually signals a divergent stepsize.
struct NonFinite : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct ZeroStrongConvexity : Error {
  using Error::Error;
};

// Carries the name of the violated parameter interval.
struct ParamOutOfRange : Error {
  ParamOutOfRange(std::string which, const std::string& what)
      : Error(what), param(std::move(which)) {}
  std::string param;
};

struct TooLarge : Error {
  using Error::Error;
};

struct MissingDual : Error {
  using Error::Error;
};

struct EmptyWindow : Error {
  using Error::Error;
};

struct NonPositiveError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dsa

#endif  // DSA_ERRORS_HPP
