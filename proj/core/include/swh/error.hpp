#pragma once

#include <stdexcept>
#include <string>

namespace swh {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid domain, size mismatch between a field and its domain, bad argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A grid evaluation produced inf/nan (blow-up inside a nonlinearity).
class NonfiniteError : public Error {
 public:
  using Error::Error;
};

// A time step produced a nonfinite state or crossed the divergence gate.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// A theorem-level precondition (parameter gate) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace swh
