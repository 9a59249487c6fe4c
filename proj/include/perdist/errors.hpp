#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace perdist {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different lattice windows.
class WindowMismatch : public Error {
 public:
  using Error::Error;
};

/// An input violates an operation's precondition (determinant, shape, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A growth envelope fails to certify the values it is attached to.
class EnvelopeViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (JSON files, CLI arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A negative mathematical outcome: what failed and, when meaningful, the
/// first window point (enumeration index) at which it failed.
struct Failure {
  std::string reason;
  std::optional<Eigen::Index> point;
};

/// Either a value or a Failure. Used where a "no" is a legitimate answer
/// rather than a programming error.
template <typename T>
class Outcome {
 public:
  Outcome(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Failure failure) : state_(std::move(failure)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!ok()) throw Error("Outcome::value() on failure: " + failure().reason);
    return std::get<T>(state_);
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }

  const Failure& failure() const { return std::get<Failure>(state_); }

 private:
  std::variant<T, Failure> state_;
};

}  // namespace perdist
