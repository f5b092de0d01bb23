#pragma once

#include <stdexcept>
#include <string>

namespace mixfid {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
 public:
  NotPositiveSemidefinite(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  /// The offending (most negative) eigenvalue.
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class EigenNonConvergence : public Error {
 public:
  using Error::Error;
};

class NotStronglySymmetric : public Error {
 public:
  using Error::Error;
};

/// Decay fit found fewer than three usable distances above the positivity floor.
class NoSignal : public Error {
 public:
  using Error::Error;
};

/// A recorded inequality failed at write time.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixfid
