#pragma once

#include <stdexcept>
#include <string>

namespace cohomlab {

// Base of every error thrown by the library. The CLI maps these to exit
// status 1 (usage/IO) or reports them as failed checks.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Compact-support precondition of spectral differentiation violated.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// Negative coordinate power requested on an axis that samples 0.
class SingularGridError : public Error {
 public:
  using Error::Error;
};

class AlphabetError : public Error {
 public:
  using Error::Error;
};

// Pulled-back support left the grid box.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A group-action multiplier denominator vanished on the support.
class SingularValueError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ObstructionError : public Error {
 public:
  using Error::Error;
};

class NotDiagonalizedError : public Error {
 public:
  using Error::Error;
};

class ZeroFiberError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace cohomlab
