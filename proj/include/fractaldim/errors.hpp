#pragma once

#include <stdexcept>
#include <string>

namespace fractaldim {

// Error taxonomy shared across the library.  The CLI maps these onto exit
// codes: ValidationError and subclasses -> 2, numeric failures -> 3,
// budget exhaustion -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input/configuration problems detected before or during setup.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A symbol outside the working alphabet {1..N} was used.
class SymbolOutOfAlphabet : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A sequence could not be resolved to the requested depth.
class ResolutionExceeded : public Error {
 public:
  using Error::Error;
};

// log p_i(x) requested where p_i(x) <= 0.
class ZeroWeight : public Error {
 public:
  using Error::Error;
};

// A countable-alphabet quantity has no declared tail bound.
class TailUncertified : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An enumeration would exceed the configured evaluation budget.
class CombinatorialBlowup : public Error {
 public:
  using Error::Error;
};

// Fixed-point iteration failed to reach its tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// The inductive image-separation scan exceeded its step limit.
class UnfoldTimeout : public Error {
 public:
  using Error::Error;
};

// A dimension formula was requested with non-positive Lyapunov exponent.
class NonHyperbolic : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of zero mass.
class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

// Ball mass is zero at the largest requested radius.
class EmptyBall : public Error {
 public:
  using Error::Error;
};

// Pairwise image separation failed at the reference point.
class NonAccumulationFailed : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace fractaldim
