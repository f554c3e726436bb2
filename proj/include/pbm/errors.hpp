#pragma once

#include <stdexcept>
#include <string>

namespace pbm {

/// Base class of everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

// A kernel or covariance computation was requested against a continuous
// bath that was discretized with zero modes while its coupling is nonzero.
struct ZeroModes : Error {
  using Error::Error;
};

// A propagation grid straddles a coupling discontinuity without a grid
// point at the discontinuity, so per-segment matrix exponentials would
// silently average the generator.
struct SegmentMismatch : Error {
  using Error::Error;
};

// The measured pointer observables carry no invertible image of the
// initial system observables (condition number above threshold).
struct NotInvertible : Error {
  using Error::Error;
};

// Trapezoidal self-consistency check of the double time integral failed.
struct GridTooCoarse : Error {
  using Error::Error;
};

// A convolution leaked more probability past the grid edges than allowed.
struct GridTooSmall : Error {
  using Error::Error;
};

struct NonGaussianState : Error {
  using Error::Error;
};

struct LambdaOutOfRange : Error {
  using Error::Error;
};

struct NotNormalized : Error {
  using Error::Error;
};

struct InconsistentInput : Error {
  using Error::Error;
};

struct UnknownPreset : Error {
  using Error::Error;
};

// Scenario configuration file could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace pbm
