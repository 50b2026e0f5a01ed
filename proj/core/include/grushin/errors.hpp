// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point (or path) touched the singular set {x = 0} where the cylinder
// chart and the metric g degenerate.
struct SingularChart : Error {
  using Error::Error;
};

// Malformed argument values (r <= 0, non-unit theta, t <= 0, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// Inputs whose sizes do not match the (p, q) of the instance in use.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Metric matrix not invertible within tolerance.
struct SingularMetric : Error {
  using Error::Error;
};

// Operation needs p >= 3 (or another dimension floor) to be meaningful.
struct DimensionTooSmall : Error {
  using Error::Error;
};

// Vector input too close to zero (or a frame too close to degenerate)
// for a stable normalization.
struct DegenerateInput : Error {
  using Error::Error;
};

// A conformal factor or metric coefficient that must be positive is not.
struct NonpositiveFactor : Error {
  using Error::Error;
};

// Finite-difference step too large for the requested point (would cross
// the singular set or leave the chart domain).
struct StepTooLarge : Error {
  using Error::Error;
};

// Map evaluated outside its domain (e.g. inversion at the origin).
struct DomainViolation : Error {
  using Error::Error;
};

// Level-set gradient vanished where a normal was requested.
struct DegenerateGradient : Error {
  using Error::Error;
};

// A trajectory crossed into the guarded band around {x = 0}.
struct LeftRiemannianRegion : Error {
  using Error::Error;
};

// Least-squares / model fit did not reach the required residual.
struct FitFailed : Error {
  using Error::Error;
};

// Sample set matches no known hypersurface family.
struct ClassificationFailed : Error {
  using Error::Error;
};

// Bad CLI flags or config file contents.
struct ConfigError : Error {
  using Error::Error;
};

// Filesystem problem while writing reports or tables.
struct IoError : Error {
  using Error::Error;
};

}  // namespace grushin
