#pragma once

#include <stdexcept>
#include <string>

namespace fluxline {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad radius, n < 3, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two curves, or a point and a curve/surface, are closer than the
/// singularity guard allows.
class ClearanceError : public Error {
 public:
  using Error::Error;
};

/// A quadrature result is too far from the integer it should equal;
/// the caller should resample with more points.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Geometry that the counting and fan-triangulation kernels cannot
/// resolve (coplanar crossings, inverted fan triangles, ...).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace fluxline
