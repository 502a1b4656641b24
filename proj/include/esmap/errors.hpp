#pragma once

#include <stdexcept>
#include <string>

namespace esmap {

/// Base for every error raised by the library. CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The control point lies on or beyond the phase boundary.
class InfeasibleRegion : public Error {
 public:
  InfeasibleRegion(const std::string& what, double boundary)
      : Error(what), boundary_(boundary) {}
  /// r*(alpha) at the offending alpha, NaN when unknown.
  double boundary() const noexcept { return boundary_; }

 private:
  double boundary_;
};

/// An iterative solver exhausted its budget or lost its bracket.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// The simplex engine ran past its iteration budget.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// No alpha in the grid brackets the requested contour level.
class EmptyContour : public Error {
 public:
  using Error::Error;
};

/// Every sample of an ensemble was unbounded.
class AllInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace esmap
