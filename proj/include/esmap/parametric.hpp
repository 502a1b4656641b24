#pragma once

// Estimation error of the parametric (Gaussian-fit) ES estimate.
//
//   phi(alpha) = exp(-Phi^{-1}(alpha)^2 / 2) / ((1 - alpha) sqrt(2 pi))
//   r_c(alpha) = phi^2 / (1 + phi^2)
//   q0         = phi / ((1 - r) phi - r) = r_c / (r_c - r)

namespace esmap::parametric {

struct ParametricPoint {
  double alpha = 0.0;
  double r = 0.0;
  double q0 = 1.0;
};

/// ES of a unit-variance Gaussian position at level alpha.
double phi_factor(double alpha);
double r_crit_param(double alpha);
/// Throws InfeasibleRegion for r >= r_c(alpha).
double q0_param(double alpha, double r);
/// q0 through the unreduced phi-form of the same expression.
double q0_param_phi_form(double alpha, double r);
/// Aspect ratio at which the parametric q0 equals the given level.
double contour_r_param(double alpha, double q0);

ParametricPoint evaluate(double alpha, double r);

}  // namespace esmap::parametric
