#pragma once

// Gaussian special functions used by the saddle-point equations.
//
//   Phi(x) = standard normal CDF
//   h(x)   = standard normal density
//   Psi(x) = x Phi(x) + h(x)                   Psi' = Phi
//   W(x)   = (x^2+1)/2 Phi(x) + x/2 h(x)       W'   = Psi
//
// All three are evaluated with full relative accuracy in the left tail
// (continued fraction for the Mills ratio) and through the reflection
// identities in the right half-line, so differences of nearby or far-apart
// arguments stay accurate. The interval helpers below integrate the
// derivatives directly when the interval is short.

namespace esmap::specfun {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

double norm_pdf(double x);
double norm_cdf(double x);
/// Phi^{-1}(p); throws DomainError unless 0 < p < 1.
double norm_cdf_inv(double p);
double psi_fn(double x);
double w_fn(double x);

/// Phi(b) - Phi(a) for a <= b.
double cdf_mass(double a, double b);
/// Psi(b) - Psi(a) for a <= b.
double psi_increment(double a, double b);
/// W(b) - W(a) for a <= b.
double w_increment(double a, double b);

}  // namespace esmap::specfun
