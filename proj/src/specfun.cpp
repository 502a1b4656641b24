#include "esmap/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "esmap/errors.hpp"

namespace esmap::specfun {
namespace {

constexpr double kTailSwitch = 3.0;
constexpr double kShortInterval = 1.0;

struct LeftTail {
  double phi;  // Phi(-y)
  double psi;  // Psi(-y)
  double w;    // W(-y)
};

// Left tail at -y, y >= kTailSwitch. With the Mills-ratio continued fraction
//   Phi(-y)/h(y) = 1/(y + c),  c = 1/(y + d),  d = 2/(y + 3/(y + 4/(...)))
// the cancellations in Psi and W collapse to
//   Psi(-y) = h c/(y + c),  W(-y) = h c d / (2 (y + c)).
LeftTail left_tail(double y) {
  int terms = 24;
  if (y < 4.0) {
    terms = 80;
  } else if (y < 5.0) {
    terms = 50;
  } else if (y < 8.0) {
    terms = 40;
  }
  double d = 0.0;
  for (int k = terms; k >= 2; --k) d = k / (y + d);
  const double c = 1.0 / (y + d);
  const double h = norm_pdf(y);
  const double denom = y + c;
  return {h / denom, h * c / denom, 0.5 * h * c * d / denom};
}

template <class F>
double short_integral(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) {
  if (x <= -kTailSwitch) return left_tail(-x).phi;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double psi_fn(double x) {
  if (x <= -kTailSwitch) return left_tail(-x).psi;
  if (x <= 0.0) return x * norm_cdf(x) + norm_pdf(x);
  return x + psi_fn(-x);
}

double w_fn(double x) {
  if (x <= -kTailSwitch) return left_tail(-x).w;
  if (x <= 0.0) return 0.5 * (x * x + 1.0) * norm_cdf(x) + 0.5 * x * norm_pdf(x);
  return 0.5 * (x * x + 1.0) - w_fn(-x);
}

double norm_cdf_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("norm_cdf_inv: probability must lie in (0, 1)");
  }
  if (p > 0.5) return -norm_cdf_inv(1.0 - p);
  if (p == 0.5) return 0.0;

  // Acklam's rational approximation for the lower half, |rel err| < 1.2e-9.
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // Halley refinement on the lower tail, where Phi carries full relative accuracy.
  for (int it = 0; it < 3; ++it) {
    const double dens = norm_pdf(x);
    if (dens == 0.0) break;
    const double e = (norm_cdf(x) - p) / dens;
    const double step = e / (1.0 + 0.5 * x * e);
    x -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double cdf_mass(double a, double b) {
  if (b - a <= kShortInterval) return short_integral([](double t) { return norm_pdf(t); }, a, b);
  if (a + b >= 0.0) return norm_cdf(-a) - norm_cdf(-b);
  return norm_cdf(b) - norm_cdf(a);
}

double psi_increment(double a, double b) {
  const double len = b - a;
  if (len <= kShortInterval) return short_integral([](double t) { return norm_cdf(t); }, a, b);
  if (a + b >= 0.0) return len - (psi_fn(-a) - psi_fn(-b));
  return psi_fn(b) - psi_fn(a);
}

double w_increment(double a, double b) {
  const double len = b - a;
  if (len <= kShortInterval) return short_integral([](double t) { return psi_fn(t); }, a, b);
  if (a + b >= 0.0) return len * 0.5 * (a + b) + (w_fn(-a) - w_fn(-b));
  return w_fn(b) - w_fn(a);
}

}  // namespace esmap::specfun
