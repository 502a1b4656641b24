#include "esmap/parametric.hpp"

#include <cmath>

#include <fmt/format.h>

#include "esmap/errors.hpp"
#include "esmap/specfun.hpp"

namespace esmap::parametric {
namespace {

void require_open_unit(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("{}: alpha must lie in (0, 1), got {}", what, alpha));
  }
}

}  // namespace

double phi_factor(double alpha) {
  require_open_unit(alpha, "phi_factor");
  const double z = specfun::norm_cdf_inv(alpha);
  return specfun::norm_pdf(z) / (1.0 - alpha);
}

double r_crit_param(double alpha) {
  const double phi = phi_factor(alpha);
  const double phi2 = phi * phi;
  return phi2 / (1.0 + phi2);
}

double q0_param(double alpha, double r) {
  if (!(r >= 0.0)) throw DomainError("q0_param: r must be non-negative");
  const double rc = r_crit_param(alpha);
  if (r >= rc) {
    throw InfeasibleRegion(
        fmt::format("q0_param: r={} is at or beyond the parametric boundary r_c={:.10g}", r, rc),
        rc);
  }
  return rc / (rc - r);
}

double q0_param_phi_form(double alpha, double r) {
  const double phi = phi_factor(alpha);
  const double phi2 = phi * phi;
  const double denom = (1.0 - r) * phi2 - r;
  if (!(denom > 0.0)) {
    throw InfeasibleRegion("q0_param_phi_form: beyond the parametric boundary", r_crit_param(alpha));
  }
  return phi2 / denom;
}

double contour_r_param(double alpha, double q0) {
  if (!(q0 >= 1.0)) throw DomainError("contour_r_param: q0 must be >= 1");
  if (std::isinf(q0)) return r_crit_param(alpha);
  return (q0 - 1.0) / q0 * r_crit_param(alpha);
}

ParametricPoint evaluate(double alpha, double r) { return {alpha, r, q0_param(alpha, r)}; }

}  // namespace esmap::parametric
