#include "esmap/analytic_lines.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "esmap/errors.hpp"
#include "esmap/specfun.hpp"

namespace esmap::analytic {

using specfun::kInvSqrt2Pi;
using specfun::kSqrt2Pi;
using specfun::norm_cdf_inv;
using specfun::norm_pdf;

replica::OrderParameters small_r_expansion(double alpha, double r) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("small_r_expansion: alpha must lie in (0, 1)");
  if (!(r >= 0.0)) throw DomainError("small_r_expansion: r must be non-negative");
  if (alpha <= 0.5 * r) throw DomainError("small_r_expansion: requires alpha > r/2");

  const double z = norm_cdf_inv(alpha);
  replica::OrderParameters op;
  // First order in r: q0 - 1 = (1 - Phi(zeta)) delta / h(zeta) with delta = r / h(z).
  op.q0 = 1.0 + 2.0 * std::numbers::pi * r * std::exp(z * z) * (1.0 - alpha);
  op.Delta = kSqrt2Pi * r * std::exp(0.5 * z * z);
  const double root_q0 = std::sqrt(op.q0);
  op.epsilon = root_q0 * norm_cdf_inv(alpha - 0.5 * r);
  op.delta = op.Delta / root_q0;
  op.zeta = op.epsilon / root_q0;
  return op;
}

replica::OrderParameters half_alpha_line(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("half_alpha_line: r must lie in (0, 1)");
  const double delta = 2.0 * norm_cdf_inv(0.5 * (1.0 + r));
  const double half = 0.5 * delta;
  const double inv_q0 = delta / (kSqrt2Pi * r) * std::exp(-0.5 * half * half) +
                        0.25 * delta * delta - delta * delta / (2.0 * r);
  if (!(inv_q0 > 0.0)) {
    throw DomainError(fmt::format("half_alpha_line: r={} lies beyond the alpha=1/2 boundary", r));
  }
  replica::OrderParameters op;
  op.q0 = 1.0 / inv_q0;
  const double root_q0 = std::sqrt(op.q0);
  op.delta = delta;
  op.zeta = -half;
  op.Delta = delta * root_q0;
  op.epsilon = -0.5 * op.Delta;
  return op;
}

double epsilon_zero_alpha(double r) {
  if (!(r > 0.0 && r < 0.5)) throw DomainError("epsilon_zero_alpha: r must lie in (0, 1/2)");
  const double x = norm_cdf_inv(0.5 + r);
  return 0.5 + r + kInvSqrt2Pi * std::expm1(-0.5 * x * x) / x;
}

MinimaxSolution minimax_solution(double r) {
  if (!(r > 0.0 && r < 0.5)) throw DomainError("minimax_solution: r must lie in (0, 1/2)");
  MinimaxSolution s;
  s.rho = -norm_cdf_inv(r);
  const double gap = norm_pdf(s.rho) - r * s.rho;
  s.scaled_Delta = std::sqrt(r / s.rho * gap);
  s.sqrt_q0 = std::sqrt(r / (s.rho * gap));
  s.epsilon = std::sqrt(r * s.rho / gap);
  return s;
}

CriticalAsymptotics minimax_critical_asymptotics(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw DomainError("minimax_critical_asymptotics: r must lie in (0, 1/2)");
  }
  const double dist = std::sqrt(0.5 - r);
  return {1.0 / (2.0 * std::sqrt(std::numbers::pi) * dist), 1.0 / (std::numbers::sqrt2 * dist),
          std::sqrt(std::numbers::pi) * dist};
}

}  // namespace esmap::analytic
