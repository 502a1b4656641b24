#include "esmap/replica.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "esmap/errors.hpp"
#include "esmap/parametric.hpp"
#include "esmap/specfun.hpp"

namespace esmap::replica {
namespace {

using specfun::cdf_mass;
using specfun::psi_increment;
using specfun::w_increment;

// Mixed absolute/relative bracket tolerance; roots at zero (the epsilon = 0
// line) are legitimate, so a purely relative test would never terminate.
struct BracketTolerance {
  double scale;
  bool operator()(double a, double b) const {
    return std::abs(b - a) <= scale * std::max(1.0, std::min(std::abs(a), std::abs(b)));
  }
};

constexpr BracketTolerance kTightBracket{4.0 * std::numeric_limits<double>::epsilon()};

template <class F>
std::pair<double, double> bracket_root(F&& f, double lo, double hi, double flo, double fhi,
                                       int max_iterations, const char* what) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iterations);
  auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, kTightBracket, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iterations)) {
    const double width = std::abs(bracket.second - bracket.first);
    if (width > 1e-12 * std::max(1.0, std::abs(bracket.first))) {
      throw NoConvergence(fmt::format("{}: bracket did not close after {} iterations", what,
                                      max_iterations));
    }
  }
  return bracket;
}

// Average of Phi over [zeta, zeta + delta] minus alpha. Increasing in delta.
// Above alpha = 1/2 it is evaluated as (1 - alpha) - average of Phi(-x), which
// keeps full relative accuracy when 1 - alpha is tiny.
double mean_cdf_gap(double alpha, double zeta, double delta) {
  if (delta == 0.0) {
    return alpha >= 0.5 ? (1.0 - alpha) - specfun::norm_cdf(-zeta)
                        : specfun::norm_cdf(zeta) - alpha;
  }
  // Average over the interval actually represented, [zeta, fl(zeta + delta)].
  const double b = zeta + delta;
  const double len = b - zeta;
  if (alpha >= 0.5) return (1.0 - alpha) - psi_increment(-b, -zeta) / len;
  return psi_increment(zeta, b) / len - alpha;
}

// delta(zeta) from the second condition; requires Phi(zeta) < alpha.
double delta_for_zeta(double alpha, double zeta, const Tolerances& tol) {
  const double g0 = mean_cdf_gap(alpha, zeta, 0.0);
  if (g0 >= 0.0) return 0.0;
  double hi = 1.0;
  double ghi = mean_cdf_gap(alpha, zeta, hi);
  double lo = 0.0;
  double glo = g0;
  int guard = 0;
  while (ghi <= 0.0) {
    lo = hi;
    glo = ghi;
    hi *= 4.0;
    ghi = mean_cdf_gap(alpha, zeta, hi);
    if (++guard > 200 || !std::isfinite(hi)) {
      throw NoConvergence("solve_ratios: could not bracket delta");
    }
  }
  auto f = [&](double d) { return mean_cdf_gap(alpha, zeta, d); };
  const auto br = bracket_root(f, lo, hi, glo, ghi, tol.max_iterations, "solve_ratios(delta)");
  return 0.5 * (br.first + br.second);
}

void require_open_unit(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("{}: alpha must lie in (0, 1), got {}", what, alpha));
  }
}

double boundary_or_nan(double alpha) {
  try {
    return phase_boundary(alpha);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

[[noreturn]] void throw_infeasible(ControlPoint p) {
  const double rstar = boundary_or_nan(p.alpha);
  throw InfeasibleRegion(
      fmt::format("control point (alpha={}, r={}) lies beyond the phase boundary r*={:.10g}",
                  p.alpha, p.r, rstar),
      rstar);
}

}  // namespace

std::array<double, 3> residuals(ControlPoint p, double delta, double zeta, double Delta) {
  if (!(delta > 0.0) || !(Delta > 0.0)) {
    throw DomainError("residuals: delta and Delta must be positive");
  }
  const double a = zeta;
  const double b = zeta + delta;
  const double len = b - a;
  const double r1 = cdf_mass(a, b) - p.r;
  double r2;
  if (p.alpha >= 0.5) {
    r2 = psi_increment(-b, -a) / len - (1.0 - p.alpha);
  } else {
    r2 = psi_increment(a, b) / len - p.alpha;
  }
  const double scaled_lhs = p.r * delta * delta / (2.0 * Delta * Delta);
  const double r3 = inverse_q0_gap(p, Ratios{delta, zeta}) - scaled_lhs;
  return {r1, r2, r3};
}

Ratios solve_ratios(ControlPoint p) {
  require_open_unit(p.alpha, "solve_ratios");
  if (!(p.r > 0.0)) throw DomainError("solve_ratios: r must be positive");
  if (p.r >= 1.0) {
    throw DomainError("solve_ratios: no solution for r >= 1 (contours never pass r = 1)");
  }
  const Tolerances& tol = kDefaultTolerances;
  const double zeta_hi = specfun::norm_cdf_inv(p.alpha);

  auto mass_gap = [&](double zeta) {
    const double delta = delta_for_zeta(p.alpha, zeta, tol);
    return cdf_mass(zeta, zeta + delta) - p.r;
  };

  // At zeta_hi the interval collapses (mass 0); far left it carries almost all
  // the mass, so the gap changes sign in between.
  const double f_hi = -p.r;
  double step = 1.0;
  double zeta_lo = zeta_hi - step;
  double f_lo = mass_gap(zeta_lo);
  int guard = 0;
  while (f_lo <= 0.0) {
    step *= 2.0;
    zeta_lo = zeta_hi - step;
    f_lo = mass_gap(zeta_lo);
    if (++guard > 60) throw NoConvergence("solve_ratios: could not bracket zeta");
  }
  const auto br = bracket_root(mass_gap, zeta_lo, zeta_hi, f_lo, f_hi, tol.max_iterations,
                               "solve_ratios(zeta)");
  const double zeta = 0.5 * (br.first + br.second);
  // Snap delta to the representable width so every later use sees one interval.
  const double delta = (zeta + delta_for_zeta(p.alpha, zeta, tol)) - zeta;
  if (!(delta > 0.0)) throw NoConvergence("solve_ratios: collapsed to delta = 0");
  return {delta, zeta};
}

double inverse_q0_gap(ControlPoint p, const Ratios& ratios) {
  const double a = ratios.zeta;
  const double b = a + ratios.delta;
  const double d = b - a;
  if (a + b >= 0.0) {
    // Reflected form: W(b) - W(a) = d (a+b)/2 + W(-a) - W(-b).
    return (1.0 - p.alpha) * a * d + w_increment(-b, -a) - 0.5 * p.r;
  }
  return w_increment(a, b) - p.alpha * a * d - 0.5 * p.r - 0.5 * d * d;
}

OrderParameters solve_order_params(ControlPoint p) {
  if (p.alpha == 1.0) {
    throw DomainError(
        "solve_order_params: alpha = 1 is the minimax limit where Delta diverges; use "
        "analytic::minimax_solution");
  }
  require_open_unit(p.alpha, "solve_order_params");
  if (!(p.r > 0.0)) throw DomainError("solve_order_params: r must be positive");
  if (p.r >= 1.0) throw_infeasible(p);

  const Ratios ratios = solve_ratios(p);
  const double gap = inverse_q0_gap(p, ratios);
  if (!(gap > 0.0)) throw_infeasible(p);

  OrderParameters op;
  op.q0 = p.r / (2.0 * gap);
  const double root_q0 = std::sqrt(op.q0);
  op.delta = ratios.delta;
  op.zeta = ratios.zeta;
  op.Delta = ratios.delta * root_q0;
  op.epsilon = ratios.zeta * root_q0;

  const auto res = residuals(p, op.delta, op.zeta, op.Delta);
  for (double v : res) {
    if (!(std::abs(v) <= kDefaultTolerances.residual)) {
      throw NoConvergence(fmt::format(
          "solve_order_params: residual certificate failed at (alpha={}, r={}): {:.3e}", p.alpha,
          p.r, v));
    }
  }
  return op;
}

HatParameters hat_params(const OrderParameters& op) {
  HatParameters hp;
  hp.Delta_hat = 1.0 / (2.0 * op.Delta);
  hp.lambda = 2.0 * hp.Delta_hat;
  hp.q0_hat = (1.0 - op.q0) * 2.0 * hp.Delta_hat * hp.Delta_hat;
  return hp;
}

double q0_from_hat(const HatParameters& hp) {
  return 1.0 - hp.q0_hat / (2.0 * hp.Delta_hat * hp.Delta_hat);
}

RiskReport risk_report(ControlPoint p) { return risk_report(p, solve_order_params(p)); }

RiskReport risk_report(ControlPoint p, const OrderParameters& op) {
  RiskReport rep;
  const double root_q0 = std::sqrt(op.q0);
  rep.est_error = root_q0 - 1.0;
  rep.susceptibility = op.Delta / root_q0;
  rep.var_proxy = op.epsilon;
  rep.es_out_ratio = root_q0;
  rep.es_in_ratio = p.r / ((1.0 - p.alpha) * op.Delta * parametric::phi_factor(p.alpha));
  rep.weight_mean = 1.0;
  rep.weight_var = op.q0 - 1.0;
  return rep;
}

double phase_boundary(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError(fmt::format("phase_boundary: alpha must lie in (0, 1], got {}", alpha));
  }
  if (alpha == 1.0) return 0.5;

  auto gap = [alpha](double r) {
    const ControlPoint p{alpha, r};
    return inverse_q0_gap(p, solve_ratios(p));
  };
  double hi = 0.999;
  double f_hi = gap(hi);
  if (!(f_hi < 0.0)) throw NoConvergence("phase_boundary: gap does not change sign below r = 1");
  double lo = 0.5 * hi;
  double f_lo = gap(lo);
  int guard = 0;
  while (!(f_lo > 0.0)) {
    hi = lo;
    f_hi = f_lo;
    lo *= 0.5;
    f_lo = gap(lo);
    if (++guard > 60) throw NoConvergence("phase_boundary: could not bracket r*");
  }
  const auto br =
      bracket_root(gap, lo, hi, f_lo, f_hi, kDefaultTolerances.max_iterations, "phase_boundary");
  return 0.5 * (br.first + br.second);
}

double weight_density(ControlPoint p, double w) {
  return weight_density(solve_order_params(p), w);
}

double weight_density(const OrderParameters& op, double w) {
  const double var = op.q0 - 1.0;
  if (var <= 0.0) return w == 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const double sd = std::sqrt(var);
  return specfun::norm_pdf((w - 1.0) / sd) / sd;
}

}  // namespace esmap::replica
