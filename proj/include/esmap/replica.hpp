#pragma once

#include <array>

// Replica-symmetric saddle point of the ES estimation-error problem for i.i.d.
// Gaussian returns in the limit N, T -> infinity with r = N/T fixed.
//
// The reduced first-order conditions in the ratios delta = Delta/sqrt(q0) and
// zeta = epsilon/sqrt(q0) read
//
//   r     = Phi(delta+zeta) - Phi(zeta)
//   alpha = [Psi(delta+zeta) - Psi(zeta)] / delta
//   1/(2 Delta^2) + (alpha/r)(zeta/delta) + 1/(2 delta^2) + 1/(2r)
//         = [W(delta+zeta) - W(zeta)] / (r delta^2)
//
// The first two close on (delta, zeta). Multiplying the third by r delta^2
// and using q0 = (Delta/delta)^2 leaves q0 explicit:
//
//   r / (2 q0) = W(delta+zeta) - W(zeta) - alpha zeta delta - r/2 - delta^2/2,
//
// so the estimation error follows without a further root search. The phase
// boundary r*(alpha) is where the right-hand side reaches zero.

namespace esmap::replica {

struct ControlPoint {
  double alpha = 0.0;  ///< confidence level, 0 < alpha <= 1
  double r = 0.0;      ///< aspect ratio N/T
};

struct Ratios {
  double delta = 0.0;  ///< Delta / sqrt(q0), the ES susceptibility chi
  double zeta = 0.0;   ///< epsilon / sqrt(q0)
};

struct OrderParameters {
  double q0 = 1.0;       ///< mean squared weight; sqrt(q0) - 1 is the relative ES error
  double Delta = 0.0;    ///< susceptibility of the weights to a shift of the returns
  double epsilon = 0.0;  ///< VaR of the ES-optimised portfolio
  double delta = 0.0;
  double zeta = 0.0;
};

struct HatParameters {
  double lambda = 0.0;
  double Delta_hat = 0.0;
  double q0_hat = 0.0;
};

struct RiskReport {
  double est_error = 0.0;       ///< sqrt(q0) - 1
  double susceptibility = 0.0;  ///< chi = Delta / sqrt(q0)
  double var_proxy = 0.0;       ///< epsilon
  double es_out_ratio = 1.0;    ///< ES_out / ES_true = sqrt(q0)
  double es_in_ratio = 1.0;     ///< ES_in / ES_true = r / ((1-alpha) Delta phi(alpha))
  double weight_mean = 1.0;
  double weight_var = 0.0;  ///< q0 - 1
};

/// Numerical settings shared by the solvers.
struct Tolerances {
  double residual = 1e-10;
  double step = 1e-12;
  int max_iterations = 200;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Residuals of the reduced system at (delta, zeta, Delta). The third entry is
/// the third condition multiplied through by r delta^2, which keeps it O(r)
/// everywhere instead of O(1/r^2) near the r = 0 axis.
std::array<double, 3> residuals(ControlPoint p, double delta, double zeta, double Delta);

/// Solves the closed pair of conditions for (delta, zeta). Valid for
/// 0 < alpha < 1 and 0 < r < 1, including beyond the phase boundary.
Ratios solve_ratios(ControlPoint p);

/// r / (2 q0) as a function of the control point; positive exactly inside
/// the feasible region.
double inverse_q0_gap(ControlPoint p, const Ratios& ratios);

/// Full replica solution. Throws InfeasibleRegion on or beyond r*(alpha) and
/// DomainError for alpha = 1 (use analytic::minimax_solution there).
OrderParameters solve_order_params(ControlPoint p);

HatParameters hat_params(const OrderParameters& op);

/// Rebuilds q0 from the conjugate variables: q0 = 1 - q0_hat / (2 Delta_hat^2).
double q0_from_hat(const HatParameters& hp);

RiskReport risk_report(ControlPoint p);
RiskReport risk_report(ControlPoint p, const OrderParameters& op);

/// Critical aspect ratio r*(alpha); exactly 1/2 at alpha = 1.
double phase_boundary(double alpha);

/// Density of the sample-averaged weight distribution, Normal(1, q0 - 1).
/// Returns +infinity at w = 1 (and 0 elsewhere) when q0 = 1.
double weight_density(ControlPoint p, double w);
double weight_density(const OrderParameters& op, double w);

}  // namespace esmap::replica
