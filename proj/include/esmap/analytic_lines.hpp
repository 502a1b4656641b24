#pragma once

#include "esmap/replica.hpp"

// Closed-form and perturbative solutions of the saddle-point equations on the
// special lines of the (alpha, r) plane: the r -> 0 axis, alpha = 1/2, the
// epsilon = 0 line and the minimax line alpha = 1.

namespace esmap::analytic {

struct MinimaxSolution {
  double rho = 0.0;           ///< -Phi^{-1}(r)
  double scaled_Delta = 0.0;  ///< limit of (1 - alpha) Delta
  double sqrt_q0 = 1.0;
  double epsilon = 0.0;
};

struct CriticalAsymptotics {
  double scaled_Delta = 0.0;
  double sqrt_q0 = 0.0;
  double epsilon = 0.0;
};

/// First-order expansion around r = 0. Throws DomainError if alpha <= r/2.
replica::OrderParameters small_r_expansion(double alpha, double r);

/// Exact solution on alpha = 1/2, where epsilon = -Delta/2.
replica::OrderParameters half_alpha_line(double r);

/// alpha at which epsilon vanishes for the given r in (0, 1/2).
double epsilon_zero_alpha(double r);

/// alpha = 1 (maximal loss) closed forms, 0 < r < 1/2.
MinimaxSolution minimax_solution(double r);

/// Leading behaviour of the minimax solution as r -> 1/2.
CriticalAsymptotics minimax_critical_asymptotics(double r);

}  // namespace esmap::analytic
