#pragma once

#include <Eigen/Dense>

// Dense bounded-variable revised primal simplex for
//
//   minimise c'x  subject to  A x = b,  lower <= x <= upper
//
// with infinite bounds allowed (free variables). Phase 1 runs on one
// artificial per row. Entering variables are priced by Dantzig's rule; after a
// run of degenerate pivots the engine switches to Bland's smallest-index rule
// until the objective moves again, which rules out cycling.

namespace esmap::lp {

enum class SimplexStatus { Optimal, Infeasible, Unbounded };

enum class PivotRule {
  Dantzig,  ///< most negative reduced cost, Bland fallback on degenerate stalls
  Bland,    ///< smallest-index entering and leaving variables throughout
};

struct BoundedLp {
  Eigen::MatrixXd A;  ///< m x n, column-major
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SimplexOptions {
  PivotRule rule = PivotRule::Dantzig;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 64;
  int degenerate_run_before_bland = 50;
  /// Hard cap; 0 selects 50 (m + n).
  long max_iterations = 0;
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::Infeasible;
  Eigen::VectorXd x;  ///< structural values (undefined unless Optimal)
  /// Row multipliers. For Optimal these are the dual prices of A x = b; for
  /// Infeasible they are the phase-1 multipliers, a Farkas certificate.
  Eigen::VectorXd y;
  Eigen::VectorXd reduced_costs;  ///< c - A'y at termination (phase 2 costs)
  double objective = 0.0;
  long iterations = 0;
  long bland_pivots = 0;
  long bound_flips = 0;
};

/// Solves the problem; throws NumericalError past the iteration budget.
SimplexResult solve_bounded(const BoundedLp& lp, const SimplexOptions& options = {});

}  // namespace esmap::lp
