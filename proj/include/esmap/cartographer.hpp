#pragma once

#include <string>
#include <vector>

// Maps of the replica solution over the (alpha, r) plane: metric grids,
// level-set tracing, phase-boundary curves and required sample-size tables.

namespace esmap::carto {

enum class Metric { EstError, Q0, Delta, Chi, Zeta, Epsilon, EsInRatio };

enum class Estimator { Historical, Parametric };

enum class CellStatus { Ok, Infeasible, OutOfDomain, NoConvergence };

std::string to_string(Metric m);
std::string to_string(Estimator e);
std::string to_string(CellStatus s);
/// Accepts est_error, q0, Delta, delta (or chi), zeta, epsilon, es_in_ratio.
Metric parse_metric(const std::string& name);
Estimator parse_estimator(const std::string& name);

/// delta and zeta stay defined beyond the phase boundary; the others do not.
bool requires_feasibility(Metric m);

/// Metric value at one control point; throws like replica::solve_order_params.
double evaluate_metric(Metric m, double alpha, double r);

struct GridCell {
  double value = 0.0;
  CellStatus status = CellStatus::Ok;
};

struct Grid {
  Metric metric = Metric::EstError;
  std::vector<double> alphas;
  std::vector<double> rs;
  std::vector<GridCell> cells;  ///< alpha-major: cells[i * rs.size() + j]

  const GridCell& at(std::size_t i, std::size_t j) const { return cells[i * rs.size() + j]; }
};

Grid evaluate_grid(Metric m, const std::vector<double>& alpha_grid, const std::vector<double>& r_grid);

struct ContourPoint {
  double alpha = 0.0;
  double r = 0.0;
  int branch = 0;  ///< 0 for the smallest r at this alpha
};

struct ContourLine {
  Metric metric = Metric::EstError;
  double level = 0.0;
  std::vector<ContourPoint> points;  ///< sorted by alpha, then branch
  std::vector<int> branch_counts;    ///< one entry per input alpha
};

struct ContourOptions {
  double r_min = 1e-8;
  int log_scan_points = 48;     ///< geometric scan on [r_min, 0.01 r_max]
  int linear_scan_points = 160;  ///< uniform scan on [0.01 r_max, r_max]
};

/// Every r in the admissible range of each alpha where the metric crosses the
/// level. Throws EmptyContour when no alpha yields a crossing.
ContourLine trace_contour(Metric m, double level, const std::vector<double>& alpha_grid,
                          const ContourOptions& options = {});

struct AspectTable {
  Estimator estimator = Estimator::Historical;
  std::vector<double> error_levels;  ///< sqrt(q0) - 1 targets
  std::vector<double> alphas;
  std::vector<long> entries;             ///< level-major, rounded T/N; 0 where the cell failed
  std::vector<double> raw;               ///< unrounded T/N
  std::vector<CellStatus> statuses;

  long entry(std::size_t level, std::size_t alpha) const { return entries[level * alphas.size() + alpha]; }
};

/// Aspect ratio at which the historical estimation error equals `error`.
double historical_r_for_error(double alpha, double error);

AspectTable required_aspect_table(Estimator est, const std::vector<double>& error_levels,
                                  const std::vector<double>& alphas);

/// r*(alpha) per grid point, tagged as the q0 = +infinity level set.
ContourLine phase_boundary_curve(Estimator est, const std::vector<double>& alpha_grid);

/// Inclusive LO:HI:STEP range, robust against accumulated rounding.
std::vector<double> make_range(double lo, double hi, double step);

}  // namespace esmap::carto
