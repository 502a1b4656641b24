#include "esmap/cartographer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "esmap/errors.hpp"
#include "esmap/parametric.hpp"
#include "esmap/replica.hpp"

namespace esmap::carto {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRatioRMax = 0.9999;

struct RootTolerance {
  bool operator()(double a, double b) const {
    return std::abs(b - a) <= 1e-15 * std::max(1e-300, std::min(std::abs(a), std::abs(b)));
  }
};

template <class F>
double refine_root(F&& f, double lo, double hi, double flo, double fhi) {
  std::uintmax_t iters = 200;
  const auto br = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, RootTolerance{}, iters);
  // Return the endpoint with the smaller residual, not the midpoint, so the
  // level is reproduced as closely as the metric allows.
  const double fa = std::abs(f(br.first));
  const double fb = std::abs(f(br.second));
  return fa <= fb ? br.first : br.second;
}

double metric_or_nan(Metric m, double alpha, double r) {
  try {
    return evaluate_metric(m, alpha, r);
  } catch (const Error&) {
    return kNaN;
  }
}

double admissible_r_max(Metric m, double alpha) {
  if (!requires_feasibility(m)) return kRatioRMax;
  return replica::phase_boundary(alpha) * (1.0 - 1e-6);
}

std::vector<double> scan_points(double r_min, double r_max, const ContourOptions& opt) {
  std::vector<double> pts;
  const double split = std::max(r_min, 0.01 * r_max);
  const int nlog = std::max(opt.log_scan_points, 2);
  const double ratio = std::log(split / r_min);
  for (int i = 0; i < nlog; ++i) pts.push_back(r_min * std::exp(ratio * i / nlog));
  const int nlin = std::max(opt.linear_scan_points, 2);
  for (int i = 0; i <= nlin; ++i) pts.push_back(split + (r_max - split) * i / nlin);
  return pts;
}

}  // namespace

std::string to_string(Metric m) {
  switch (m) {
    case Metric::EstError: return "est_error";
    case Metric::Q0: return "q0";
    case Metric::Delta: return "Delta";
    case Metric::Chi: return "delta";
    case Metric::Zeta: return "zeta";
    case Metric::Epsilon: return "epsilon";
    case Metric::EsInRatio: return "es_in_ratio";
  }
  return "?";
}

std::string to_string(Estimator e) {
  return e == Estimator::Historical ? "historical" : "parametric";
}

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Infeasible: return "infeasible";
    case CellStatus::OutOfDomain: return "out_of_domain";
    case CellStatus::NoConvergence: return "no_convergence";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  if (name == "est_error") return Metric::EstError;
  if (name == "q0") return Metric::Q0;
  if (name == "Delta") return Metric::Delta;
  if (name == "delta" || name == "chi") return Metric::Chi;
  if (name == "zeta") return Metric::Zeta;
  if (name == "epsilon") return Metric::Epsilon;
  if (name == "es_in_ratio") return Metric::EsInRatio;
  throw DomainError(fmt::format("unknown metric '{}'", name));
}

Estimator parse_estimator(const std::string& name) {
  if (name == "historical") return Estimator::Historical;
  if (name == "parametric") return Estimator::Parametric;
  throw DomainError(fmt::format("unknown estimator '{}'", name));
}

bool requires_feasibility(Metric m) { return m != Metric::Chi && m != Metric::Zeta; }

double evaluate_metric(Metric m, double alpha, double r) {
  const replica::ControlPoint p{alpha, r};
  if (!requires_feasibility(m)) {
    const replica::Ratios rt = replica::solve_ratios(p);
    return m == Metric::Chi ? rt.delta : rt.zeta;
  }
  const replica::OrderParameters op = replica::solve_order_params(p);
  switch (m) {
    case Metric::EstError: return std::sqrt(op.q0) - 1.0;
    case Metric::Q0: return op.q0;
    case Metric::Delta: return op.Delta;
    case Metric::Epsilon: return op.epsilon;
    case Metric::EsInRatio: return replica::risk_report(p, op).es_in_ratio;
    default: break;
  }
  return op.q0;
}

Grid evaluate_grid(Metric m, const std::vector<double>& alpha_grid, const std::vector<double>& r_grid) {
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(alpha_grid) || !increasing(r_grid)) {
    throw DomainError("evaluate_grid: grids must be strictly increasing");
  }
  Grid g;
  g.metric = m;
  g.alphas = alpha_grid;
  g.rs = r_grid;
  g.cells.resize(alpha_grid.size() * r_grid.size());
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      GridCell& c = g.cells[i * r_grid.size() + j];
      const double a = alpha_grid[i];
      const double r = r_grid[j];
      if (!(a > 0.0 && a < 1.0) || !(r > 0.0 && r < 1.0)) {
        c = {kNaN, CellStatus::OutOfDomain};
        continue;
      }
      try {
        c = {evaluate_metric(m, a, r), CellStatus::Ok};
      } catch (const InfeasibleRegion&) {
        c = {kNaN, CellStatus::Infeasible};
      } catch (const DomainError&) {
        c = {kNaN, CellStatus::OutOfDomain};
      } catch (const Error&) {
        c = {kNaN, CellStatus::NoConvergence};
      }
    }
  }
  return g;
}

ContourLine trace_contour(Metric m, double level, const std::vector<double>& alpha_grid,
                          const ContourOptions& options) {
  ContourLine line;
  line.metric = m;
  line.level = level;
  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());

  for (double alpha : alphas) {
    int branches = 0;
    double r_max = kNaN;
    try {
      r_max = admissible_r_max(m, alpha);
    } catch (const Error&) {
      line.branch_counts.push_back(0);
      continue;
    }
    auto f = [&](double r) { return evaluate_metric(m, alpha, r) - level; };
    const std::vector<double> pts = scan_points(options.r_min, r_max, options);
    double prev_r = kNaN;
    double prev_f = kNaN;
    for (double r : pts) {
      const double fr = metric_or_nan(m, alpha, r) - level;
      if (fr == 0.0) {
        line.points.push_back({alpha, r, branches++});
      } else if (std::isfinite(prev_f) && std::isfinite(fr) && (prev_f < 0.0) != (fr < 0.0) &&
                 prev_f != 0.0) {
        try {
          const double root = refine_root(f, prev_r, r, prev_f, fr);
          line.points.push_back({alpha, root, branches++});
        } catch (const Error&) {
        }
      }
      prev_r = r;
      prev_f = fr;
    }
    line.branch_counts.push_back(branches);
  }
  if (line.points.empty()) {
    throw EmptyContour(fmt::format("trace_contour: no alpha in the grid brackets {} = {}",
                                   to_string(m), level));
  }
  return line;
}

double historical_r_for_error(double alpha, double error) {
  if (!(error > 0.0)) throw DomainError("historical_r_for_error: error level must be positive");
  const double target = 1.0 + error;
  const double lo = 1e-8;
  const double hi = replica::phase_boundary(alpha) * (1.0 - 1e-6);
  auto f = [&](double r) {
    return std::sqrt(replica::solve_order_params({alpha, r}).q0) - target;
  };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw NoConvergence(fmt::format(
        "historical_r_for_error: error {} not bracketed on [{}, {}] at alpha={}", error, lo, hi, alpha));
  }
  return refine_root(f, lo, hi, flo, fhi);
}

AspectTable required_aspect_table(Estimator est, const std::vector<double>& error_levels,
                                  const std::vector<double>& alphas) {
  AspectTable tab;
  tab.estimator = est;
  tab.error_levels = error_levels;
  tab.alphas = alphas;
  const std::size_t n = error_levels.size() * alphas.size();
  tab.entries.assign(n, 0);
  tab.raw.assign(n, kNaN);
  tab.statuses.assign(n, CellStatus::Ok);
  for (std::size_t i = 0; i < error_levels.size(); ++i) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const std::size_t k = i * alphas.size() + j;
      const double e = error_levels[i];
      try {
        if (!(e > 0.0)) throw DomainError("required_aspect_table: error levels must be positive");
        const double r = est == Estimator::Historical
                             ? historical_r_for_error(alphas[j], e)
                             : parametric::contour_r_param(alphas[j], (1.0 + e) * (1.0 + e));
        tab.raw[k] = 1.0 / r;
        tab.entries[k] = std::lround(tab.raw[k]);  // half away from zero
      } catch (const InfeasibleRegion&) {
        tab.statuses[k] = CellStatus::Infeasible;
      } catch (const DomainError&) {
        tab.statuses[k] = CellStatus::OutOfDomain;
      } catch (const Error&) {
        tab.statuses[k] = CellStatus::NoConvergence;
      }
    }
  }
  return tab;
}

ContourLine phase_boundary_curve(Estimator est, const std::vector<double>& alpha_grid) {
  ContourLine line;
  line.metric = Metric::Q0;
  line.level = std::numeric_limits<double>::infinity();
  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  for (double a : alphas) {
    const double r = est == Estimator::Historical ? replica::phase_boundary(a)
                                                  : (a == 1.0 ? 1.0 : parametric::r_crit_param(a));
    line.points.push_back({a, r, 0});
    line.branch_counts.push_back(1);
  }
  return line;
}

std::vector<double> make_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw DomainError(fmt::format("range {}:{}:{} is empty or has a non-positive step", lo, hi, step));
  }
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n) + 1);
  // Snap to 12 significant digits so 0.5 + 9 * 0.05 prints as 0.95.
  for (long i = 0; i <= n; ++i) v.push_back(std::stod(fmt::format("{:.12g}", lo + static_cast<double>(i) * step)));
  return v;
}

}  // namespace esmap::carto
