#include "esmap/cli.hpp"

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "esmap/analytic_lines.hpp"
#include "esmap/cartographer.hpp"
#include "esmap/errors.hpp"
#include "esmap/lp_simulator.hpp"
#include "esmap/parametric.hpp"
#include "esmap/replica.hpp"
#include "esmap/report_io.hpp"

namespace esmap::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kDefaultAlphaGrid = "0.50:0.999:0.001";
const std::vector<double> kTableAlphas = {0.7, 0.8, 0.9, 0.91, 0.92, 0.93,
                                          0.94, 0.95, 0.96, 0.97, 0.975, 0.98};
const std::vector<double> kTableErrors = {5, 10, 15, 20, 25, 50};
const std::vector<double> kDefaultLevels = {0.02, 0.05, 0.1, 0.25, 0.5, 1, 2};

std::string num(double v) { return io::format_number(v); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
  return s;
}

void require_alpha(double alpha, bool allow_one = false) {
  const bool ok = alpha > 0.0 && (alpha < 1.0 || (allow_one && alpha == 1.0));
  if (!ok) {
    throw UsageError(fmt::format("--alpha must lie in (0, {}), got {}", allow_one ? "1]" : "1)", alpha));
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw UsageError(fmt::format("grid '{}' is not of the form LO:HI:STEP", spec));
  }
  try {
    return carto::make_range(lo, hi, step);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

struct DistChoice {
  sim::Distribution dist = sim::Distribution::GaussianUnit;
  double nu = 0.0;
};

DistChoice parse_dist(const std::string& s) {
  if (s == "gaussian") return {};
  const std::string prefix = "student:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = s.substr(prefix.size());
      const double nu = std::stod(tail, &used);
      if (used == tail.size() && nu > 2.0) return {sim::Distribution::Student, nu};
    } catch (const std::exception&) {
    }
    throw UsageError(fmt::format("--dist '{}': Student needs a numeric nu > 2", s));
  }
  throw UsageError(fmt::format("--dist '{}' is neither 'gaussian' nor 'student:NU'", s));
}

struct Common {
  std::string out_path;
  std::string format = "csv";

  void attach(CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the artifact to PATH instead of stdout");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  }
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw Error(fmt::format("failed writing '{}'", path));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimation error of Expected Shortfall: replica solutions, maps and simulations", "esmap"};
  app.set_version_flag("--version", std::string(ESMAP_VERSION));
  app.require_subcommand(1);

  Common common;

  double alpha = 0.0;
  double r = 0.0;
  auto* solve = app.add_subcommand("solve", "Solve the replica equations at one control point");
  solve->add_option("--alpha", alpha, "Confidence level in (0, 1]")->required();
  solve->add_option("--r", r, "Aspect ratio N/T")->required();

  std::string metric = "est_error";
  std::vector<double> levels = kDefaultLevels;
  std::string alpha_grid = kDefaultAlphaGrid;
  auto* contour = app.add_subcommand("contour", "Trace level sets of a metric over alpha");
  contour->add_option("--metric", metric, "est_error, q0, Delta, delta, zeta, epsilon or es_in_ratio");
  contour->add_option("--level", levels, "Level value(s), comma separated")->delimiter(',');
  contour->add_option("--alpha-grid", alpha_grid, "LO:HI:STEP");

  std::string r_grid = "0.01:0.99:0.01";
  auto* grid = app.add_subcommand("grid", "Evaluate a metric on an (alpha, r) grid");
  grid->add_option("--metric", metric);
  grid->add_option("--alpha-grid", alpha_grid, "LO:HI:STEP");
  grid->add_option("--r-grid", r_grid, "LO:HI:STEP");

  std::string estimator = "historical";
  std::vector<double> errors = kTableErrors;
  std::vector<double> alphas = kTableAlphas;
  auto* table = app.add_subcommand("table", "Required T/N for given estimation errors");
  table->add_option("--estimator", estimator)->check(CLI::IsMember({"historical", "parametric"}));
  table->add_option("--errors", errors, "Error levels in percent")->delimiter(',');
  table->add_option("--alphas", alphas, "Confidence levels")->delimiter(',');

  auto* boundary = app.add_subcommand("boundary", "Phase boundary r*(alpha)");
  boundary->add_option("--estimator", estimator)->check(CLI::IsMember({"historical", "parametric"}));
  boundary->add_option("--alpha-grid", alpha_grid, "LO:HI:STEP");

  std::string dist = "gaussian";
  int n_assets = 0;
  int horizon = 0;
  long samples = 500;
  std::uint64_t seed = 0;
  double shift = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble of the ES linear program");
  simulate->add_option("--dist", dist, "gaussian or student:NU");
  simulate->add_option("--N", n_assets, "Number of assets")->required();
  simulate->add_option("--T", horizon, "Sample length")->required();
  simulate->add_option("--alpha", alpha)->required();
  simulate->add_option("--samples", samples);
  simulate->add_option("--seed", seed);
  simulate->add_option("--shift", shift, "Uniform shift added to every return");

  double q0 = 0.0;
  auto* param = app.add_subcommand("parametric", "Estimation error of the parametric estimate");
  param->add_option("--alpha", alpha)->required();
  auto* q0_opt = param->add_option("--q0", q0, "Target q0, solved for r");
  auto* r_opt = param->add_option("--r", r);
  q0_opt->excludes(r_opt);
  r_opt->excludes(q0_opt);

  for (auto* sub : {solve, contour, grid, table, boundary, simulate, param}) common.attach(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  io::RunConfig cfg;
  cfg.format = io::parse_format(common.format);
  std::string text;

  try {
    if (solve->parsed()) {
      require_alpha(alpha, /*allow_one=*/true);
      if (!(r > 0.0)) throw UsageError("--r must be positive");
      cfg.command = "solve";
      cfg.params = {{"alpha", num(alpha)}, {"r", num(r)}, {"format", common.format}};
      if (alpha == 1.0) {
        if (r >= 0.5) {
          throw InfeasibleRegion(
              fmt::format("minimax problem is infeasible for r={} beyond the boundary r*=0.5", r), 0.5);
        }
        text = io::render_minimax(cfg, r, analytic::minimax_solution(r));
      } else {
        const replica::ControlPoint p{alpha, r};
        const auto op = replica::solve_order_params(p);
        text = io::render_solve(cfg, p, op, replica::hat_params(op), replica::risk_report(p, op));
      }
    } else if (contour->parsed()) {
      const carto::Metric m = carto::parse_metric(metric);
      const auto grid_alphas = parse_grid(alpha_grid);
      for (double a : grid_alphas) require_alpha(a);
      if (levels.empty()) throw UsageError("--level needs at least one value");
      cfg.command = "contour";
      cfg.params = {{"metric", metric}, {"level", join(levels)}, {"alpha_grid", alpha_grid},
                    {"format", common.format}};
      std::vector<carto::ContourLine> lines;
      for (double level : levels) {
        try {
          lines.push_back(carto::trace_contour(m, level, grid_alphas));
        } catch (const EmptyContour& e) {
          err << "warning: " << e.what() << "\n";
        }
      }
      if (lines.empty()) throw EmptyContour("contour: no requested level is attained on the grid");
      text = io::render_contours(cfg, lines);
    } else if (grid->parsed()) {
      const carto::Metric m = carto::parse_metric(metric);
      cfg.command = "grid";
      cfg.params = {{"metric", metric}, {"alpha_grid", alpha_grid}, {"r_grid", r_grid},
                    {"format", common.format}};
      text = io::render_grid(cfg, carto::evaluate_grid(m, parse_grid(alpha_grid), parse_grid(r_grid)));
    } else if (table->parsed()) {
      for (double a : alphas) require_alpha(a);
      std::vector<double> fractions;
      for (double e : errors) {
        if (!(e > 0.0)) throw UsageError("--errors must be positive percentages");
        fractions.push_back(e / 100.0);
      }
      cfg.command = "table";
      cfg.params = {{"estimator", estimator}, {"errors", join(errors)}, {"alphas", join(alphas)},
                    {"format", common.format}};
      text = io::render_table(
          cfg, carto::required_aspect_table(carto::parse_estimator(estimator), fractions, alphas));
    } else if (boundary->parsed()) {
      const auto grid_alphas = parse_grid(alpha_grid);
      for (double a : grid_alphas) require_alpha(a, /*allow_one=*/true);
      const carto::Estimator est = carto::parse_estimator(estimator);
      cfg.command = "boundary";
      cfg.params = {{"estimator", estimator}, {"alpha_grid", alpha_grid}, {"format", common.format}};
      text = io::render_boundary(cfg, est, carto::phase_boundary_curve(est, grid_alphas));
    } else if (simulate->parsed()) {
      require_alpha(alpha);
      if (n_assets < 1 || horizon < 1) throw UsageError("--N and --T must be positive");
      if (samples < 1) throw UsageError("--samples must be positive");
      const DistChoice d = parse_dist(dist);
      sim::SampleSpec spec;
      spec.n_assets = n_assets;
      spec.horizon = horizon;
      spec.distribution = d.dist;
      spec.nu = d.nu;
      spec.master_seed = seed;
      sim::EnsembleOptions opts;
      opts.shift = shift;
      cfg.command = "simulate";
      cfg.params = {{"dist", dist},       {"N", std::to_string(n_assets)},
                    {"T", std::to_string(horizon)}, {"alpha", num(alpha)},
                    {"samples", std::to_string(samples)}, {"shift", num(shift)},
                    {"format", common.format}};
      cfg.seed = seed;
      text = io::render_ensemble(cfg, sim::run_ensemble(spec, alpha, samples, opts));
    } else if (param->parsed()) {
      require_alpha(alpha);
      cfg.command = "parametric";
      parametric::ParametricPoint pt;
      if (q0_opt->count() > 0) {
        if (!(q0 >= 1.0)) throw UsageError("--q0 must be >= 1");
        cfg.params = {{"alpha", num(alpha)}, {"q0", num(q0)}, {"format", common.format}};
        pt = {alpha, parametric::contour_r_param(alpha, q0), q0};
      } else if (r_opt->count() > 0) {
        if (!(r > 0.0)) throw UsageError("--r must be positive");
        cfg.params = {{"alpha", num(alpha)}, {"r", num(r)}, {"format", common.format}};
        pt = parametric::evaluate(alpha, r);
      } else {
        throw UsageError("parametric needs exactly one of --q0 or --r");
      }
      text = io::render_parametric(cfg, pt, parametric::r_crit_param(alpha));
    }
    emit(text, common.out_path, out);
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleRegion& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const AllInfeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NoConvergence& e) {
    err << "no convergence: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
}

}  // namespace esmap::cli
