#include "esmap/report_io.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "esmap/errors.hpp"
#include "esmap/simplex.hpp"

namespace esmap::io {
namespace {

using Json = nlohmann::ordered_json;

const char* kTool = "esmap";

Json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json tolerances_json() {
  const replica::Tolerances& t = replica::kDefaultTolerances;
  const lp::SimplexOptions s{};
  Json j;
  j["replica_residual"] = t.residual;
  j["replica_step"] = t.step;
  j["replica_max_iterations"] = t.max_iterations;
  j["simplex_feasibility"] = s.feasibility_tol;
  j["simplex_optimality"] = s.optimality_tol;
  j["simplex_pivot"] = s.pivot_tol;
  j["simplex_refactor_interval"] = s.refactor_interval;
  j["simplex_degenerate_run_before_bland"] = s.degenerate_run_before_bland;
  return j;
}

Json envelope(const RunConfig& cfg) {
  Json j;
  j["tool"] = kTool;
  j["version"] = ESMAP_VERSION;
  j["command"] = cfg.command;
  Json conf = Json::object();
  for (const auto& [k, v] : cfg.params) conf[k] = v;
  j["config"] = conf;
  j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  j["tolerances"] = tolerances_json();
  return j;
}

std::string preamble(const RunConfig& cfg) {
  std::string s = fmt::format("# tool: {} {}\n# command: {}\n# config:", kTool, ESMAP_VERSION, cfg.command);
  for (const auto& [k, v] : cfg.params) s += fmt::format(" {}={}", k, v);
  s += "\n";
  s += cfg.seed ? fmt::format("# seed: {}\n", *cfg.seed) : std::string("# seed: none\n");
  s += "# tolerances:";
  const Json tol = tolerances_json();
  for (const auto& [k, v] : tol.items()) s += fmt::format(" {}={}", k, v.dump());
  s += "\n";
  return s;
}

std::string finish(Json j) { return j.dump(2) + "\n"; }

std::string line(std::initializer_list<std::string> fields) {
  std::string s;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) s += ',';
    s += f;
    first = false;
  }
  s += '\n';
  return s;
}

const char* status_name(sim::LpStatus s) {
  return s == sim::LpStatus::Optimal ? "optimal" : "unbounded";
}

Json summary_json(const sim::MetricSummary& m) {
  Json j;
  j["mean"] = num(m.mean);
  j["std"] = num(m.std);
  j["stderr"] = num(m.stderr_);
  return j;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw DomainError(fmt::format("unknown output format '{}'", name));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string render_solve(const RunConfig& cfg, replica::ControlPoint p,
                         const replica::OrderParameters& op, const replica::HatParameters& hp,
                         const replica::RiskReport& rep) {
  const std::vector<std::pair<std::string, double>> rows = {
      {"alpha", p.alpha},
      {"r", p.r},
      {"q0", op.q0},
      {"Delta", op.Delta},
      {"epsilon", op.epsilon},
      {"delta", op.delta},
      {"zeta", op.zeta},
      {"lambda", hp.lambda},
      {"Delta_hat", hp.Delta_hat},
      {"q0_hat", hp.q0_hat},
      {"est_error", rep.est_error},
      {"susceptibility", rep.susceptibility},
      {"var_proxy", rep.var_proxy},
      {"es_out_ratio", rep.es_out_ratio},
      {"es_in_ratio", rep.es_in_ratio},
      {"weight_mean", rep.weight_mean},
      {"weight_var", rep.weight_var},
  };
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    Json res;
    for (const auto& [k, v] : rows) res[k] = num(v);
    j["result"] = res;
    return finish(j);
  }
  std::string s = preamble(cfg) + "quantity,value\n";
  for (const auto& [k, v] : rows) s += line({k, format_number(v)});
  return s;
}

std::string render_minimax(const RunConfig& cfg, double r, const analytic::MinimaxSolution& sol) {
  const std::vector<std::pair<std::string, double>> rows = {
      {"alpha", 1.0},
      {"r", r},
      {"rho", sol.rho},
      {"scaled_Delta", sol.scaled_Delta},
      {"sqrt_q0", sol.sqrt_q0},
      {"q0", sol.sqrt_q0 * sol.sqrt_q0},
      {"est_error", sol.sqrt_q0 - 1.0},
      {"epsilon", sol.epsilon},
  };
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    Json res;
    res["model"] = "minimax";
    for (const auto& [k, v] : rows) res[k] = num(v);
    j["result"] = res;
    return finish(j);
  }
  std::string s = preamble(cfg) + "# model: minimax (Delta reported as (1-alpha) Delta)\n";
  s += "quantity,value\n";
  for (const auto& [k, v] : rows) s += line({k, format_number(v)});
  return s;
}

std::string render_contours(const RunConfig& cfg, const std::vector<carto::ContourLine>& lines) {
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    Json arr = Json::array();
    for (const auto& c : lines) {
      Json lj;
      lj["metric"] = carto::to_string(c.metric);
      lj["level"] = num(c.level);
      Json pts = Json::array();
      for (const auto& p : c.points) pts.push_back({{"alpha", p.alpha}, {"r", p.r}, {"branch", p.branch}});
      lj["points"] = pts;
      lj["branch_counts"] = c.branch_counts;
      arr.push_back(lj);
    }
    j["contours"] = arr;
    return finish(j);
  }
  std::string s = preamble(cfg) + "alpha,r,metric,level,branch\n";
  for (const auto& c : lines) {
    const std::string metric = carto::to_string(c.metric);
    const std::string level = format_number(c.level);
    for (const auto& p : c.points) {
      s += line({format_number(p.alpha), format_number(p.r), metric, level, std::to_string(p.branch)});
    }
  }
  return s;
}

std::string render_grid(const RunConfig& cfg, const carto::Grid& grid) {
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    j["metric"] = carto::to_string(grid.metric);
    Json cells = Json::array();
    for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
      for (std::size_t k = 0; k < grid.rs.size(); ++k) {
        const auto& c = grid.at(i, k);
        cells.push_back({{"alpha", grid.alphas[i]},
                         {"r", grid.rs[k]},
                         {"value", c.status == carto::CellStatus::Ok ? Json(c.value) : Json(nullptr)},
                         {"status", carto::to_string(c.status)}});
      }
    }
    j["cells"] = cells;
    return finish(j);
  }
  std::string s = preamble(cfg) + "alpha,r,value,status\n";
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    for (std::size_t k = 0; k < grid.rs.size(); ++k) {
      const auto& c = grid.at(i, k);
      s += line({format_number(grid.alphas[i]), format_number(grid.rs[k]),
                 c.status == carto::CellStatus::Ok ? format_number(c.value) : std::string(),
                 carto::to_string(c.status)});
    }
  }
  return s;
}

std::string render_table(const RunConfig& cfg, const carto::AspectTable& table) {
  const std::size_t na = table.alphas.size();
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    j["estimator"] = carto::to_string(table.estimator);
    j["alphas"] = table.alphas;
    Json rows = Json::array();
    for (std::size_t i = 0; i < table.error_levels.size(); ++i) {
      Json row;
      row["error"] = table.error_levels[i];
      Json entries = Json::array();
      Json raw = Json::array();
      Json status = Json::array();
      for (std::size_t k = 0; k < na; ++k) {
        const std::size_t idx = i * na + k;
        const bool ok = table.statuses[idx] == carto::CellStatus::Ok;
        entries.push_back(ok ? Json(table.entries[idx]) : Json(nullptr));
        raw.push_back(ok ? Json(table.raw[idx]) : Json(nullptr));
        status.push_back(carto::to_string(table.statuses[idx]));
      }
      row["T_over_N"] = entries;
      row["T_over_N_unrounded"] = raw;
      row["status"] = status;
      rows.push_back(row);
    }
    j["rows"] = rows;
    return finish(j);
  }
  // Rows are error levels, columns are alphas, as in a printed table.
  std::string s = preamble(cfg);
  s += fmt::format("# estimator: {}\n", carto::to_string(table.estimator));
  s += "error";
  for (double a : table.alphas) s += "," + format_number(a);
  s += "\n";
  for (std::size_t i = 0; i < table.error_levels.size(); ++i) {
    s += format_number(table.error_levels[i]);
    for (std::size_t k = 0; k < na; ++k) {
      const std::size_t idx = i * na + k;
      s += ",";
      s += table.statuses[idx] == carto::CellStatus::Ok ? std::to_string(table.entries[idx])
                                                        : carto::to_string(table.statuses[idx]);
    }
    s += "\n";
  }
  return s;
}

std::string render_boundary(const RunConfig& cfg, carto::Estimator est, const carto::ContourLine& c) {
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    j["estimator"] = carto::to_string(est);
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back({{"alpha", p.alpha}, {"r", p.r}});
    j["points"] = pts;
    return finish(j);
  }
  std::string s = preamble(cfg) + fmt::format("# estimator: {}\n", carto::to_string(est));
  s += "alpha,r,metric,level,branch\n";
  for (const auto& p : c.points) {
    s += line({format_number(p.alpha), format_number(p.r), carto::to_string(c.metric),
               format_number(c.level), std::to_string(p.branch)});
  }
  return s;
}

std::string render_ensemble(const RunConfig& cfg, const sim::EnsembleStats& st) {
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    Json sum;
    sum["n_samples"] = st.n_samples;
    sum["n_feasible"] = st.n_feasible;
    sum["feasible_fraction"] = st.feasible_fraction;
    sum["est_error"] = summary_json(st.est_error);
    sum["sqrt_q0"] = summary_json(st.sqrt_q0);
    sum["q0_hat"] = summary_json(st.q0);
    sum["epsilon_scaled"] = summary_json(st.epsilon_scaled);
    sum["es_in_ratio"] = summary_json(st.es_in_ratio);
    sum["est_error_histogram"] = {{"edges", st.est_error_histogram.edges},
                                  {"counts", st.est_error_histogram.counts}};
    j["summary"] = sum;
    return finish(j);
  }
  std::string s = preamble(cfg);
  s += fmt::format("# feasible: {}/{} ({})\n", st.n_feasible, st.n_samples,
                   format_number(st.feasible_fraction));
  auto summary_line = [](const char* name, const sim::MetricSummary& m) {
    return fmt::format("# {}: mean={} std={} stderr={}\n", name, format_number(m.mean),
                       format_number(m.std), format_number(m.stderr_));
  };
  s += summary_line("est_error", st.est_error);
  s += summary_line("epsilon_scaled", st.epsilon_scaled);
  s += summary_line("es_in_ratio", st.es_in_ratio);
  s += "index,status,q0_hat,est_error_hat,epsilon_hat,es_in_ratio\n";
  for (const auto& rec : st.samples) {
    if (rec.status == sim::LpStatus::Optimal) {
      s += line({std::to_string(rec.index), status_name(rec.status), format_number(rec.q0_hat),
                 format_number(rec.est_error_hat), format_number(rec.epsilon_hat),
                 format_number(rec.es_in_ratio)});
    } else {
      s += line({std::to_string(rec.index), status_name(rec.status), "", "", "", ""});
    }
  }
  return s;
}

std::string render_parametric(const RunConfig& cfg, const parametric::ParametricPoint& pt,
                              double r_crit) {
  const std::vector<std::pair<std::string, double>> rows = {
      {"alpha", pt.alpha},
      {"r", pt.r},
      {"q0", pt.q0},
      {"sqrt_q0", std::sqrt(pt.q0)},
      {"est_error", std::sqrt(pt.q0) - 1.0},
      {"T_over_N", 1.0 / pt.r},
      {"r_crit", r_crit},
  };
  if (cfg.format == Format::Json) {
    Json j = envelope(cfg);
    Json res;
    for (const auto& [k, v] : rows) res[k] = num(v);
    j["result"] = res;
    return finish(j);
  }
  std::string s = preamble(cfg) + "quantity,value\n";
  for (const auto& [k, v] : rows) s += line({k, format_number(v)});
  return s;
}

}  // namespace esmap::io
