#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esmap/analytic_lines.hpp"
#include "esmap/cartographer.hpp"
#include "esmap/lp_simulator.hpp"
#include "esmap/parametric.hpp"
#include "esmap/replica.hpp"

// Serialisation of results to CSV (with '#' metadata lines) and JSON. Every
// artifact carries the tool version, the echoed configuration, the seed and
// the solver tolerances, and is rendered deterministically.

namespace esmap::io {

enum class Format { Csv, Json };

Format parse_format(const std::string& name);

struct RunConfig {
  std::string command;
  /// Parameters in the order they should be echoed.
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<std::uint64_t> seed;
  Format format = Format::Csv;
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

std::string render_solve(const RunConfig& cfg, replica::ControlPoint p,
                         const replica::OrderParameters& op, const replica::HatParameters& hp,
                         const replica::RiskReport& rep);

std::string render_minimax(const RunConfig& cfg, double r, const analytic::MinimaxSolution& sol);

/// Several level sets of one metric in a single artifact.
std::string render_contours(const RunConfig& cfg, const std::vector<carto::ContourLine>& lines);

std::string render_grid(const RunConfig& cfg, const carto::Grid& grid);

std::string render_table(const RunConfig& cfg, const carto::AspectTable& table);

std::string render_boundary(const RunConfig& cfg, carto::Estimator est, const carto::ContourLine& line);

std::string render_ensemble(const RunConfig& cfg, const sim::EnsembleStats& stats);

std::string render_parametric(const RunConfig& cfg, const parametric::ParametricPoint& pt,
                              double r_crit);

}  // namespace esmap::io
