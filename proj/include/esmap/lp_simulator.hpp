#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "esmap/simplex.hpp"

// Monte Carlo laboratory: draws synthetic return panels and solves the
// Rockafellar-Uryasev linear program
//
//   minimise  (1-alpha) T eps + sum_t u_t
//   s.t.      u_t >= 0,  u_t + eps + sum_i x_it w_i >= 0,  sum_i w_i = N
//
// exactly at a vertex. The engine works on the LP dual, whose variables are
// tail weights p_t in [0, 1/((1-alpha)T)] summing to one; the weights and
// eps are read back from its row prices. A sample whose dual is infeasible
// has an unbounded primal (apparent arbitrage) and the phase-1 prices give
// the improving ray.

namespace esmap::sim {

enum class Distribution { GaussianUnit, Student };

struct SampleSpec {
  int n_assets = 1;  ///< N
  int horizon = 1;   ///< T
  Distribution distribution = Distribution::GaussianUnit;
  double nu = 0.0;  ///< Student degrees of freedom, > 2
  std::uint64_t master_seed = 0;

  double aspect_ratio() const { return static_cast<double>(n_assets) / horizon; }
};

/// N x T panel, column t holds the returns of all assets at time t.
struct SampleMatrix {
  Eigen::MatrixXd returns;
};

enum class LpStatus { Optimal, Unbounded };

struct LPSolution {
  LpStatus status = LpStatus::Unbounded;
  Eigen::VectorXd weights;  ///< sums to N
  double epsilon_hat = 0.0;
  Eigen::VectorXd slacks;  ///< u_t
  double objective = 0.0;  ///< E recomputed from (w, eps, u)
  double dual_objective = 0.0;
  /// The optimal eps is a whole interval; epsilon_hat is the vertex reached.
  bool epsilon_degenerate = false;
  /// Improving ray (sum of ray_weights = 0) when Unbounded.
  Eigen::VectorXd ray_weights;
  double ray_epsilon = 0.0;
  long iterations = 0;
};

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<long> counts;
};

struct SampleRecord {
  long index = 0;
  LpStatus status = LpStatus::Unbounded;
  double q0_hat = 0.0;         ///< (1/N) sum w_i^2
  double est_error_hat = 0.0;  ///< sqrt(q0_hat) - 1
  double es_in = 0.0;          ///< E / ((1-alpha) T)
  double es_in_ratio = 0.0;    ///< es_in / (phi(alpha) sqrt(N))
  double epsilon_hat = 0.0;
  double epsilon_scaled = 0.0;  ///< epsilon_hat / sqrt(N), comparable to the replica epsilon
  Histogram weight_histogram;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
  double stderr_ = 0.0;
};

struct EnsembleOptions {
  double shift = 0.0;  ///< added to every return
  int histogram_bins = 20;
  bool keep_weights = false;
  lp::SimplexOptions simplex{};
};

struct EnsembleStats {
  long n_samples = 0;
  long n_feasible = 0;
  double feasible_fraction = 0.0;
  std::vector<SampleRecord> samples;  ///< in sample-index order, all statuses
  MetricSummary est_error;
  MetricSummary sqrt_q0;
  MetricSummary q0;
  MetricSummary epsilon_scaled;
  MetricSummary es_in_ratio;
  Histogram est_error_histogram;
  std::vector<double> pooled_weights;  ///< filled when keep_weights
};

struct SusceptibilityEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Stream for sample k is a pure function of (master_seed, k).
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index);

SampleMatrix generate_returns(const SampleSpec& spec, std::uint64_t sample_index);

LPSolution solve_es_lp(const SampleMatrix& x, double alpha, const lp::SimplexOptions& options = {});

Histogram make_histogram(const std::vector<double>& values, int bins);

SampleRecord sample_metrics(const LPSolution& sol, const SampleSpec& spec, double alpha,
                            int histogram_bins = 20);

EnsembleStats run_ensemble(const SampleSpec& spec, double alpha, long n_samples,
                           const EnsembleOptions& options = {});

double feasibility_probability(const SampleSpec& spec, double alpha, long n_samples);

/// Central difference of the ensemble mean of sqrt(q0_hat) under the uniform
/// shift x -> x +/- xi, with common random numbers.
SusceptibilityEstimate susceptibility_fd(const SampleSpec& spec, double alpha, double xi,
                                         long n_samples);

/// Delta / sqrt(q0) read off the in-sample ES through ES_in / ES_true =
/// r / ((1 - alpha) Delta phi(alpha)).
SusceptibilityEstimate in_sample_susceptibility(const EnsembleStats& stats, const SampleSpec& spec,
                                                double alpha);

}  // namespace esmap::sim
