#include "esmap/lp_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "esmap/errors.hpp"
#include "esmap/parametric.hpp"

namespace esmap::sim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate(const SampleSpec& spec) {
  if (spec.n_assets < 1 || spec.horizon < 1) {
    throw DomainError(fmt::format("SampleSpec: need N >= 1 and T >= 1, got N={} T={}",
                                  spec.n_assets, spec.horizon));
  }
  if (spec.distribution == Distribution::Student && !(spec.nu > 2.0)) {
    throw DomainError(fmt::format("SampleSpec: Student distribution needs nu > 2, got {}", spec.nu));
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("solve_es_lp: alpha must lie in (0, 1), got {}", alpha));
  }
}

MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
    s.stderr_ = s.std / std::sqrt(n);
  }
  return s;
}

// The optimal eps is a whole interval exactly when k = (1-alpha)T is an
// integer and the k-th and (k+1)-th largest losses differ.
bool epsilon_interval(const Eigen::VectorXd& losses, double alpha) {
  const long T = losses.size();
  const double k = (1.0 - alpha) * static_cast<double>(T);
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9 * std::max(1.0, k)) return false;
  const long K = static_cast<long>(kr);
  if (K < 1 || K >= T) return false;
  std::vector<double> sorted(losses.data(), losses.data() + T);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double scale = std::max(1.0, std::abs(sorted[static_cast<std::size_t>(K - 1)]));
  return sorted[static_cast<std::size_t>(K - 1)] - sorted[static_cast<std::size_t>(K)] > 1e-12 * scale;
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index) {
  return splitmix64(master_seed ^ splitmix64(sample_index + 0x632be59bd9b4e019ULL));
}

SampleMatrix generate_returns(const SampleSpec& spec, std::uint64_t sample_index) {
  validate(spec);
  std::mt19937_64 rng(sample_seed(spec.master_seed, sample_index));
  SampleMatrix m;
  m.returns.resize(spec.n_assets, spec.horizon);
  double* data = m.returns.data();
  const long count = m.returns.size();
  // Column-major fill: a longer horizon extends the same panel.
  if (spec.distribution == Distribution::GaussianUnit) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (long k = 0; k < count; ++k) data[k] = dist(rng);
  } else {
    std::student_t_distribution<double> dist(spec.nu);
    for (long k = 0; k < count; ++k) data[k] = dist(rng);
  }
  return m;
}

LPSolution solve_es_lp(const SampleMatrix& sample, double alpha, const lp::SimplexOptions& options) {
  require_alpha(alpha);
  const Eigen::MatrixXd& x = sample.returns;
  const long N = x.rows();
  const long T = x.cols();
  if (N < 1 || T < 1) throw DomainError("solve_es_lp: empty return matrix");
  if (!x.allFinite()) throw DomainError("solve_es_lp: returns must be finite");

  // Dual in tail weights p_t scaled to sum to one, plus the free budget price mu:
  //   min -N mu  s.t.  X p + mu 1 = 0,  sum p = 1,  0 <= p_t <= 1/((1-alpha) T).
  const double k = (1.0 - alpha) * static_cast<double>(T);
  lp::BoundedLp prob;
  prob.A.setZero(N + 1, T + 1);
  prob.A.topLeftCorner(N, T) = x;
  prob.A.row(N).head(T).setOnes();
  prob.A.col(T).head(N).setOnes();
  prob.b.setZero(N + 1);
  prob.b(N) = 1.0;
  prob.c.setZero(T + 1);
  prob.c(T) = -static_cast<double>(N);
  prob.lower.setZero(T + 1);
  prob.upper.setConstant(T + 1, 1.0 / k);
  prob.lower(T) = -std::numeric_limits<double>::infinity();
  prob.upper(T) = std::numeric_limits<double>::infinity();

  const lp::SimplexResult res = lp::solve_bounded(prob, options);

  LPSolution sol;
  sol.iterations = res.iterations;
  if (res.status == lp::SimplexStatus::Infeasible) {
    // Phase-1 prices give (dw, deps) with sum dw = 0 and
    // (1-alpha) T deps + sum_t max(0, -(x_t.dw + deps)) < 0.
    sol.status = LpStatus::Unbounded;
    sol.ray_weights = -res.y.head(N);
    sol.ray_epsilon = -res.y(N);
    return sol;
  }
  if (res.status == lp::SimplexStatus::Unbounded) {
    throw NumericalError("solve_es_lp: tail-weight problem reported unbounded");
  }

  sol.status = LpStatus::Optimal;
  sol.weights = -res.y.head(N);
  sol.epsilon_hat = -res.y(N);
  const Eigen::VectorXd losses = -(x.transpose() * sol.weights);
  sol.slacks = (losses.array() - sol.epsilon_hat).max(0.0).matrix();
  sol.objective = k * sol.epsilon_hat + sol.slacks.sum();
  sol.dual_objective = -res.objective * k;
  sol.epsilon_degenerate = epsilon_interval(losses, alpha);
  return sol;
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  if (values.empty() || bins < 1) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn;
  double hi = *mx;
  if (!(hi > lo)) {
    bins = 1;
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto b = static_cast<long>((v - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

SampleRecord sample_metrics(const LPSolution& sol, const SampleSpec& spec, double alpha,
                            int histogram_bins) {
  if (sol.status != LpStatus::Optimal) {
    throw DomainError("sample_metrics: solution is unbounded, no portfolio to measure");
  }
  require_alpha(alpha);
  const double n = static_cast<double>(sol.weights.size());
  const double k = (1.0 - alpha) * spec.horizon;
  SampleRecord rec;
  rec.status = LpStatus::Optimal;
  rec.q0_hat = sol.weights.squaredNorm() / n;
  rec.est_error_hat = std::sqrt(rec.q0_hat) - 1.0;
  rec.es_in = sol.objective / k;
  rec.es_in_ratio = rec.es_in / (parametric::phi_factor(alpha) * std::sqrt(n));
  rec.epsilon_hat = sol.epsilon_hat;
  rec.epsilon_scaled = sol.epsilon_hat / std::sqrt(n);
  rec.weight_histogram = make_histogram(
      std::vector<double>(sol.weights.data(), sol.weights.data() + sol.weights.size()),
      histogram_bins);
  return rec;
}

EnsembleStats run_ensemble(const SampleSpec& spec, double alpha, long n_samples,
                           const EnsembleOptions& options) {
  validate(spec);
  require_alpha(alpha);
  if (n_samples < 1) throw DomainError("run_ensemble: n_samples must be >= 1");

  EnsembleStats st;
  st.n_samples = n_samples;
  st.samples.reserve(static_cast<std::size_t>(n_samples));
  std::vector<double> err, root, q0, eps, esr;
  for (long i = 0; i < n_samples; ++i) {
    SampleMatrix m = generate_returns(spec, static_cast<std::uint64_t>(i));
    if (options.shift != 0.0) m.returns.array() += options.shift;
    const LPSolution sol = solve_es_lp(m, alpha, options.simplex);
    SampleRecord rec;
    if (sol.status == LpStatus::Optimal) {
      rec = sample_metrics(sol, spec, alpha, options.histogram_bins);
      ++st.n_feasible;
      err.push_back(rec.est_error_hat);
      root.push_back(std::sqrt(rec.q0_hat));
      q0.push_back(rec.q0_hat);
      eps.push_back(rec.epsilon_scaled);
      esr.push_back(rec.es_in_ratio);
      if (options.keep_weights) {
        st.pooled_weights.insert(st.pooled_weights.end(), sol.weights.data(),
                                 sol.weights.data() + sol.weights.size());
      }
    }
    rec.index = i;
    rec.status = sol.status;
    st.samples.push_back(std::move(rec));
  }
  st.feasible_fraction = static_cast<double>(st.n_feasible) / static_cast<double>(n_samples);
  if (st.n_feasible == 0) {
    throw AllInfeasible(fmt::format(
        "run_ensemble: all {} samples unbounded at N={} T={} alpha={}", n_samples, spec.n_assets,
        spec.horizon, alpha));
  }
  st.est_error = summarize(err);
  st.sqrt_q0 = summarize(root);
  st.q0 = summarize(q0);
  st.epsilon_scaled = summarize(eps);
  st.es_in_ratio = summarize(esr);
  st.est_error_histogram = make_histogram(err, options.histogram_bins);
  return st;
}

double feasibility_probability(const SampleSpec& spec, double alpha, long n_samples) {
  validate(spec);
  require_alpha(alpha);
  if (n_samples < 1) throw DomainError("feasibility_probability: n_samples must be >= 1");
  long ok = 0;
  for (long i = 0; i < n_samples; ++i) {
    const SampleMatrix m = generate_returns(spec, static_cast<std::uint64_t>(i));
    if (solve_es_lp(m, alpha).status == LpStatus::Optimal) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(n_samples);
}

SusceptibilityEstimate susceptibility_fd(const SampleSpec& spec, double alpha, double xi,
                                         long n_samples) {
  if (!(xi > 0.0)) throw DomainError("susceptibility_fd: xi must be positive");
  EnsembleOptions plus;
  plus.shift = xi;
  EnsembleOptions minus;
  minus.shift = -xi;
  const EnsembleStats up = run_ensemble(spec, alpha, n_samples, plus);
  const EnsembleStats down = run_ensemble(spec, alpha, n_samples, minus);

  std::vector<double> diffs;
  for (std::size_t i = 0; i < up.samples.size(); ++i) {
    const SampleRecord& a = up.samples[i];
    const SampleRecord& b = down.samples[i];
    if (a.status != LpStatus::Optimal || b.status != LpStatus::Optimal) continue;
    diffs.push_back((std::sqrt(a.q0_hat) - std::sqrt(b.q0_hat)) / (2.0 * xi));
  }
  if (diffs.empty()) throw AllInfeasible("susceptibility_fd: no sample feasible at both shifts");
  const MetricSummary s = summarize(diffs);
  return {s.mean, s.stderr_};
}

SusceptibilityEstimate in_sample_susceptibility(const EnsembleStats& stats, const SampleSpec& spec,
                                                double alpha) {
  require_alpha(alpha);
  const double r = spec.aspect_ratio();
  const double scale = r / ((1.0 - alpha) * parametric::phi_factor(alpha));
  std::vector<double> chi;
  for (const SampleRecord& rec : stats.samples) {
    if (rec.status != LpStatus::Optimal) continue;
    chi.push_back(scale / (rec.es_in_ratio * std::sqrt(rec.q0_hat)));
  }
  if (chi.empty()) throw AllInfeasible("in_sample_susceptibility: no feasible sample");
  const MetricSummary s = summarize(chi);
  return {s.mean, s.stderr_};
}

}  // namespace esmap::sim
