// Acceptance runner: one PASS/FAIL line per criterion.
//
//   esmap_acceptance [--cli PATH] [--only NAME] [--slow]
//
// The fat-tail criterion takes hours and only runs with --slow; otherwise it
// prints SKIP. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sys/wait.h>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "esmap/analytic_lines.hpp"
#include "esmap/cartographer.hpp"
#include "esmap/cli.hpp"
#include "esmap/lp_simulator.hpp"
#include "esmap/parametric.hpp"
#include "esmap/replica.hpp"
#include "esmap/specfun.hpp"

using namespace esmap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  bool slow = false;
};

std::string g_cli;

struct Captured {
  int code = 0;
  std::string out;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the esmap binary when one was given, the in-process dispatcher otherwise.
Captured esmap_run(const std::vector<std::string>& args) {
  Captured c;
  if (g_cli.empty()) {
    std::vector<std::string> full{"esmap"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    c.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    c.out = out.str();
    return c;
  }
  std::string cmd = shell_quote(g_cli);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {127, {}};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
  const int st = pclose(pipe);
  c.code = WIFEXITED(st) ? WEXITSTATUS(st) : 1;
  return c;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const long kTable1[6][12] = {
    {26, 27, 33, 35, 37, 39, 43, 47, 53, 64, 72, 83}, {14, 14, 17, 18, 19, 20, 21, 24, 27, 31, 35, 40},
    {10, 10, 12, 12, 13, 13, 14, 16, 18, 20, 22, 25}, {8, 8, 9, 9, 10, 10, 11, 12, 13, 15, 16, 17},
    {6, 6, 7, 8, 8, 8, 9, 9, 10, 11, 12, 12},         {4, 4, 4, 4, 4, 4, 5, 5, 5, 5, 5, 5}};

const long kTable2[6][12] = {
    {19, 16, 14, 14, 14, 14, 13, 13, 13, 13, 13, 13}, {10, 9, 8, 8, 7, 7, 7, 7, 7, 7, 7, 7},
    {7, 6, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5},             {6, 5, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4},
    {5, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3},             {3, 3, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2}};

Outcome table_check(const std::string& estimator, const long (&ref)[6][12], double budget) {
  const auto t0 = std::chrono::steady_clock::now();
  const Captured c = esmap_run({"table", "--estimator", estimator});
  const double secs = seconds_since(t0);
  if (c.code != 0) return {false, fmt::format("exit code {}", c.code)};
  const auto rows = csv_rows(c.out);
  if (rows.size() != 7 || rows[0].size() != 13) return {false, "unexpected table shape"};
  int within = 0, exact = 0, worst = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 12; ++j) {
      const long v = std::stol(rows[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(j) + 1]);
      const int d = static_cast<int>(std::abs(v - ref[i][j]));
      worst = std::max(worst, d);
      within += d <= 1;
      exact += d == 0;
    }
  }
  return {within == 72 && secs < budget,
          fmt::format("{}/72 within 1, {}/72 exact, max deviation {}, {:.2f} s (limit {} s)", within, exact,
                      worst, secs, budget)};
}

Outcome worked_example() {
  const Captured c = esmap_run({"parametric", "--alpha", "0.975", "--q0", "1.21"});
  if (c.code != 0) return {false, fmt::format("exit code {}", c.code)};
  double r = NAN;
  for (const auto& row : csv_rows(c.out)) {
    if (row.size() == 2 && row[0] == "r") r = std::stod(row[1]);
  }
  const double T = 100.0 / r;
  return {std::abs(T - 682.0) <= 1.0, fmt::format("T = {:.3f} for N = 100", T)};
}

Outcome phase_boundary_anchors() {
  const double at_one = replica::phase_boundary(1.0);
  const boost::math::normal nd;
  double worst_formula = 0.0;
  bool above = true;
  for (int i = 0; i <= 299; ++i) {
    const double a = 0.7 + 0.001 * i;
    const double phi = boost::math::pdf(nd, boost::math::quantile(nd, a)) / (1.0 - a);
    const double rp = parametric::r_crit_param(a);
    worst_formula = std::max(worst_formula, std::abs(rp - phi * phi / (1.0 + phi * phi)));
    above = above && rp > replica::phase_boundary(a);
  }
  const bool pass = std::abs(at_one - 0.5) <= 1e-6 && worst_formula <= 1e-10 && above;
  return {pass, fmt::format("r*(1) = {}, parametric formula deviation {:.2e}, parametric above historical: {}",
                            at_one, worst_formula, above ? "yes" : "no")};
}

Outcome oracle_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  int fails = 0;
  double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0;
  // (i) small-r expansion, relative error measured against 10 r. Below 1e-5 r*
  // the rounding error of the solved q0 - 1 exceeds the expansion error.
  for (double alpha : {0.55, 0.7, 0.9, 0.975}) {
    const double rs = replica::phase_boundary(alpha);
    for (double f : {1e-5, 1e-4, 1e-3}) {
      const double r = f * rs;
      const auto ex = analytic::small_r_expansion(alpha, r);
      const auto op = replica::solve_order_params({alpha, r});
      const double e = std::max(std::abs((ex.q0 - 1.0) / (op.q0 - 1.0) - 1.0), std::abs(ex.Delta / op.Delta - 1.0));
      w1 = std::max(w1, e / (10.0 * r));
      fails += e > 10.0 * r;
    }
  }
  // (ii) alpha = 1/2 closed form.
  for (double r : {0.01, 0.1, 0.2, 0.3}) {
    const auto a = analytic::half_alpha_line(r);
    const auto b = replica::solve_order_params({0.5, r});
    const double e = std::max({std::abs(a.q0 - b.q0), std::abs(a.Delta - b.Delta), std::abs(a.epsilon - b.epsilon)});
    w2 = std::max(w2, e);
    fails += e > 1e-8;
  }
  // (iii) crossing of the epsilon = 0 line.
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.4, 0.45}) {
    const double a = analytic::epsilon_zero_alpha(r);
    const double e = std::abs(replica::solve_order_params({a, r}).epsilon);
    w3 = std::max(w3, e);
    fails += e > 1e-6;
  }
  // (iv) minimax closed forms at alpha = 1 - 1e-6.
  const double alpha = 1.0 - 1e-6;
  for (double r : {0.1, 0.2, 0.3, 0.4}) {
    const auto op = replica::solve_order_params({alpha, r});
    const auto m = analytic::minimax_solution(r);
    const double e = std::max({std::abs(std::sqrt(op.q0) / m.sqrt_q0 - 1.0), std::abs(op.epsilon / m.epsilon - 1.0),
                               std::abs((1.0 - alpha) * op.Delta / m.scaled_Delta - 1.0)});
    w4 = std::max(w4, e);
    fails += e > 1e-3;
  }
  const double secs = seconds_since(t0);
  return {fails == 0 && secs < 30.0,
          fmt::format("small-r err/(10r) {:.2e}, half-alpha {:.1e}, eps-line {:.1e}, minimax rel {:.1e}, {:.2f} s",
                      w1, w2, w3, w4, secs)};
}

Outcome specfun_properties() {
  using namespace specfun;
  double sym = 0.0, chain = 0.0, trip = 0.0;
  for (int i = 0; i <= 1600; ++i) {
    const double x = -8.0 + 0.01 * i;
    sym = std::max({sym, std::abs(norm_cdf(x) - (1.0 - norm_cdf(-x))), std::abs(psi_fn(x) - (x + psi_fn(-x))),
                    std::abs(w_fn(x) - (0.5 * (x * x + 1.0) - w_fn(-x)))});
  }
  const double h = 1e-5;
  for (int i = 0; i <= 96; ++i) {
    const double x = -6.0 + 0.125 * i;
    const double dw = (w_fn(x + h) - w_fn(x - h)) / (2.0 * h);
    const double dp = (psi_fn(x + h) - psi_fn(x - h)) / (2.0 * h);
    chain = std::max({chain, std::abs(dw / psi_fn(x) - 1.0), std::abs(dp / norm_cdf(x) - 1.0)});
  }
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    trip = std::max(trip, std::abs(norm_cdf(norm_cdf_inv(p)) - p));
  }
  return {sym <= 1e-14 && chain <= 1e-6 && trip <= 1e-13,
          fmt::format("symmetry {:.1e}, derivative chain {:.1e}, round trip {:.1e}", sym, chain, trip)};
}

sim::SampleSpec gaussian_spec(int n, int t, std::uint64_t seed) {
  sim::SampleSpec s;
  s.n_assets = n;
  s.horizon = t;
  s.master_seed = seed;
  return s;
}

Outcome mc_vs_replica() {
  const auto t0 = std::chrono::steady_clock::now();
  const double alpha = 0.975;
  const auto st = sim::run_ensemble(gaussian_spec(50, 2000, 20240101), alpha, 500);
  const auto rep = replica::risk_report({alpha, 0.025});
  const auto op = replica::solve_order_params({alpha, 0.025});
  const double z1 = (st.est_error.mean - rep.est_error) / st.est_error.stderr_;
  const double z2 = (st.epsilon_scaled.mean - op.epsilon) / st.epsilon_scaled.stderr_;
  const double z3 = (st.es_in_ratio.mean - rep.es_in_ratio) / st.es_in_ratio.stderr_;
  const bool pass = std::abs(z1) <= 3.0 && std::abs(z2) <= 3.0 && std::abs(z3) <= 3.0;
  return {pass, fmt::format("est_error {:.5f} vs {:.5f} (z={:+.2f}); eps {:.4f} vs {:.4f} (z={:+.2f}); "
                            "es_in_ratio {:.4f} vs {:.4f} (z={:+.2f}); feasible {}; {:.1f} s",
                            st.est_error.mean, rep.est_error, z1, st.epsilon_scaled.mean, op.epsilon, z2,
                            st.es_in_ratio.mean, rep.es_in_ratio, z3, st.feasible_fraction, seconds_since(t0))};
}

Outcome sharpening() {
  const auto t0 = std::chrono::steady_clock::now();
  const int ns[] = {25, 50, 100};
  const long samples[] = {1000, 1000, 200};
  double sd[3];
  for (int i = 0; i < 3; ++i) {
    sd[i] = sim::run_ensemble(gaussian_spec(ns[i], 40 * ns[i], 777), 0.975, samples[i]).est_error.std;
  }
  return {sd[0] > sd[1] && sd[1] > sd[2],
          fmt::format("std of est_error: N=25 {:.5f}, N=50 {:.5f}, N=100 {:.5f}; {:.1f} s", sd[0], sd[1], sd[2],
                      seconds_since(t0))};
}

// Exact probability that the minimax problem is bounded for Gaussian returns:
// unbounded iff the T projected returns share a half-space in dimension N - 1.
double minimax_bounded_probability(int n, int t) {
  if (t < n) return 0.0;
  double c = 1.0, below = 0.0;
  for (int k = 0; k <= n - 2; ++k) {
    below += c;
    c = c * (t - 1 - k) / (k + 1);
  }
  return 1.0 - std::ldexp(below, -(t - 1));
}

Outcome feasibility_transition() {
  const double alpha = 1.0 - 1e-9;
  const int n = 20;
  const double rs[] = {0.25, 0.5, 0.75, 1.0, 1.25};
  // Every r draws from the same seeded sample streams. A tie with the previous
  // estimate, or an estimate of zero, is resolved by extending the stream
  // tenfold, up to 4e6 samples.
  std::vector<double> p;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  for (double r : rs) {
    const int t = static_cast<int>(std::lround(n / r));
    long samples = 400;
    double v = sim::feasibility_probability(gaussian_spec(n, t, 4242), alpha, samples);
    while ((v == 0.0 || (!p.empty() && v >= p.back())) && samples < 4000000) {
      samples *= 10;
      v = sim::feasibility_probability(gaussian_spec(n, t, 4242), alpha, samples);
    }
    p.push_back(v);
    detail += fmt::format("{}r={:.3f}: {:.3g} (exact {:.3g}, {} samples)", detail.empty() ? "" : ", ",
                          static_cast<double>(n) / t, v, minimax_bounded_probability(n, t), samples);
  }
  detail += fmt::format("; {:.0f} s", seconds_since(t0));
  bool decreasing = true;
  for (std::size_t i = 1; i < p.size(); ++i) decreasing = decreasing && p[i] < p[i - 1];
  return {p.front() >= 0.95 && p.back() <= 0.05 && decreasing, detail};
}

Outcome determinism() {
  const std::vector<std::string> args{"simulate", "--dist", "student:3", "--N", "10", "--T", "200",
                                      "--alpha", "0.95", "--samples", "50", "--seed", "99"};
  const Captured a = esmap_run(args);
  const Captured b = esmap_run(args);
  return {a.code == 0 && b.code == 0 && a.out == b.out && !a.out.empty(),
          fmt::format("{} bytes, identical: {}", a.out.size(), a.out == b.out ? "yes" : "no")};
}

// r at which the ensemble mean est_error reaches `target`: secant steps on
// log(error) against log(r), switching to regula falsi once bracketed.
struct ContourSearch {
  double r = NAN;
  int evaluations = 0;
};

ContourSearch error_contour_r(sim::SampleSpec spec, double alpha, double target, double r0, long samples,
                              std::string& log) {
  auto eval = [&](double lr) {
    spec.horizon = static_cast<int>(std::lround(spec.n_assets / std::exp(lr)));
    const auto st = sim::run_ensemble(spec, alpha, samples);
    log += fmt::format(" T={}:{:.4f}", spec.horizon, st.est_error.mean);
    return std::pair{std::log(static_cast<double>(spec.n_assets) / spec.horizon),
                     std::log(st.est_error.mean / target)};
  };
  ContourSearch out;
  auto [la, fa] = eval(std::log(r0));
  auto [lb, fb] = eval(std::log(r0) + (fa > 0.0 ? -0.4 : 0.4));
  out.evaluations = 2;
  for (int it = 0; it < 8 && fa != fb; ++it) {
    double lc = lb - fb * (lb - la) / (fb - fa);
    lc = std::clamp(lc, std::min(la, lb) - 0.7, std::max(la, lb) + 0.7);
    const auto [lr, fc] = eval(lc);
    ++out.evaluations;
    const bool bracketed = (fa < 0.0) != (fb < 0.0);
    const double step = std::min(std::abs(lr - la), std::abs(lr - lb));
    if (bracketed && (fc < 0.0) == (fa < 0.0)) {
      la = lr, fa = fc;
    } else if (bracketed) {
      lb = lr, fb = fc;
    } else {
      la = lb, fa = fb;
      lb = lr, fb = fc;
    }
    if (std::abs(fc) < 0.005 || step < 0.005) break;
  }
  if ((fa < 0.0) != (fb < 0.0)) {
    out.r = std::exp(la - fa * (lb - la) / (fb - fa));
  } else {
    out.r = std::exp(std::abs(fa) < std::abs(fb) ? la : lb);
  }
  return out;
}

Outcome fat_tail() {
  const auto t0 = std::chrono::steady_clock::now();
  const double alpha = 0.975;
  const double target = 0.05;
  const long samples = 500;
  const double r_replica = carto::historical_r_for_error(alpha, target);
  sim::SampleSpec spec = gaussian_spec(50, 1, 31337);
  std::string log;
  log += " gauss:";
  const auto g = error_contour_r(spec, alpha, target, r_replica, samples, log);
  spec.distribution = sim::Distribution::Student;
  spec.nu = 10.0;
  log += " t10:";
  const auto t10 = error_contour_r(spec, alpha, target, g.r / 1.5, samples, log);
  spec.nu = 3.0;
  log += " t3:";
  const auto t3 = error_contour_r(spec, alpha, target, g.r / 3.7, samples, log);
  const double ratio = g.r / t3.r;
  const bool pass = ratio >= 2.5 && ratio <= 5.0 && t10.r < g.r && t10.r > t3.r;
  return {pass, fmt::format("1/r: gaussian {:.1f}, nu=10 {:.1f}, nu=3 {:.1f}; ratio {:.2f}; {:.0f} s;{}", 1.0 / g.r,
                            1.0 / t10.r, 1.0 / t3.r, ratio, seconds_since(t0), log)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"esmap acceptance criteria"};
  std::string only;
  bool slow = false;
  app.add_option("--cli", g_cli, "esmap binary to drive; in-process dispatcher when omitted");
  app.add_option("--only", only, "run a single criterion by name");
  app.add_flag("--slow", slow, "include the hours-scale fat-tail criterion");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"table1_historical", [] { return table_check("historical", kTable1, 60.0); }},
      {"table2_parametric", [] { return table_check("parametric", kTable2, 1.0); }},
      {"worked_example_682", worked_example},
      {"phase_boundary_anchors", phase_boundary_anchors},
      {"analytic_oracle_suite", oracle_suite},
      {"special_function_properties", specfun_properties},
      {"monte_carlo_vs_replica", mc_vs_replica},
      {"distribution_sharpening", sharpening},
      {"fat_tail", fat_tail, true},
      {"feasibility_transition", feasibility_transition},
      {"determinism", determinism},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.name != only) continue;
    if (c.slow && !slow) {
      std::cout << "SKIP " << c.name << " (needs --slow)\n";
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no criterion matched '" << only << "'\n";
    return 2;
  }
  std::cout << fmt::format("{}/{} criteria passed", ran - failed, ran) << std::endl;
  return failed == 0 ? 0 : 1;
}
