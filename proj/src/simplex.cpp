#include "esmap/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "esmap/errors.hpp"

namespace esmap::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

class BoundedSimplex {
 public:
  BoundedSimplex(const BoundedLp& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.A.rows()), n_(lp.A.cols()) {
    const long total = n_ + m_;
    lower_.resize(total);
    upper_.resize(total);
    x_.setZero(total);
    state_.assign(static_cast<std::size_t>(total), VarState::AtLower);
    basis_.resize(static_cast<std::size_t>(m_));
    art_sign_.resize(m_);
    lower_.head(n_) = lp.lower;
    upper_.head(n_) = lp.upper;
    lower_.tail(m_).setZero();
    upper_.tail(m_).setConstant(kInf);
    max_iterations_ = opt.max_iterations > 0 ? opt.max_iterations : 50 * (m_ + n_);
  }

  SimplexResult run() {
    start_from_artificial_basis();
    SimplexResult res;

    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n_ + m_);
    phase1_cost.tail(m_).setOnes();
    iterate(phase1_cost, /*phase_one=*/true);
    refactor();

    const double infeasibility = x_.tail(m_).sum();
    const double scale = std::max(1.0, lp_.b.lpNorm<Eigen::Infinity>());
    if (infeasibility > opt_.feasibility_tol * scale) {
      res.status = SimplexStatus::Infeasible;
      res.y = duals(phase1_cost);
      fill_counters(res);
      return res;
    }

    // Pin the artificials at zero; basic ones leave on the first pivot that touches them.
    upper_.tail(m_).setZero();

    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n_ + m_);
    phase2_cost.head(n_) = lp_.c;
    const bool bounded = iterate(phase2_cost, /*phase_one=*/false);
    refactor();

    res.status = bounded ? SimplexStatus::Optimal : SimplexStatus::Unbounded;
    res.x = x_.head(n_);
    res.y = duals(phase2_cost);
    res.reduced_costs = lp_.c - lp_.A.transpose() * res.y;
    res.objective = lp_.c.dot(res.x);
    fill_counters(res);
    return res;
  }

 private:
  void start_from_artificial_basis() {
    for (long j = 0; j < n_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (std::isfinite(lower_(j))) {
        x_(j) = lower_(j);
        state_[js] = VarState::AtLower;
      } else if (std::isfinite(upper_(j))) {
        x_(j) = upper_(j);
        state_[js] = VarState::AtUpper;
      } else {
        x_(j) = 0.0;
        state_[js] = VarState::FreeZero;
      }
    }
    const Eigen::VectorXd residual = lp_.b - lp_.A * x_.head(n_);
    binv_.setZero(m_, m_);
    for (long i = 0; i < m_; ++i) {
      art_sign_(i) = residual(i) >= 0.0 ? 1.0 : -1.0;
      const long a = n_ + i;
      x_(a) = std::abs(residual(i));
      state_[static_cast<std::size_t>(a)] = VarState::Basic;
      basis_[static_cast<std::size_t>(i)] = a;
      binv_(i, i) = art_sign_(i);
    }
  }

  void column(long j, Eigen::VectorXd& out) const {
    if (j < n_) {
      out = lp_.A.col(j);
    } else {
      out.setZero(m_);
      out(j - n_) = art_sign_(j - n_);
    }
  }

  Eigen::VectorXd duals(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(m_);
    for (long i = 0; i < m_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
    return binv_.transpose() * cb;
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix(m_, m_);
    Eigen::VectorXd col;
    for (long i = 0; i < m_; ++i) {
      column(basis_[static_cast<std::size_t>(i)], col);
      basis_matrix.col(i) = col;
    }
    binv_ = basis_matrix.partialPivLu().inverse();
    Eigen::VectorXd rhs = lp_.b;
    for (long j = 0; j < n_; ++j) {
      if (state_[static_cast<std::size_t>(j)] != VarState::Basic && x_(j) != 0.0) {
        rhs.noalias() -= lp_.A.col(j) * x_(j);
      }
    }
    for (long i = 0; i < m_; ++i) {
      const long a = n_ + i;
      if (state_[static_cast<std::size_t>(a)] != VarState::Basic && x_(a) != 0.0) {
        rhs(i) -= art_sign_(i) * x_(a);
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (long i = 0; i < m_; ++i) x_(basis_[static_cast<std::size_t>(i)]) = xb(i);
    pivots_since_refactor_ = 0;
  }

  bool eligible(long j, double d) const {
    switch (state_[static_cast<std::size_t>(j)]) {
      case VarState::Basic:
        return false;
      case VarState::AtLower:
        return d < -opt_.optimality_tol && upper_(j) > lower_(j);
      case VarState::AtUpper:
        return d > opt_.optimality_tol && upper_(j) > lower_(j);
      case VarState::FreeZero:
        return std::abs(d) > opt_.optimality_tol;
    }
    return false;
  }

  // Returns false when the phase-2 objective is unbounded below.
  bool iterate(const Eigen::VectorXd& cost, bool phase_one) {
    Eigen::VectorXd d_struct(n_);
    Eigen::VectorXd col(m_);
    long degenerate_run = 0;
    bool bland = opt_.rule == PivotRule::Bland;

    for (;;) {
      if (++iterations_ > max_iterations_) {
        throw NumericalError(fmt::format("simplex: iteration budget {} exhausted ({} rows, {} columns)",
                                         max_iterations_, m_, n_));
      }
      const Eigen::VectorXd y = duals(cost);
      d_struct.noalias() = cost.head(n_) - lp_.A.transpose() * y;

      long entering = -1;
      double best = 0.0;
      double d_enter = 0.0;
      auto consider = [&](long j, double d) {
        if (!eligible(j, d)) return false;
        if (bland) {
          entering = j;
          d_enter = d;
          return true;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          d_enter = d;
        }
        return false;
      };
      bool done = false;
      for (long j = 0; j < n_ && !done; ++j) done = consider(j, d_struct(j));
      for (long i = 0; i < m_ && !done; ++i) done = consider(n_ + i, cost(n_ + i) - art_sign_(i) * y(i));
      if (entering < 0) return true;

      const double dir = d_enter < 0.0 ? 1.0 : -1.0;
      column(entering, col);
      col = (binv_ * col).eval();

      double theta = upper_(entering) - lower_(entering);  // bound flip distance
      long leave_row = -1;
      VarState leave_to = VarState::AtLower;
      double leave_pivot = 0.0;
      for (long i = 0; i < m_; ++i) {
        const double a = dir * col(i);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const long k = basis_[static_cast<std::size_t>(i)];
        double t;
        VarState to;
        if (a > 0.0) {
          if (!std::isfinite(lower_(k))) continue;
          t = (x_(k) - lower_(k)) / a;
          to = VarState::AtLower;
        } else {
          if (!std::isfinite(upper_(k))) continue;
          t = (upper_(k) - x_(k)) / (-a);
          to = VarState::AtUpper;
        }
        t = std::max(t, 0.0);
        // Ties with a bound flip keep the flip; ties between rows go to the
        // smallest index under Bland, else to the largest pivot.
        bool take = t < theta - 1e-12;
        if (!take && leave_row >= 0 && t <= theta + 1e-12) {
          take = bland ? k < basis_[static_cast<std::size_t>(leave_row)]
                       : std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          theta = t;
          leave_row = i;
          leave_to = to;
          leave_pivot = a;
        }
      }

      if (!std::isfinite(theta)) {
        if (phase_one) {
          throw NumericalError("simplex: unbounded ray in phase 1");
        }
        return false;
      }

      // Move along the edge.
      if (theta > 0.0) {
        for (long i = 0; i < m_; ++i) x_(basis_[static_cast<std::size_t>(i)]) -= theta * dir * col(i);
      }
      const auto es = static_cast<std::size_t>(entering);
      if (leave_row < 0) {
        x_(entering) = dir > 0.0 ? upper_(entering) : lower_(entering);
        state_[es] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
        ++bound_flips_;
      } else {
        x_(entering) += dir * theta;
        const long k = basis_[static_cast<std::size_t>(leave_row)];
        x_(k) = leave_to == VarState::AtLower ? lower_(k) : upper_(k);
        state_[static_cast<std::size_t>(k)] = leave_to;
        state_[es] = VarState::Basic;
        basis_[static_cast<std::size_t>(leave_row)] = entering;

        const double piv = col(leave_row);
        binv_.row(leave_row) /= piv;
        col(leave_row) = 0.0;
        binv_.noalias() -= col * binv_.row(leave_row);
        if (bland) ++bland_pivots_;
        if (++pivots_since_refactor_ >= opt_.refactor_interval) refactor();
      }

      if (theta <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_run_before_bland) bland = true;
      } else {
        degenerate_run = 0;
        bland = opt_.rule == PivotRule::Bland;
      }
    }
  }

  void fill_counters(SimplexResult& res) const {
    res.iterations = iterations_;
    res.bland_pivots = bland_pivots_;
    res.bound_flips = bound_flips_;
  }

  const BoundedLp& lp_;
  SimplexOptions opt_;
  long m_;
  long n_;
  Eigen::VectorXd lower_, upper_, x_;
  std::vector<VarState> state_;
  std::vector<long> basis_;
  Eigen::VectorXd art_sign_;
  Eigen::MatrixXd binv_;
  long max_iterations_ = 0;
  long iterations_ = 0;
  long bland_pivots_ = 0;
  long bound_flips_ = 0;
  int pivots_since_refactor_ = 0;
};

}  // namespace

SimplexResult solve_bounded(const BoundedLp& lp, const SimplexOptions& options) {
  const long m = lp.A.rows();
  const long n = lp.A.cols();
  if (lp.b.size() != m || lp.c.size() != n || lp.lower.size() != n || lp.upper.size() != n) {
    throw DomainError("solve_bounded: inconsistent problem dimensions");
  }
  BoundedSimplex engine(lp, options);
  return engine.run();
}

}  // namespace esmap::lp
