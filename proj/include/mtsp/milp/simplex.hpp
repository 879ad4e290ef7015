#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mtsp/milp/model.hpp"

namespace mtsp::milp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

// Dense bounded-variable simplex over the tableau B^-1 [A | I | D | b].
//
// Every row owns a slack (bounds encode the relation) and an artificial used
// only by the phase-one cold start. Bounds on structural columns may be
// changed between solves; the basis stays dual feasible under any bound
// change, so resolve() runs the dual simplex from the previous basis.
class DenseSimplex {
 public:
  explicit DenseSimplex(const Model& model)
      : m_(static_cast<int>(model.num_constraints())),
        n_(static_cast<int>(model.num_variables())),
        cols_(n_ + 2 * m_),
        width_(cols_ + 1),
        a_(static_cast<std::size_t>(m_) * width_, 0.0),
        t_(a_.size(), 0.0),
        cost_(cols_, 0.0),
        d_(cols_, 0.0),
        lo_(cols_, 0.0),
        up_(cols_, 0.0),
        x_(cols_, 0.0),
        status_(cols_, Status::AtLower),
        basis_(m_, -1),
        row_of_(cols_, -1) {
    for (int i = 0; i < m_; ++i) {
      const auto& c = model.constraints()[i];
      for (const auto& term : c.terms) at(a_, i, term.var) += term.coef;
      at(a_, i, n_ + i) = 1.0;
      at(a_, i, n_ + m_ + i) = 1.0;
      at(a_, i, cols_) = c.rhs;
      switch (c.relation) {
        case Relation::LessEqual: lo_[n_ + i] = 0.0; up_[n_ + i] = kInfinity; break;
        case Relation::GreaterEqual: lo_[n_ + i] = -kInfinity; up_[n_ + i] = 0.0; break;
        case Relation::Equal: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
      }
    }
    for (int j = 0; j < n_; ++j) cost_[j] = model.objective()[j];
  }

  LpStatus solve_cold(const std::vector<double>& lower, const std::vector<double>& upper) {
    warm_ = false;
    live_ = cols_;
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
    }
    for (int j = 0; j < cols_; ++j) {
      row_of_[j] = -1;
      if (j < n_ + m_) place_at_bound(j);
    }
    // Residuals decide whether the slack or the artificial starts basic.
    std::vector<double> resid(m_);
    for (int i = 0; i < m_; ++i) {
      double r = at(a_, i, cols_);
      for (int j = 0; j < n_ + m_; ++j) r -= at(a_, i, j) * x_[j];
      resid[i] = r;
    }
    for (int i = 0; i < m_; ++i) {
      const int slack = n_ + i;
      const int art = n_ + m_ + i;
      const double r = resid[i];
      if (r + x_[slack] >= lo_[slack] - kFeasTol && r + x_[slack] <= up_[slack] + kFeasTol) {
        basis_[i] = slack;
        at(a_, i, art) = 1.0;
        lo_[art] = up_[art] = 0.0;
        x_[art] = 0.0;
        status_[art] = Status::AtLower;
      } else {
        basis_[i] = art;
        at(a_, i, art) = r >= 0.0 ? 1.0 : -1.0;
        lo_[art] = 0.0;
        up_[art] = kInfinity;
      }
    }
    for (int i = 0; i < m_; ++i) {
      status_[basis_[i]] = Status::Basic;
      row_of_[basis_[i]] = i;
    }
    // B is diagonal here, so the tableau is A with rows scaled.
    for (int i = 0; i < m_; ++i) {
      const double s = 1.0 / at(a_, i, basis_[i]);
      for (int j = 0; j < width_; ++j) at(t_, i, j) = at(a_, i, j) * s;
    }
    pivots_since_refactor_ = 0;
    compute_basic_values();

    bool any_art = false;
    std::vector<double> phase1(cols_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_ + m_) {
        phase1[basis_[i]] = 1.0;
        any_art = true;
      }
    }
    if (any_art) {
      compute_reduced_costs(phase1);
      const LpStatus s = primal();
      if (s == LpStatus::IterationLimit) return s;
      double infeas = 0.0;
      for (int j = n_ + m_; j < cols_; ++j) infeas += std::abs(x_[j]);
      if (infeas > kPhase1Tol) return LpStatus::Infeasible;
    }
    for (int j = n_ + m_; j < cols_; ++j) {
      lo_[j] = up_[j] = 0.0;
      if (status_[j] != Status::Basic) {
        x_[j] = 0.0;
        status_[j] = Status::AtLower;
      }
    }
    live_ = n_ + m_;
    compute_basic_values();
    compute_reduced_costs(cost_);
    const LpStatus s = primal();
    warm_ = (s == LpStatus::Optimal);
    return s;
  }

  // Re-solves after a bound change. Falls back to a cold start when no
  // dual-feasible basis is available.
  LpStatus resolve(const std::vector<double>& lower, const std::vector<double>& upper) {
    if (!warm_) return solve_cold(lower, upper);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
    }
    for (int j = 0; j < cols_; ++j) {
      if (status_[j] == Status::Basic) continue;
      if (lo_[j] == up_[j]) {
        x_[j] = lo_[j];
        status_[j] = Status::AtLower;
        continue;
      }
      // Status follows the reduced-cost sign so the basis stays dual feasible.
      if (d_[j] > kOptTol) {
        if (!std::isfinite(lo_[j])) return solve_cold(lower, upper);
        status_[j] = Status::AtLower;
      } else if (d_[j] < -kOptTol) {
        if (!std::isfinite(up_[j])) return solve_cold(lower, upper);
        status_[j] = Status::AtUpper;
      }
      place_at_status(j);
    }
    if (pivots_since_refactor_ > kRefactorInterval && !refactor()) {
      return solve_cold(lower, upper);
    }
    compute_basic_values();
    const LpStatus s = dual();
    if (s == LpStatus::IterationLimit) return solve_cold(lower, upper);
    warm_ = true;
    return s;
  }

  double objective() const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) v += cost_[j] * x_[j];
    return v;
  }

  std::vector<double> primal_values() const {
    return std::vector<double>(x_.begin(), x_.begin() + n_);
  }

  long iterations() const { return iterations_; }

 private:
  enum class Status : unsigned char { Basic, AtLower, AtUpper, Free };

  static constexpr double kPivotTol = 1e-9;
  static constexpr double kOptTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kPrimalInfeasTol = 1e-7;
  static constexpr double kPhase1Tol = 1e-7;
  static constexpr int kDegenerateSwitch = 50;
  static constexpr int kRefactorInterval = 400;
  static constexpr long kMaxIterations = 50000;

  double& at(std::vector<double>& m, int i, int j) {
    return m[static_cast<std::size_t>(i) * width_ + j];
  }
  double at(const std::vector<double>& m, int i, int j) const {
    return m[static_cast<std::size_t>(i) * width_ + j];
  }

  void place_at_bound(int j) {
    if (std::isfinite(lo_[j])) {
      status_[j] = Status::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(up_[j])) {
      status_[j] = Status::AtUpper;
      x_[j] = up_[j];
    } else {
      status_[j] = Status::Free;
      x_[j] = 0.0;
    }
  }

  void place_at_status(int j) {
    if (status_[j] == Status::AtLower && std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
    } else if (status_[j] == Status::AtUpper && std::isfinite(up_[j])) {
      x_[j] = up_[j];
    } else {
      place_at_bound(j);
    }
  }

  void compute_basic_values() {
    nonzero_nonbasic_.clear();
    for (int j = 0; j < cols_; ++j)
      if (status_[j] != Status::Basic && x_[j] != 0.0) nonzero_nonbasic_.push_back(j);
    for (int i = 0; i < m_; ++i) {
      double v = at(t_, i, cols_);
      for (int j : nonzero_nonbasic_) v -= at(t_, i, j) * x_[j];
      x_[basis_[i]] = v;
    }
  }

  void compute_reduced_costs(const std::vector<double>& c) {
    for (int j = 0; j < cols_; ++j) d_[j] = c[j];
    for (int i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < cols_; ++j) d_[j] -= cb * at(t_, i, j);
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  // After phase one the artificial block is fixed at zero and never read
  // again, so updates only touch columns [0, live_) and the rhs.
  void pivot(int r, int q) {
    const double inv = 1.0 / at(t_, r, q);
    double* row = &t_[static_cast<std::size_t>(r) * width_];
    const int live = live_;
    for (int j = 0; j < live; ++j) row[j] *= inv;
    row[cols_] *= inv;
    row[q] = 1.0;
    int count = 0;
    for (int j = 0; j < live; ++j) count += row[j] != 0.0;
    const bool sparse = count * 3 < live;
    if (sparse) {
      nz_.clear();
      for (int j = 0; j < live; ++j)
        if (row[j] != 0.0) nz_.push_back(j);
    }
    const double rhs = row[cols_];
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* other = &t_[static_cast<std::size_t>(i) * width_];
      const double f = other[q];
      if (f == 0.0) continue;
      if (sparse) {
        for (int j : nz_) other[j] -= f * row[j];
      } else {
        for (int j = 0; j < live; ++j) other[j] -= f * row[j];
      }
      other[cols_] -= f * rhs;
      other[q] = 0.0;
    }
    const double dq = d_[q];
    if (dq != 0.0)
      for (int j = 0; j < live; ++j) d_[j] -= dq * row[j];
    d_[q] = 0.0;
    const int leaving = basis_[r];
    row_of_[leaving] = -1;
    basis_[r] = q;
    row_of_[q] = r;
    status_[q] = Status::Basic;
    ++pivots_since_refactor_;
  }

  // Rebuilds the tableau from the original rows for the current basis.
  bool refactor() {
    std::vector<int> cols(basis_);
    std::sort(cols.begin(), cols.end());
    t_ = a_;
    std::vector<char> used(m_, 0);
    for (int q : cols) {
      int best = -1;
      double best_abs = 1e-11;
      for (int i = 0; i < m_; ++i) {
        if (used[i]) continue;
        const double v = std::abs(at(t_, i, q));
        if (v > best_abs) {
          best_abs = v;
          best = i;
        }
      }
      if (best < 0) return false;
      used[best] = 1;
      const double inv = 1.0 / at(t_, best, q);
      double* row = &t_[static_cast<std::size_t>(best) * width_];
      for (int j = 0; j < width_; ++j) row[j] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == best) continue;
        double* other = &t_[static_cast<std::size_t>(i) * width_];
        const double f = other[q];
        if (f == 0.0) continue;
        for (int j = 0; j < width_; ++j) other[j] -= f * row[j];
      }
      basis_[best] = q;
      row_of_[q] = best;
    }
    pivots_since_refactor_ = 0;
    compute_reduced_costs(cost_);
    return true;
  }

  LpStatus primal() {
    int degenerate_run = 0;
    for (long it = 0;; ++it) {
      ++iterations_;
      if (it > kMaxIterations) return LpStatus::IterationLimit;
      const bool bland = degenerate_run > kDegenerateSwitch;
      int q = -1;
      double best = 0.0;
      int dir = 0;
      for (int j = 0; j < cols_; ++j) {
        const Status s = status_[j];
        if (s == Status::Basic || lo_[j] == up_[j]) continue;
        const double dj = d_[j];
        int dj_dir = 0;
        if (dj < -kOptTol && (s == Status::AtLower || s == Status::Free)) dj_dir = +1;
        else if (dj > kOptTol && (s == Status::AtUpper || s == Status::Free)) dj_dir = -1;
        if (dj_dir == 0) continue;
        if (bland) {
          q = j;
          dir = dj_dir;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
          dir = dj_dir;
        }
      }
      if (q < 0) return LpStatus::Optimal;

      // Ratio test.
      double step = up_[q] - lo_[q];  // bound flip distance (inf when unbounded)
      int leave_row = -1;
      double leave_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * at(t_, i, q);
        if (std::abs(alpha) <= kPivotTol) continue;
        const int b = basis_[i];
        double limit;
        if (alpha > 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limit = (x_[b] - lo_[b]) / alpha;
        } else {
          if (!std::isfinite(up_[b])) continue;
          limit = (up_[b] - x_[b]) / -alpha;
        }
        if (limit < 0.0) limit = 0.0;
        // On a tie with the flip distance the flip wins (no pivot needed).
        bool take = limit < step - kFeasTol;
        if (!take && leave_row >= 0 && limit <= step + kFeasTol) {
          take = bland ? b < basis_[leave_row] : std::abs(alpha) > leave_piv;
        }
        if (take) {
          step = std::min(step, limit);
          leave_row = i;
          leave_piv = std::abs(alpha);
        }
      }
      if (!std::isfinite(step)) return LpStatus::Unbounded;
      degenerate_run = step <= kFeasTol ? degenerate_run + 1 : 0;

      if (leave_row < 0) {
        // Bound flip of the entering variable.
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        status_[q] = dir > 0 ? Status::AtUpper : Status::AtLower;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * at(t_, i, q);
        continue;
      }
      const int leaving = basis_[leave_row];
      const double alpha = dir * at(t_, leave_row, q);
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * at(t_, i, q);
      const double entering_value = x_[q] + dir * step;
      pivot(leave_row, q);
      if (alpha > 0.0) {
        status_[leaving] = Status::AtLower;
        x_[leaving] = lo_[leaving];
      } else {
        status_[leaving] = Status::AtUpper;
        x_[leaving] = up_[leaving];
      }
      x_[q] = entering_value;
    }
  }

  LpStatus dual() {
    int degenerate_run = 0;
    for (long it = 0;; ++it) {
      ++iterations_;
      if (it > kMaxIterations) return LpStatus::IterationLimit;
      if (pivots_since_refactor_ > kRefactorInterval) {
        if (!refactor()) return LpStatus::IterationLimit;
        compute_basic_values();
      }
      // Leaving row: largest bound violation.
      int r = -1;
      double worst = kPrimalInfeasTol;
      bool below = false;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        const double v = x_[b];
        if (v < lo_[b] - worst) {
          worst = lo_[b] - v;
          r = i;
          below = true;
        } else if (v > up_[b] + worst) {
          worst = v - up_[b];
          r = i;
          below = false;
        }
      }
      if (r < 0) return LpStatus::Optimal;
      const bool bland = degenerate_run > kDegenerateSwitch;

      int q = -1;
      double best_ratio = kInfinity;
      double best_piv = 0.0;
      for (int j = 0; j < cols_; ++j) {
        const Status s = status_[j];
        if (s == Status::Basic || lo_[j] == up_[j]) continue;
        const double tr = at(t_, r, j);
        if (std::abs(tr) <= kPivotTol) continue;
        // Need x_B[r] to move toward its violated bound: dx_B = -tr * dx_j.
        bool ok = false;
        if (below) {
          ok = (tr < 0.0 && (s == Status::AtLower || s == Status::Free)) ||
               (tr > 0.0 && (s == Status::AtUpper || s == Status::Free));
        } else {
          ok = (tr > 0.0 && (s == Status::AtLower || s == Status::Free)) ||
               (tr < 0.0 && (s == Status::AtUpper || s == Status::Free));
        }
        if (!ok) continue;
        const double ratio = std::abs(d_[j]) / std::abs(tr);
        const bool better =
            ratio < best_ratio - kOptTol ||
            (ratio <= best_ratio + kOptTol && !bland && std::abs(tr) > best_piv);
        if (better) {
          best_ratio = ratio;
          best_piv = std::abs(tr);
          q = j;
        }
      }
      if (q < 0) return LpStatus::Infeasible;
      degenerate_run = best_ratio <= kOptTol ? degenerate_run + 1 : 0;

      const int leaving = basis_[r];
      const double target = below ? lo_[leaving] : up_[leaving];
      const double delta = (x_[leaving] - target) / at(t_, r, q);
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= delta * at(t_, i, q);
      const double entering_value = x_[q] + delta;
      pivot(r, q);
      status_[leaving] = below ? Status::AtLower : Status::AtUpper;
      x_[leaving] = target;
      x_[q] = entering_value;
    }
  }

  int m_;
  int n_;
  int cols_;
  int width_;
  std::vector<double> a_;
  std::vector<double> t_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> x_;
  std::vector<Status> status_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
  std::vector<int> nz_;
  std::vector<int> nonzero_nonbasic_;
  int live_ = 0;
  int pivots_since_refactor_ = 0;
  long iterations_ = 0;
  bool warm_ = false;
};

}  // namespace mtsp::milp
