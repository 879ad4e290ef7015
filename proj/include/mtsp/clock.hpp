#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "mtsp/milp/solver.hpp"

namespace mtsp {

using milp::ClockMode;

/// Actor id of the central agent; salesmen use their index.
inline constexpr int kCentralAgent = -1;

// Solver-time budget shared by the actors of one mechanism run.
//
// Time is organised in phases declared by the caller. Phases run one after
// another, so their durations add; actors inside a phase run side by side,
// so a phase lasts as long as its busiest actor. Only solver effort is
// charged.
class VirtualClock {
 public:
  struct Phase {
    std::map<int, double> charged;
    double span() const {
      double s = 0.0;
      for (const auto& [actor, t] : charged) s = std::max(s, t);
      return s;
    }
  };

  VirtualClock(ClockMode mode, double limit) : mode_(mode), limit_(limit) {
    if (!(limit >= 0.0)) throw std::invalid_argument("clock limit must be nonnegative");
    phases_.emplace_back();
  }
  static VirtualClock nodes(double limit) { return {ClockMode::Nodes, limit}; }
  static VirtualClock wall_ms(double limit) { return {ClockMode::Wall, limit}; }

  ClockMode mode() const { return mode_; }
  double limit() const { return limit_; }

  /// Closes the current phase; an empty current phase is reused.
  void begin_phase() {
    if (phases_.back().charged.empty()) return;
    closed_ += phases_.back().span();
    phases_.emplace_back();
  }

  void charge(int actor, double amount) {
    if (amount < 0.0) throw std::invalid_argument("negative charge");
    phases_.back().charged[actor] += amount;
    total_[actor] += amount;
  }

  /// Critical-path time so far.
  double elapsed() const { return closed_ + phases_.back().span(); }

  /// Time the actor may still spend in the current phase.
  double remaining(int actor) const {
    const auto& cur = phases_.back().charged;
    const auto it = cur.find(actor);
    const double mine = it == cur.end() ? 0.0 : it->second;
    return std::max(0.0, limit_ - closed_ - mine);
  }

  bool exhausted() const { return elapsed() >= limit_; }

  milp::SolveLimits limits_for(int actor) const { return {mode_, remaining(actor)}; }

  /// Total charge per actor over the whole run.
  const std::map<int, double>& ledger() const { return total_; }
  const std::vector<Phase>& phases() const { return phases_; }

 private:
  ClockMode mode_;
  double limit_;
  double closed_ = 0.0;
  std::vector<Phase> phases_;
  std::map<int, double> total_;
};

}  // namespace mtsp
