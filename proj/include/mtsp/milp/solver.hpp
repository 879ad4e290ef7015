#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "mtsp/milp/model.hpp"
#include "mtsp/milp/simplex.hpp"

namespace mtsp::milp {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, NoIncumbent };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NoIncumbent: return "no-incumbent";
  }
  return "?";
}

// How solver effort is measured. Nodes: one branch-and-bound node (one LP
// relaxation) is one unit. Wall: milliseconds of real solver time.
enum class ClockMode { Nodes, Wall };

struct SolveLimits {
  ClockMode mode = ClockMode::Nodes;
  double budget = kInfinity;

  static SolveLimits nodes(double n) { return {ClockMode::Nodes, n}; }
  static SolveLimits wall_ms(double ms) { return {ClockMode::Wall, ms}; }
  static SolveLimits unlimited() { return {ClockMode::Nodes, kInfinity}; }
};

struct Solution {
  SolveStatus status = SolveStatus::NoIncumbent;
  std::vector<double> values;
  double objective = kInfinity;
  double bound = -kInfinity;
  double consumed = 0.0;  // in units of the limits' mode
  long nodes = 0;

  bool has_incumbent() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Feasible;
  }
};

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kRelativeGap = 1e-6;

namespace detail {

class Meter {
 public:
  explicit Meter(SolveLimits limits)
      : limits_(limits), start_(std::chrono::steady_clock::now()) {}

  double consumed(long nodes) const {
    if (limits_.mode == ClockMode::Nodes) return static_cast<double>(nodes);
    const auto dt = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(dt).count();
  }
  bool exhausted(long nodes) const { return consumed(nodes) >= limits_.budget; }

 private:
  SolveLimits limits_;
  std::chrono::steady_clock::time_point start_;
};

inline double gap_tolerance(double incumbent) {
  return kRelativeGap * std::max(1.0, std::abs(incumbent));
}

}  // namespace detail

// Continuous relaxation: integrality marks are ignored.
inline Solution lp_relax_solve(const Model& model) {
  model.validate();
  Solution sol;
  DenseSimplex lp(model);
  std::vector<double> lo, up;
  for (const auto& v : model.variables()) {
    lo.push_back(v.lower);
    up.push_back(v.upper);
  }
  const LpStatus s = lp.solve_cold(lo, up);
  sol.nodes = 1;
  sol.consumed = 1;
  if (s == LpStatus::Infeasible) {
    sol.status = SolveStatus::Infeasible;
  } else if (s == LpStatus::Unbounded) {
    sol.status = SolveStatus::Unbounded;
    sol.objective = sol.bound = -kInfinity;
  } else if (s == LpStatus::Optimal) {
    sol.status = SolveStatus::Optimal;
    sol.values = lp.primal_values();
    sol.objective = sol.bound = lp.objective() + model.objective_offset();
  }
  return sol;
}

// Branch and bound on LP relaxations.
//
// Nodes are explored depth first until the first incumbent exists, then best
// bound first (ties by creation order). Branching picks the most fractional
// binary, ties to the lowest index. The result is a deterministic function of
// the model and, in Nodes mode, of the node budget.
inline Solution solve(const Model& model, SolveLimits limits = SolveLimits::unlimited()) {
  model.validate();
  Solution sol;
  detail::Meter meter(limits);
  if (!(limits.budget > 0.0)) {
    sol.status = SolveStatus::NoIncumbent;
    return sol;
  }

  const auto& vars = model.variables();
  const int n = static_cast<int>(vars.size());
  std::vector<double> base_lo(n), base_up(n);
  std::vector<int> binaries;
  for (int j = 0; j < n; ++j) {
    base_lo[j] = vars[j].lower;
    base_up[j] = vars[j].upper;
    if (vars[j].type == VarType::Binary) binaries.push_back(j);
  }

  struct Node {
    double bound;
    std::int64_t id;
    int depth;
    std::vector<std::pair<int, char>> fixings;  // (var, value)
  };
  struct BestFirst {
    bool operator()(const Node* a, const Node* b) const {
      if (a->bound != b->bound) return a->bound > b->bound;
      return a->id > b->id;
    }
  };

  DenseSimplex lp(model);
  std::vector<std::unique_ptr<Node>> storage;
  std::vector<Node*> dive;  // LIFO until the first incumbent
  std::priority_queue<Node*, std::vector<Node*>, BestFirst> heap;
  std::int64_t next_id = 0;

  auto make = [&](double bound, int depth, std::vector<std::pair<int, char>> f) {
    storage.push_back(std::make_unique<Node>(Node{bound, next_id++, depth, std::move(f)}));
    return storage.back().get();
  };

  double incumbent = kInfinity;
  std::vector<double> best_values;
  bool root_unbounded = false;
  bool hit_limit = false;
  long nodes = 0;
  std::vector<double> lo(n), up(n);

  Node* root = make(-kInfinity, 0, {});
  dive.push_back(root);

  auto pop = [&]() -> Node* {
    if (!dive.empty()) {
      Node* nd = dive.back();
      dive.pop_back();
      return nd;
    }
    if (heap.empty()) return nullptr;
    Node* nd = heap.top();
    heap.pop();
    return nd;
  };

  for (;;) {
    Node* node = pop();
    if (node == nullptr) break;
    if (node->bound >= incumbent - detail::gap_tolerance(incumbent)) continue;
    if (meter.exhausted(nodes)) {
      hit_limit = true;
      // Put it back so the final bound accounts for it.
      heap.push(node);
      break;
    }
    ++nodes;
    lo = base_lo;
    up = base_up;
    for (auto [v, val] : node->fixings) lo[v] = up[v] = val;
    const LpStatus s = nodes == 1 ? lp.solve_cold(lo, up) : lp.resolve(lo, up);
    if (s == LpStatus::Infeasible) continue;
    if (s == LpStatus::Unbounded) {
      if (nodes == 1) {
        root_unbounded = true;
        break;
      }
      continue;
    }
    if (s != LpStatus::Optimal) continue;  // numerical trouble: drop the node
    const double obj = lp.objective() + model.objective_offset();
    if (obj >= incumbent - detail::gap_tolerance(incumbent)) continue;
    std::vector<double> x = lp.primal_values();

    int branch_var = -1;
    double best_frac = kIntegralityTol;
    for (int j : binaries) {
      const double f = std::abs(x[j] - std::round(x[j]));
      if (f > best_frac + 1e-12) {
        best_frac = f;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      for (int j : binaries) x[j] = std::round(x[j]);
      incumbent = model.evaluate(x);
      best_values = std::move(x);
      // Leaving dive mode: remaining dive nodes join the best-first queue.
      for (Node* d : dive) heap.push(d);
      dive.clear();
      continue;
    }
    auto down = node->fixings;
    down.emplace_back(branch_var, 0);
    auto upf = std::move(node->fixings);
    upf.emplace_back(branch_var, 1);
    Node* child_down = make(obj, node->depth + 1, std::move(down));
    Node* child_up = make(obj, node->depth + 1, std::move(upf));
    if (std::isfinite(incumbent)) {
      heap.push(child_down);
      heap.push(child_up);
    } else if (x[branch_var] >= 0.5) {
      dive.push_back(child_down);
      dive.push_back(child_up);
    } else {
      dive.push_back(child_up);
      dive.push_back(child_down);
    }
  }

  sol.nodes = nodes;
  sol.consumed = std::min(meter.consumed(nodes), limits.budget);
  if (root_unbounded) {
    sol.status = SolveStatus::Unbounded;
    sol.objective = sol.bound = -kInfinity;
    return sol;
  }
  double open_bound = kInfinity;
  for (Node* d : dive) open_bound = std::min(open_bound, d->bound);
  if (!heap.empty()) open_bound = std::min(open_bound, heap.top()->bound);

  if (std::isfinite(incumbent)) {
    sol.values = std::move(best_values);
    sol.objective = incumbent;
    sol.bound = hit_limit ? std::min(incumbent, open_bound) : incumbent;
    const bool closed = incumbent - sol.bound <= detail::gap_tolerance(incumbent);
    sol.status = closed ? SolveStatus::Optimal : SolveStatus::Feasible;
  } else if (hit_limit) {
    sol.status = SolveStatus::NoIncumbent;
    sol.bound = open_bound;
  } else {
    sol.status = SolveStatus::Infeasible;
  }
  return sol;
}

// Writes the model in CPLEX LP format. Debug aid for cross-checking.
inline std::string to_lp_format(const Model& model) {
  const auto& vars = model.variables();
  auto name = [&](int j) {
    return vars[j].name.empty() ? "v" + std::to_string(j) : vars[j].name;
  };
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  std::string out = "Minimize\n obj:";
  bool any = false;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double c = model.objective()[j];
    if (c == 0.0) continue;
    out += (c < 0 ? " - " : " + ") + num(std::abs(c)) + " " + name(static_cast<int>(j));
    any = true;
  }
  if (!any) out += " 0";
  out += "\nSubject To\n";
  int k = 0;
  for (const auto& c : model.constraints()) {
    out += " " + (c.name.empty() ? "c" + std::to_string(k) : c.name) + ":";
    for (const auto& t : c.terms)
      out += (t.coef < 0 ? " - " : " + ") + num(std::abs(t.coef)) + " " + name(t.var);
    if (c.terms.empty()) out += " 0 " + name(0);
    switch (c.relation) {
      case Relation::LessEqual: out += " <= "; break;
      case Relation::GreaterEqual: out += " >= "; break;
      case Relation::Equal: out += " = "; break;
    }
    out += num(c.rhs) + "\n";
    ++k;
  }
  out += "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    if (v.type == VarType::Binary) continue;
    const std::string lo = std::isfinite(v.lower) ? num(v.lower) : "-inf";
    const std::string up = std::isfinite(v.upper) ? num(v.upper) : "+inf";
    out += " " + lo + " <= " + name(static_cast<int>(j)) + " <= " + up + "\n";
  }
  out += "Binaries\n";
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (vars[j].type == VarType::Binary) out += " " + name(static_cast<int>(j)) + "\n";
  out += "End\n";
  return out;
}

}  // namespace mtsp::milp

namespace mtsp {
using milp::SolveLimits;
using milp::SolveStatus;
}  // namespace mtsp
