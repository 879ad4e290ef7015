#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtsp/core.hpp"
#include "mtsp/milp/solver.hpp"

namespace mtsp {

enum class ExchangeKind { P2P, CNP, Auction };

class ExchangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bundle = std::vector<CityId>;  // one or two cities

// One exchange: each participating agent proposes one of its cities. The
// first agent is the host in P2P and CNP. Bundles list the single-city
// bundles in proposal order, then the two-city bundles.
struct ExchangeRound {
  ExchangeKind kind = ExchangeKind::P2P;
  std::vector<SalesmanId> agents;
  std::vector<CityId> proposed;  // proposed[k] belongs to agents[k]
  std::vector<int> city_count;   // |C^a| including the depot and the proposed city
  std::vector<Bundle> bundles;

  int guests() const { return static_cast<int>(agents.size()) - 1; }
  std::size_t num_bundles() const { return bundles.size(); }
  std::size_t num_agents() const { return agents.size(); }
};

inline ExchangeRound build_bundles(ExchangeKind kind, std::vector<SalesmanId> agents,
                                   std::vector<CityId> proposed, std::vector<int> city_count) {
  const std::size_t k = proposed.size();
  if (k < 2) throw ExchangeError("an exchange needs at least two proposals");
  if (agents.size() != k || city_count.size() != k)
    throw ExchangeError("agents, proposals and city counts must align");
  if (std::set<CityId>(proposed.begin(), proposed.end()).size() != k)
    throw ExchangeError("duplicate proposed city");
  if (kind == ExchangeKind::P2P && k != 2) throw ExchangeError("P2P exchanges have two proposals");

  ExchangeRound r{kind, std::move(agents), std::move(proposed), std::move(city_count), {}};
  for (CityId c : r.proposed) r.bundles.push_back({c});
  switch (kind) {
    case ExchangeKind::P2P:
    case ExchangeKind::CNP:
      for (std::size_t g = 1; g < k; ++g) r.bundles.push_back({r.proposed[0], r.proposed[g]});
      break;
    case ExchangeKind::Auction:
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) r.bundles.push_back({r.proposed[i], r.proposed[j]});
      break;
  }
  return r;
}

/// Cost of bundle b for agent a, or nothing when it was not computed.
struct CostMatrix {
  std::vector<std::vector<std::optional<double>>> d;  // [bundle][agent]

  CostMatrix() = default;
  CostMatrix(std::size_t bundles, std::size_t agents)
      : d(bundles, std::vector<std::optional<double>>(agents)) {}
  static CostMatrix for_round(const ExchangeRound& r) { return {r.num_bundles(), r.num_agents()}; }

  std::size_t bundles() const { return d.size(); }
  std::size_t agents() const { return d.empty() ? 0 : d.front().size(); }
  bool complete() const {
    for (const auto& row : d)
      for (const auto& v : row)
        if (!v) return false;
    return true;
  }
  std::size_t missing() const {
    std::size_t k = 0;
    for (const auto& row : d)
      for (const auto& v : row) k += !v;
    return k;
  }
};

/// w[c][b] = 1 when bundle b contains proposed city c (indexed by proposal).
inline std::vector<std::vector<int>> membership(const ExchangeRound& r) {
  std::vector<std::vector<int>> w(r.proposed.size(), std::vector<int>(r.bundles.size(), 0));
  for (std::size_t c = 0; c < r.proposed.size(); ++c)
    for (std::size_t b = 0; b < r.bundles.size(); ++b)
      w[c][b] = std::count(r.bundles[b].begin(), r.bundles[b].end(), r.proposed[c]) > 0;
  return w;
}

inline std::vector<int> bundle_sizes(const ExchangeRound& r) {
  std::vector<int> v;
  for (const auto& b : r.bundles) v.push_back(static_cast<int>(b.size()));
  return v;
}

/// Replaces every missing entry by twice the largest present entry.
inline CostMatrix pad_missing_costs(CostMatrix m) {
  std::optional<double> top;
  for (const auto& row : m.d)
    for (const auto& v : row)
      if (v) top = top ? std::max(*top, *v) : *v;
  if (!top) throw ExchangeError("cannot pad a matrix with no present cost");
  for (auto& row : m.d)
    for (auto& v : row)
      if (!v) v = 2.0 * *top;
  return m;
}

struct ExchangeDecision {
  SolveStatus status = SolveStatus::NoIncumbent;
  std::vector<std::vector<int>> x;  // [agent][bundle]
  double objective = 0.0;
  double consumed = 0.0;

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }

  /// Cities agent k receives (sorted).
  std::vector<CityId> received(const ExchangeRound& r, std::size_t k) const {
    std::vector<CityId> out;
    for (std::size_t b = 0; b < r.bundles.size(); ++b)
      if (x[k][b]) out.insert(out.end(), r.bundles[b].begin(), r.bundles[b].end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct ExchangeOptions {
  bool one_bundle_per_agent = true;
  bool lexicographic_ties = true;
};

namespace detail {

struct ExchangeModel {
  milp::Model model;
  std::vector<std::vector<int>> var;  // [agent][bundle]
};

inline ExchangeModel build_exchange_model(const ExchangeRound& r, const CostMatrix& m,
                                          const ExchangeOptions& opt) {
  ExchangeModel em;
  const std::size_t na = r.num_agents();
  const std::size_t nb = r.num_bundles();
  const auto w = membership(r);
  const auto v = bundle_sizes(r);
  em.var.assign(na, std::vector<int>(nb, -1));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      em.var[a][b] = em.model.add_binary("x_" + std::to_string(a) + "_" + std::to_string(b));
      em.model.set_objective(em.var[a][b], *m.d[b][a]);
    }
  for (std::size_t c = 0; c < r.proposed.size(); ++c) {
    std::vector<milp::Term> t;
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        if (w[c][b]) t.push_back({em.var[a][b], 1.0});
    em.model.add_constraint(std::move(t), milp::Relation::Equal, 1.0, "cover_" + std::to_string(c));
  }
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<milp::Term> one, size;
    for (std::size_t b = 0; b < nb; ++b) {
      one.push_back({em.var[a][b], 1.0});
      size.push_back({em.var[a][b], static_cast<double>(v[b])});
    }
    if (opt.one_bundle_per_agent)
      em.model.add_constraint(std::move(one), milp::Relation::LessEqual, 1.0, "one_" + std::to_string(a));
    em.model.add_constraint(std::move(size), milp::Relation::GreaterEqual, 3.0 - r.city_count[a],
                            "keep_" + std::to_string(a));
  }
  return em;
}

inline std::vector<std::vector<int>> read_assignment(const ExchangeModel& em, const std::vector<double>& x) {
  std::vector<std::vector<int>> out(em.var.size());
  for (std::size_t a = 0; a < em.var.size(); ++a)
    for (int v : em.var[a]) out[a].push_back(x[v] > 0.5 ? 1 : 0);
  return out;
}

}  // namespace detail

// Winner determination: each proposed city goes to exactly one agent, each
// agent takes at most one bundle (optional), and nobody is left without a
// city. Among optimal assignments the lexicographically smallest x, read in
// (agent, bundle) order, is returned; the refinement solves count against
// the same budget.
inline ExchangeDecision solve_exchange(const ExchangeRound& r, const CostMatrix& m,
                                       milp::SolveLimits limits, ExchangeOptions opt = {}) {
  if (m.bundles() != r.num_bundles() || m.agents() != r.num_agents())
    throw ExchangeError("cost matrix does not match the round");
  if (!m.complete()) throw ExchangeError("cost matrix has missing entries; pad it first");
  for (int c : r.city_count)
    if (c < 2) throw ExchangeError("every agent holds the depot and a city");

  auto em = detail::build_exchange_model(r, m, opt);
  ExchangeDecision dec;
  milp::Solution sol = milp::solve(em.model, limits);
  dec.consumed = sol.consumed;
  dec.status = sol.status;
  if (sol.status == SolveStatus::Infeasible) throw ExchangeError("exchange model infeasible");
  if (!sol.has_incumbent()) return dec;
  dec.x = detail::read_assignment(em, sol.values);
  dec.objective = sol.objective;
  if (sol.status != SolveStatus::Optimal || !opt.lexicographic_ties) return dec;

  // Push ones toward later positions while the objective stays optimal.
  const double best = sol.objective;
  std::vector<milp::Term> obj;
  for (std::size_t a = 0; a < em.var.size(); ++a)
    for (std::size_t b = 0; b < em.var[a].size(); ++b)
      obj.push_back({em.var[a][b], *m.d[b][a]});
  em.model.add_constraint(obj, milp::Relation::LessEqual, best + kLengthTol, "optimal");
  std::vector<double> cur = sol.values;
  for (std::size_t a = 0; a < em.var.size(); ++a) {
    for (std::size_t b = 0; b < em.var[a].size(); ++b) {
      const int v = em.var[a][b];
      if (cur[v] < 0.5) {
        em.model.add_constraint({{v, 1.0}}, milp::Relation::Equal, 0.0);
        continue;
      }
      milp::Model trial = em.model;
      trial.add_constraint({{v, 1.0}}, milp::Relation::Equal, 0.0);
      milp::SolveLimits rest = limits;
      rest.budget = limits.budget - dec.consumed;
      const milp::Solution t = milp::solve(trial, rest);
      dec.consumed += t.consumed;
      if (t.status == SolveStatus::Optimal || t.status == SolveStatus::Infeasible) {
        if (t.status == SolveStatus::Optimal) {
          cur = t.values;
          em.model = std::move(trial);
        } else {
          em.model.add_constraint({{v, 1.0}}, milp::Relation::Equal, 1.0);
        }
        continue;
      }
      // Out of budget: keep what we have.
      dec.x = detail::read_assignment(em, cur);
      dec.objective = em.model.evaluate(cur);
      return dec;
    }
  }
  dec.x = detail::read_assignment(em, cur);
  dec.objective = em.model.evaluate(cur);
  return dec;
}

}  // namespace mtsp
