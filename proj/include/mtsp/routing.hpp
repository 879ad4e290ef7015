#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtsp/core.hpp"
#include "mtsp/milp/solver.hpp"

namespace mtsp {

struct TourResult {
  Route route;
  SolveStatus status = SolveStatus::NoIncumbent;
  double consumed = 0.0;

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
  bool optimal() const { return status == SolveStatus::Optimal; }
};

namespace detail {

// Arc variables x_ij (i != j) over a local numbering where index 0 is the depot.
class ArcVars {
 public:
  ArcVars(milp::Model& model, const std::vector<CityId>& cities, const DistanceMatrix& d)
      : n_(static_cast<int>(cities.size())), idx_(static_cast<std::size_t>(n_ * n_), -1) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        const int v = model.add_binary("x_" + std::to_string(cities[i]) + "_" + std::to_string(cities[j]));
        model.set_objective(v, d(cities[i], cities[j]));
        idx_[static_cast<std::size_t>(i * n_ + j)] = v;
      }
    }
  }
  int operator()(int i, int j) const { return idx_[static_cast<std::size_t>(i * n_ + j)]; }
  int size() const { return n_; }

 private:
  int n_;
  std::vector<int> idx_;
};

// Node potentials p_i >= 0 for local i >= 1 (index 0 unused).
inline std::vector<int> add_potentials(milp::Model& model, const std::vector<CityId>& cities) {
  std::vector<int> p(cities.size(), -1);
  for (std::size_t i = 1; i < cities.size(); ++i)
    p[i] = model.add_continuous("p_" + std::to_string(cities[i]));
  return p;
}

// p_i - p_j + big * x_ij <= big - 1 for 1 <= i != j.
inline void add_mtz(milp::Model& model, const ArcVars& x, const std::vector<int>& p, double big,
                    double rhs) {
  const int n = x.size();
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j)
      if (i != j)
        model.add_constraint({{p[i], 1.0}, {p[j], -1.0}, {x(i, j), big}},
                             milp::Relation::LessEqual, rhs);
}

inline std::vector<int> successors(const ArcVars& x, const std::vector<double>& v) {
  const int n = x.size();
  std::vector<int> next(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && v[x(i, j)] > 0.5) next[i] = j;
  return next;
}

}  // namespace detail

/// Optimal tour over `cities` (depot included) via the MTZ formulation.
/// A depot-only set yields the empty tour without a solver call.
inline TourResult solve_tsp(const Instance& inst, const CitySet& cities, SolveLimits limits) {
  if (cities.empty() || cities.front() != kDepot)
    throw InstanceError("solve_tsp needs the depot");
  if (cities.size() == 1) {
    TourResult trivial;
    trivial.status = SolveStatus::Optimal;
    return trivial;
  }
  const auto& d = inst.distances();
  milp::Model model;
  detail::ArcVars x(model, cities, d);
  const auto p = detail::add_potentials(model, cities);
  const int n = static_cast<int>(cities.size());
  for (int i = 0; i < n; ++i) {
    std::vector<milp::Term> out, in;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      out.push_back({x(i, j), 1.0});
      in.push_back({x(j, i), 1.0});
    }
    model.add_constraint(std::move(out), milp::Relation::Equal, 1.0, "out_" + std::to_string(cities[i]));
    model.add_constraint(std::move(in), milp::Relation::Equal, 1.0, "in_" + std::to_string(cities[i]));
  }
  detail::add_mtz(model, x, p, n, n - 1);

  const milp::Solution sol = milp::solve(model, limits);
  TourResult res;
  res.status = sol.status;
  res.consumed = sol.consumed;
  if (!sol.has_incumbent()) return res;
  const auto next = detail::successors(x, sol.values);
  res.route.stops = {kDepot};
  for (int k = next[0]; k > 0; k = next[k]) res.route.stops.push_back(cities[k]);
  res.route.stops.push_back(kDepot);
  res.route.length = route_length(res.route.stops, d);
  return res;
}

struct MtspResult {
  Allocation allocation;
  std::vector<Route> routes;
  SolveStatus status = SolveStatus::NoIncumbent;
  double consumed = 0.0;

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
  double total() const {
    double t = 0.0;
    for (const auto& r : routes) t += r.length;
    return t;
  }
};

/// Joint allocation and routing of all cities over m depot-anchored tours.
/// Routes are handed to salesmen ordered by their smallest city index.
inline MtspResult solve_mtsp(const Instance& inst, int m, SolveLimits limits) {
  MtspResult res;
  const int n = inst.n();
  if (m < 1 || n < m + 1) {
    res.status = SolveStatus::Infeasible;
    return res;
  }
  std::vector<CityId> cities(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) cities[static_cast<std::size_t>(c)] = c;
  milp::Model model;
  detail::ArcVars x(model, cities, inst.distances());
  const auto p = detail::add_potentials(model, cities);
  {
    std::vector<milp::Term> out, in;
    for (int j = 1; j < n; ++j) {
      out.push_back({x(0, j), 1.0});
      in.push_back({x(j, 0), 1.0});
    }
    model.add_constraint(std::move(out), milp::Relation::Equal, m, "depot_out");
    model.add_constraint(std::move(in), milp::Relation::Equal, m, "depot_in");
  }
  for (int i = 1; i < n; ++i) {
    std::vector<milp::Term> out, in;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      out.push_back({x(i, j), 1.0});
      in.push_back({x(j, i), 1.0});
    }
    model.add_constraint(std::move(out), milp::Relation::Equal, 1.0, "out_" + std::to_string(i));
    model.add_constraint(std::move(in), milp::Relation::Equal, 1.0, "in_" + std::to_string(i));
  }
  detail::add_mtz(model, x, p, n - 1, n - 2);

  const milp::Solution sol = milp::solve(model, limits);
  res.status = sol.status;
  res.consumed = sol.consumed;
  if (!sol.has_incumbent()) return res;
  const auto next = detail::successors(x, sol.values);
  std::vector<std::vector<CityId>> tours;
  for (int j = 1; j < n; ++j) {
    if (sol.values[x(0, j)] < 0.5) continue;
    std::vector<CityId> stops{kDepot};
    for (int k = j; k > 0; k = next[k]) stops.push_back(k);
    stops.push_back(kDepot);
    tours.push_back(std::move(stops));
  }
  std::sort(tours.begin(), tours.end(), [](const auto& a, const auto& b) {
    return *std::min_element(a.begin() + 1, a.end() - 1) < *std::min_element(b.begin() + 1, b.end() - 1);
  });
  for (auto& t : tours) {
    Route r;
    r.stops = t;
    r.length = route_length(r.stops, inst.distances());
    res.routes.push_back(r);
    res.allocation.sets.push_back(make_city_set(std::vector<CityId>(t.begin(), t.end())));
  }
  return res;
}

/// Cities of one agent and the cities already proposed to the counterpart.
struct DropQuery {
  CitySet cities;
  std::set<CityId> proposed;
  double current_length = 0.0;
};

struct DropResult {
  std::optional<CityId> city;  // empty: refusal
  double saving = 0.0;         // current length minus the remaining tour length
  Route remaining;             // optimal tour without the dropped city
  SolveStatus status = SolveStatus::NoIncumbent;
  double consumed = 0.0;
};

/// Picks the city whose removal shortens the tour most, skipping cities
/// already proposed to this counterpart. Refuses when nothing is proposable
/// or the budget runs out before optimality is proven.
inline DropResult select_city_to_drop(const Instance& inst, const DropQuery& q, SolveLimits limits) {
  DropResult res;
  const auto& cities = q.cities;
  if (cities.size() < 2 || cities.front() != kDepot)
    throw InstanceError("select_city_to_drop needs the depot and at least one city");
  const int n = static_cast<int>(cities.size());
  bool any_free = false;
  for (int i = 1; i < n; ++i)
    if (!q.proposed.count(cities[i])) any_free = true;
  if (!any_free) return res;

  const auto& d = inst.distances();
  milp::Model model;
  detail::ArcVars x(model, cities, d);
  std::vector<int> kept(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) {
    kept[i] = model.add_binary("kept_" + std::to_string(cities[i]));
    if (q.proposed.count(cities[i])) model.add_constraint({{kept[i], 1.0}}, milp::Relation::Equal, 1.0);
  }
  const auto p = detail::add_potentials(model, cities);
  // The depot is kept while any other city is; with one city nothing remains.
  const double depot_flow = n > 2 ? 1.0 : 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<milp::Term> out, in;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      out.push_back({x(i, j), 1.0});
      in.push_back({x(j, i), 1.0});
    }
    if (i == 0) {
      model.add_constraint(std::move(out), milp::Relation::Equal, depot_flow);
      model.add_constraint(std::move(in), milp::Relation::Equal, depot_flow);
    } else {
      out.push_back({kept[i], -1.0});
      in.push_back({kept[i], -1.0});
      model.add_constraint(std::move(out), milp::Relation::Equal, 0.0);
      model.add_constraint(std::move(in), milp::Relation::Equal, 0.0);
    }
  }
  {
    std::vector<milp::Term> count;
    for (int i = 1; i < n; ++i) count.push_back({kept[i], 1.0});
    model.add_constraint(std::move(count), milp::Relation::Equal, n - 2, "kept_count");
  }
  detail::add_mtz(model, x, p, n, n - 1);

  const milp::Solution sol = milp::solve(model, limits);
  res.status = sol.status;
  res.consumed = sol.consumed;
  if (sol.status != SolveStatus::Optimal) return res;
  for (int i = 1; i < n; ++i) {
    if (sol.values[kept[i]] < 0.5) {
      res.city = cities[i];
      break;
    }
  }
  const auto next = detail::successors(x, sol.values);
  res.remaining.stops = {kDepot};
  if (n > 2)
    for (int k = next[0]; k > 0; k = next[k]) res.remaining.stops.push_back(cities[k]);
  res.remaining.stops.push_back(kDepot);
  res.remaining.length = route_length(res.remaining.stops, d);
  res.saving = q.current_length - res.remaining.length;
  return res;
}

struct CostResult {
  std::optional<double> cost;  // empty when a sub-solve found no incumbent
  Route base_route;
  Route extended_route;
  bool optimal = false;
  double consumed = 0.0;
};

/// Extra optimal-tour length for visiting `bundle` on top of `base`.
inline CostResult bundle_cost(const Instance& inst, const CitySet& base,
                              const std::vector<CityId>& bundle, SolveLimits limits) {
  CostResult res;
  for (CityId c : bundle)
    if (std::binary_search(base.begin(), base.end(), c))
      throw InstanceError("bundle city already in the base set");
  const TourResult b = solve_tsp(inst, base, limits);
  res.consumed += b.consumed;
  if (!b.ok()) return res;
  SolveLimits rest = limits;
  rest.budget = limits.budget - b.consumed;
  const TourResult e = solve_tsp(inst, with(base, bundle), rest);
  res.consumed += e.consumed;
  if (!e.ok()) return res;
  res.base_route = b.route;
  res.extended_route = e.route;
  res.cost = e.route.length - b.route.length;
  res.optimal = b.optimal() && e.optimal();
  return res;
}

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleTour {
  double length = 0.0;
  std::vector<CityId> stops;
};

/// Exact tour over at most 16 cities by dynamic programming over subsets.
inline OracleTour held_karp_tour(const DistanceMatrix& d, const CitySet& cities) {
  const int n = static_cast<int>(cities.size());
  if (n > 16) throw OracleError("held_karp_oracle supports at most 16 cities");
  if (n == 0 || cities.front() != kDepot) throw OracleError("held_karp_oracle needs the depot");
  if (n == 1) return {0.0, {kDepot, kDepot}};
  const int k = n - 1;  // cities other than the depot, bit i <-> cities[i+1]
  const std::size_t full = std::size_t{1} << k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(full * static_cast<std::size_t>(k), kInf);
  std::vector<std::int8_t> parent(best.size(), -1);
  auto at = [k](std::size_t mask, int last) { return mask * static_cast<std::size_t>(k) + static_cast<std::size_t>(last); };
  for (int i = 0; i < k; ++i) best[at(std::size_t{1} << i, i)] = d(kDepot, cities[i + 1]);
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int last = 0; last < k; ++last) {
      if (!(mask & (std::size_t{1} << last))) continue;
      const double cur = best[at(mask, last)];
      if (cur == kInf) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t nm = mask | (std::size_t{1} << nxt);
        const double v = cur + d(cities[last + 1], cities[nxt + 1]);
        if (v < best[at(nm, nxt)]) {
          best[at(nm, nxt)] = v;
          parent[at(nm, nxt)] = static_cast<std::int8_t>(last);
        }
      }
    }
  }
  OracleTour out;
  out.length = kInf;
  int last = -1;
  for (int i = 0; i < k; ++i) {
    const double v = best[at(full - 1, i)] + d(cities[i + 1], kDepot);
    if (v < out.length) {
      out.length = v;
      last = i;
    }
  }
  std::vector<CityId> rev;
  std::size_t mask = full - 1;
  while (last >= 0) {
    rev.push_back(cities[last + 1]);
    const int prev = parent[at(mask, last)];
    mask &= ~(std::size_t{1} << last);
    last = prev;
  }
  out.stops = {kDepot};
  out.stops.insert(out.stops.end(), rev.rbegin(), rev.rend());
  out.stops.push_back(kDepot);
  return out;
}

inline double held_karp_oracle(const DistanceMatrix& d, const CitySet& cities) {
  return held_karp_tour(d, cities).length;
}

}  // namespace mtsp
