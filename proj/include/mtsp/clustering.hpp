#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mtsp/core.hpp"
#include "mtsp/milp/solver.hpp"

namespace mtsp {

// R: p-median (m medians, every city assigned to one, total assignment
// distance minimised). S: minimise the largest within-cluster distance.
enum class ClusterFormulation { R, S };

inline const char* to_string(ClusterFormulation f) { return f == ClusterFormulation::R ? "R" : "S"; }

struct ClusterResult {
  Allocation allocation;  // clusters ordered by smallest city, depot added
  SolveStatus status = SolveStatus::NoIncumbent;
  double objective = 0.0;
  double consumed = 0.0;
  bool fell_back = false;  // no incumbent: the endowment was kept

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
};

namespace detail {

inline Allocation clusters_to_allocation(std::vector<std::vector<CityId>> groups) {
  for (auto& g : groups) g = make_city_set(std::move(g));
  std::sort(groups.begin(), groups.end(), [](const CitySet& a, const CitySet& b) {
    return a.size() > 1 && b.size() > 1 ? a[1] < b[1] : a.size() > b.size();
  });
  return Allocation{std::move(groups)};
}

inline std::vector<std::vector<CityId>> p_median_groups(const milp::Model&, const std::vector<CityId>& cities,
                                                        const std::vector<std::vector<int>>& z,
                                                        const std::vector<double>& x) {
  const std::size_t k = cities.size();
  std::vector<std::vector<CityId>> by_median(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (x[z[i][j]] > 0.5) by_median[j].push_back(cities[i]);
  std::vector<std::vector<CityId>> out;
  for (auto& g : by_median)
    if (!g.empty()) out.push_back(std::move(g));
  return out;
}

}  // namespace detail

/// Partitions the non-depot cities into m clusters.
inline ClusterResult cluster(const Instance& inst, int m, ClusterFormulation f, milp::SolveLimits limits) {
  std::vector<CityId> cities;
  for (CityId c = 1; c < inst.n(); ++c) cities.push_back(c);
  const int k = static_cast<int>(cities.size());
  if (m < 1 || m > k) throw InstanceError("cluster count must be between 1 and the number of cities");
  const auto& d = inst.distances();
  ClusterResult res;
  milp::Model model;

  if (f == ClusterFormulation::R) {
    std::vector<int> y(k);
    std::vector<std::vector<int>> z(k, std::vector<int>(k));
    for (int j = 0; j < k; ++j) y[j] = model.add_binary("y_" + std::to_string(cities[j]));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        z[i][j] = model.add_binary("z_" + std::to_string(cities[i]) + "_" + std::to_string(cities[j]));
        model.set_objective(z[i][j], d(cities[i], cities[j]));
      }
    for (int i = 0; i < k; ++i) {
      std::vector<milp::Term> t;
      for (int j = 0; j < k; ++j) t.push_back({z[i][j], 1.0});
      model.add_constraint(std::move(t), milp::Relation::Equal, 1.0);
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        model.add_constraint({{z[i][j], 1.0}, {y[j], -1.0}}, milp::Relation::LessEqual, 0.0);
      }
    // A median serves itself, so no cluster is empty.
    for (int j = 0; j < k; ++j)
      model.add_constraint({{z[j][j], 1.0}, {y[j], -1.0}}, milp::Relation::Equal, 0.0);
    std::vector<milp::Term> count;
    for (int j = 0; j < k; ++j) count.push_back({y[j], 1.0});
    model.add_constraint(std::move(count), milp::Relation::Equal, m);

    const auto sol = milp::solve(model, limits);
    res.status = sol.status;
    res.consumed = sol.consumed;
    if (sol.has_incumbent()) {
      res.objective = sol.objective;
      res.allocation = detail::clusters_to_allocation(detail::p_median_groups(model, cities, z, sol.values));
    }
  } else {
    // Labels are symmetric, so city i may only use labels 0..i.
    std::vector<std::vector<int>> z(k, std::vector<int>(m, -1));
    const int diam = model.add_continuous("diameter");
    model.set_objective(diam, 1.0);
    for (int i = 0; i < k; ++i) {
      std::vector<milp::Term> t;
      for (int c = 0; c < m && c <= i; ++c) {
        z[i][c] = model.add_binary("z_" + std::to_string(cities[i]) + "_" + std::to_string(c));
        t.push_back({z[i][c], 1.0});
      }
      model.add_constraint(std::move(t), milp::Relation::Equal, 1.0);
    }
    for (int c = 0; c < m; ++c) {
      std::vector<milp::Term> t;
      for (int i = c; i < k; ++i) t.push_back({z[i][c], 1.0});
      model.add_constraint(std::move(t), milp::Relation::GreaterEqual, 1.0);
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        for (int c = 0; c < m && c <= i; ++c) {
          const double dij = d(cities[i], cities[j]);
          // diameter >= dij * (z_ic + z_jc - 1)
          model.add_constraint({{diam, 1.0}, {z[i][c], -dij}, {z[j][c], -dij}}, milp::Relation::GreaterEqual, -dij);
        }

    const auto sol = milp::solve(model, limits);
    res.status = sol.status;
    res.consumed = sol.consumed;
    if (sol.has_incumbent()) {
      res.objective = sol.objective;
      std::vector<std::vector<CityId>> groups(m);
      for (int i = 0; i < k; ++i)
        for (int c = 0; c < m && c <= i; ++c)
          if (sol.values[z[i][c]] > 0.5) groups[c].push_back(cities[i]);
      res.allocation = detail::clusters_to_allocation(std::move(groups));
    }
  }

  if (!res.ok()) {
    res.fell_back = true;
    res.allocation = inst.m() == m ? inst.endowment() : round_robin_endowment(inst.n(), m);
  }
  return res;
}

}  // namespace mtsp
