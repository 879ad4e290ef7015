#pragma once

// Brute-force reference answers used by the tests. Written independently of
// the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "mtsp/core.hpp"

namespace oracle {

using mtsp::CityId;
using mtsp::DistanceMatrix;
using mtsp::Point;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest closed tour from the depot through `cities` by trying every order.
inline double tsp_permutations(const DistanceMatrix& d, std::vector<CityId> cities) {
  cities.erase(std::remove(cities.begin(), cities.end(), 0), cities.end());
  if (cities.empty()) return 0.0;
  std::sort(cities.begin(), cities.end());
  double best = kInf;
  do {
    double len = d(0, cities.front()) + d(cities.back(), 0);
    for (std::size_t k = 0; k + 1 < cities.size(); ++k) len += d(cities[k], cities[k + 1]);
    best = std::min(best, len);
  } while (std::next_permutation(cities.begin(), cities.end()));
  return best;
}

/// Optimal tour length of every subset of cities 1..n-1 (bit i = city i+1),
/// from one subset dynamic program rooted at the depot.
inline std::vector<double> all_subset_tours(const DistanceMatrix& d) {
  const int k = static_cast<int>(d.size()) - 1;
  const std::size_t full = std::size_t{1} << k;
  std::vector<double> path(full * k, kInf);  // path[S*k + j]: depot -> S, ending at j
  for (int j = 0; j < k; ++j) path[(std::size_t{1} << j) * k + j] = d(0, j + 1);
  for (std::size_t s = 1; s < full; ++s)
    for (int j = 0; j < k; ++j) {
      if (!(s >> j & 1)) continue;
      const double here = path[s * k + j];
      if (here == kInf) continue;
      for (int t = 0; t < k; ++t) {
        if (s >> t & 1) continue;
        const std::size_t s2 = s | (std::size_t{1} << t);
        path[s2 * k + t] = std::min(path[s2 * k + t], here + d(j + 1, t + 1));
      }
    }
  std::vector<double> tour(full, 0.0);
  for (std::size_t s = 1; s < full; ++s) {
    double best = kInf;
    for (int j = 0; j < k; ++j)
      if (s >> j & 1) best = std::min(best, path[s * k + j] + d(j + 1, 0));
    tour[s] = best;
  }
  return tour;
}

/// Best total over all partitions of cities 1..n-1 into exactly m nonempty
/// groups, each toured optimally from the depot.
inline double mtsp_partition(const DistanceMatrix& d, int m) {
  const int k = static_cast<int>(d.size()) - 1;
  const auto tour = all_subset_tours(d);
  const std::size_t full = (std::size_t{1} << k) - 1;
  // f[g][S]: best cover of S by exactly g groups.
  std::vector<std::vector<double>> f(m + 1, std::vector<double>(full + 1, kInf));
  for (std::size_t s = 1; s <= full; ++s) f[1][s] = tour[s];
  for (int g = 2; g <= m; ++g)
    for (std::size_t s = 1; s <= full; ++s) {
      const std::size_t low = s & (~s + 1);
      // Enumerate subsets T of S that hold the lowest city of S.
      for (std::size_t t = s; t; t = (t - 1) & s) {
        if (!(t & low) || t == s) continue;
        const double rest = f[g - 1][s ^ t];
        if (rest == kInf) continue;
        f[g][s] = std::min(f[g][s], tour[t] + rest);
      }
    }
  return f[m][full];
}

/// Calls visit(labels) for every partition of k items into exactly m blocks,
/// each partition once (restricted growth strings).
inline void for_each_partition(int k, int m, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> lab(k, 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == k) {
      if (used == m) visit(lab);
      return;
    }
    if (used + (k - i) < m) return;
    for (int c = 0; c <= std::min(used, m - 1); ++c) {
      lab[i] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
}

/// p-median cost: every group pays the distances to its best member.
inline double p_median_cost(const DistanceMatrix& d, const std::vector<std::vector<CityId>>& groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    double best = kInf;
    for (CityId med : g) {
      double s = 0.0;
      for (CityId c : g) s += d(c, med);
      best = std::min(best, s);
    }
    total += best;
  }
  return total;
}

inline double max_diameter(const DistanceMatrix& d, const std::vector<std::vector<CityId>>& groups) {
  double worst = 0.0;
  for (const auto& g : groups)
    for (CityId a : g)
      for (CityId b : g) worst = std::max(worst, d(a, b));
  return worst;
}

/// Minimum of `cost` over all partitions of cities 1..n-1 into m groups.
inline double best_partition(const DistanceMatrix& d, int m,
                             const std::function<double(const std::vector<std::vector<CityId>>&)>& cost) {
  const int k = static_cast<int>(d.size()) - 1;
  double best = kInf;
  for_each_partition(k, m, [&](const std::vector<int>& lab) {
    std::vector<std::vector<CityId>> groups(m);
    for (int i = 0; i < k; ++i) groups[lab[i]].push_back(i + 1);
    best = std::min(best, cost(groups));
  });
  return best;
}

// Exchange winner determination by enumerating, for every bundle, which agent
// (or nobody) takes it.
struct ExchangeAnswer {
  bool feasible = false;
  double objective = kInf;
  std::vector<std::vector<int>> x;  // [agent][bundle], lexicographically smallest optimum
};

inline ExchangeAnswer exchange_enumerate(const std::vector<std::vector<CityId>>& bundles,
                                         const std::vector<CityId>& proposed,
                                         const std::vector<std::vector<double>>& cost,  // [bundle][agent]
                                         const std::vector<int>& city_count, bool one_bundle) {
  const int nb = static_cast<int>(bundles.size());
  const int na = static_cast<int>(city_count.size());
  ExchangeAnswer ans;
  std::vector<int> owner(nb, -1);
  std::function<void(int)> rec = [&](int b) {
    if (b == nb) {
      std::vector<int> cover(proposed.size(), 0);
      std::vector<int> count(na, 0), size(na, 0);
      double obj = 0.0;
      for (int j = 0; j < nb; ++j) {
        if (owner[j] < 0) continue;
        ++count[owner[j]];
        size[owner[j]] += static_cast<int>(bundles[j].size());
        obj += cost[j][owner[j]];
        for (CityId c : bundles[j])
          ++cover[std::find(proposed.begin(), proposed.end(), c) - proposed.begin()];
      }
      for (int c : cover)
        if (c != 1) return;
      for (int a = 0; a < na; ++a) {
        if (one_bundle && count[a] > 1) return;
        if (size[a] < 3 - city_count[a]) return;
      }
      std::vector<std::vector<int>> x(na, std::vector<int>(nb, 0));
      for (int j = 0; j < nb; ++j)
        if (owner[j] >= 0) x[owner[j]][j] = 1;
      if (!ans.feasible || obj < ans.objective - 1e-6) {
        ans = {true, obj, x};
      } else if (std::abs(obj - ans.objective) <= 1e-6) {
        ans.objective = std::min(ans.objective, obj);
        if (x < ans.x) ans.x = x;
      }
      return;
    }
    for (int a = -1; a < na; ++a) {
      owner[b] = a;
      rec(b + 1);
    }
  };
  rec(0);
  return ans;
}

inline std::vector<Point> random_points(std::mt19937_64& rng, int n, double side = 100.0) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
  return pts;
}

}  // namespace oracle
