#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtsp {

/// Tolerance for comparing route lengths and costs.
inline constexpr double kLengthTol = 1e-6;

using CityId = int;
using SalesmanId = int;
inline constexpr CityId kDepot = 0;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Exact Euclidean distance; no TSPLIB nearest-integer rounding.
inline double euclidean_distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(const std::vector<Point>& pts) : n_(pts.size()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        d_[i * n_ + j] = d_[j * n_ + i] = euclidean_distance(pts[i], pts[j]);
  }

  double operator()(CityId i, CityId j) const {
    return d_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// City sets are kept sorted; the depot is always a member.
using CitySet = std::vector<CityId>;

/// Partition of non-depot cities over salesmen; every set also holds the depot.
struct Allocation {
  std::vector<CitySet> sets;

  std::size_t salesmen() const { return sets.size(); }
  bool operator==(const Allocation&) const = default;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CitySet make_city_set(std::vector<CityId> cities) {
  if (std::find(cities.begin(), cities.end(), kDepot) == cities.end()) cities.push_back(kDepot);
  std::sort(cities.begin(), cities.end());
  cities.erase(std::unique(cities.begin(), cities.end()), cities.end());
  return cities;
}

/// City 1 goes to salesman 0, city 2 to salesman 1, and so on cyclically.
inline Allocation round_robin_endowment(int n, int m) {
  if (m < 1) throw InstanceError("instance needs at least one salesman");
  Allocation a;
  a.sets.assign(static_cast<std::size_t>(m), CitySet{kDepot});
  for (int c = 1; c < n; ++c) a.sets[static_cast<std::size_t>((c - 1) % m)].push_back(c);
  return a;
}

struct Violation {
  enum class Kind { UnknownCity, DuplicateCity, MissingCity, MissingDepot, TooFewCities, NoSalesmen };
  Kind kind;
  int subject;  // the offending city, or salesman for MissingDepot/TooFewCities

  bool operator==(const Violation&) const = default;
};

inline std::string to_string(const Violation& v) {
  const char* names[] = {"unknown-city", "duplicate-city", "missing-city",
                         "missing-depot", "too-few-cities", "no-salesmen"};
  return std::string(names[static_cast<int>(v.kind)]) + "(" + std::to_string(v.subject) + ")";
}

/// Empty result iff the allocation partitions cities 1..n-1, every set holds
/// the depot, and every set has at least one other city.
inline std::vector<Violation> validate_allocation(int n, const Allocation& alloc) {
  std::vector<Violation> out;
  if (alloc.sets.empty()) {
    out.push_back({Violation::Kind::NoSalesmen, 0});
    return out;
  }
  std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  std::set<int> reported_dup;
  for (std::size_t a = 0; a < alloc.sets.size(); ++a) {
    const auto& set = alloc.sets[a];
    bool has_depot = false;
    int others = 0;
    for (CityId c : set) {
      if (c < 0 || c >= n) {
        out.push_back({Violation::Kind::UnknownCity, c});
        continue;
      }
      if (c == kDepot) {
        has_depot = true;
        continue;
      }
      ++others;
      if (++seen[static_cast<std::size_t>(c)] == 2 && reported_dup.insert(c).second)
        out.push_back({Violation::Kind::DuplicateCity, c});
    }
    if (!has_depot) out.push_back({Violation::Kind::MissingDepot, static_cast<int>(a)});
    if (others < 1) out.push_back({Violation::Kind::TooFewCities, static_cast<int>(a)});
  }
  for (int c = 1; c < n; ++c)
    if (seen[static_cast<std::size_t>(c)] == 0) out.push_back({Violation::Kind::MissingCity, c});
  return out;
}

/// Depot plus cities, salesman count, and the initial endowment.
class Instance {
 public:
  Instance(std::vector<Point> cities, Allocation endowment, std::string name = {})
      : cities_(std::move(cities)),
        endowment_(std::move(endowment)),
        dist_(cities_),
        name_(std::move(name)) {
    for (auto& s : endowment_.sets) s = make_city_set(std::move(s));
    if (endowment_.salesmen() < 1) throw InstanceError("instance needs at least one salesman");
    if (auto v = validate_allocation(n(), endowment_); !v.empty())
      throw InstanceError("invalid endowment: " + to_string(v.front()));
  }

  /// Round-robin endowment over m salesmen.
  Instance(std::vector<Point> cities, int m, std::string name = {})
      : Instance(cities, round_robin_endowment(static_cast<int>(cities.size()), m), std::move(name)) {}

  int n() const { return static_cast<int>(cities_.size()); }
  int m() const { return static_cast<int>(endowment_.salesmen()); }
  const std::vector<Point>& cities() const { return cities_; }
  Point city(CityId c) const { return cities_.at(static_cast<std::size_t>(c)); }
  const Allocation& endowment() const { return endowment_; }
  const DistanceMatrix& distances() const { return dist_; }
  double distance(CityId i, CityId j) const { return dist_(i, j); }
  const std::string& name() const { return name_; }

 private:
  std::vector<Point> cities_;
  Allocation endowment_;
  DistanceMatrix dist_;
  std::string name_;
};

/// Closed tour through city indices; first and last entries are the depot.
struct Route {
  std::vector<CityId> stops{kDepot, kDepot};
  double length = 0.0;
};

inline double route_length(const std::vector<CityId>& stops, const DistanceMatrix& d) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
    const CityId a = stops[k];
    const CityId b = stops[k + 1];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= d.size() ||
        static_cast<std::size_t>(b) >= d.size())
      throw InstanceError("route references unknown city");
    len += d(a, b);
  }
  return len;
}

inline double route_length(const Route& r, const Instance& inst) {
  return route_length(r.stops, inst.distances());
}

/// True when the route starts and ends at the depot and visits exactly `cities`.
inline bool route_covers(const Route& r, const CitySet& cities) {
  if (r.stops.size() < 2 || r.stops.front() != kDepot || r.stops.back() != kDepot) return false;
  std::vector<CityId> inner(r.stops.begin() + 1, r.stops.end() - 1);
  inner.push_back(kDepot);
  std::sort(inner.begin(), inner.end());
  if (std::adjacent_find(inner.begin(), inner.end()) != inner.end()) return false;
  return inner == cities;
}

/// Visits cities in set order; used when no solver incumbent is available.
inline Route naive_route(const CitySet& cities, const DistanceMatrix& d) {
  Route r;
  r.stops = {kDepot};
  for (CityId c : cities)
    if (c != kDepot) r.stops.push_back(c);
  r.stops.push_back(kDepot);
  r.length = route_length(r.stops, d);
  return r;
}

inline CitySet without(const CitySet& s, CityId c) {
  CitySet out;
  out.reserve(s.size());
  for (CityId x : s)
    if (x != c) out.push_back(x);
  return out;
}

inline CitySet with(CitySet s, const std::vector<CityId>& add) {
  s.insert(s.end(), add.begin(), add.end());
  return make_city_set(std::move(s));
}

}  // namespace mtsp
