#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mtsp/core.hpp"
#include "oracles.hpp"

using namespace mtsp;

namespace {

// Worked example layout: depot, then the five salesman cities.
std::vector<Point> example_points() {
  return {{0, 0}, {50, 200}, {50, 150}, {200, 150}, {100, 50}, {0, 200}};
}

}  // namespace

TEST(Distance, Examples) {
  EXPECT_NEAR(euclidean_distance({0, 0}, {50, 150}), 158.1139, 1e-3);
  EXPECT_EQ(euclidean_distance({7, 7}, {7, 7}), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_distance({0, 0}, {3, 4}), 5.0);
}

TEST(Distance, NoIntegerRounding) {
  EXPECT_NEAR(euclidean_distance({0, 0}, {1, 1}), std::sqrt(2.0), 1e-15);
}

TEST(Distance, MatrixSymmetricZeroDiagonal) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = oracle::random_points(rng, 12);
    const Instance inst(pts, 3);
    const auto& d = inst.distances();
    for (int i = 0; i < inst.n(); ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (int j = 0; j < inst.n(); ++j) {
        EXPECT_EQ(d(i, j), d(j, i));
        EXPECT_GE(d(i, j), 0.0);
      }
    }
  }
}

TEST(RouteLength, Examples) {
  const Instance inst(example_points(), 2);
  Route r;
  r.stops = {0, 2, 1, 0};
  EXPECT_NEAR(route_length(r, inst), 414.27, 0.01);
  EXPECT_EQ(route_length(Route{}, inst), 0.0);
  r.stops = {0, 3, 1, 5, 2, 0};
  EXPECT_NEAR(route_length(r, inst), 686.94, 0.01);
}

TEST(RouteLength, UnknownCityThrows) {
  const Instance inst(example_points(), 2);
  Route r;
  r.stops = {0, 9, 0};
  EXPECT_THROW(route_length(r, inst), InstanceError);
}

TEST(RouteLength, ReversalInvariant) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance inst(oracle::random_points(rng, 9), 2);
    std::vector<CityId> stops{1, 2, 3, 4, 5, 6, 7, 8};
    std::shuffle(stops.begin(), stops.end(), rng);
    stops.insert(stops.begin(), 0);
    stops.push_back(0);
    const double fwd = route_length(stops, inst.distances());
    std::reverse(stops.begin(), stops.end());
    EXPECT_NEAR(route_length(stops, inst.distances()), fwd, 1e-9);
  }
}

TEST(Allocation, RoundRobinIsValid) {
  EXPECT_TRUE(validate_allocation(7, round_robin_endowment(7, 2)).empty());
  const auto a = round_robin_endowment(7, 2);
  EXPECT_EQ(a.sets[0], (CitySet{0, 1, 3, 5}));
  EXPECT_EQ(a.sets[1], (CitySet{0, 2, 4, 6}));
}

TEST(Allocation, DuplicateCity) {
  Allocation a{{{0, 1, 3}, {0, 2, 3, 4, 5, 6}}};
  const auto v = validate_allocation(7, a);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::DuplicateCity, 3}));
  EXPECT_EQ(to_string(v[0]), "duplicate-city(3)");
}

TEST(Allocation, DepotOnlySalesman) {
  Allocation a{{{0, 1, 2, 3, 4, 5, 6}, {0}}};
  const auto v = validate_allocation(7, a);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::TooFewCities, 1}));
}

TEST(Allocation, OtherViolations) {
  EXPECT_EQ(validate_allocation(4, Allocation{}).front().kind, Violation::Kind::NoSalesmen);
  const auto missing = validate_allocation(4, Allocation{{{0, 1}, {0, 2}}});
  ASSERT_EQ(missing.size(), 1u);
  EXPECT_EQ(missing[0], (Violation{Violation::Kind::MissingCity, 3}));
  const auto depot = validate_allocation(3, Allocation{{{1}, {0, 2}}});
  ASSERT_EQ(depot.size(), 1u);
  EXPECT_EQ(depot[0], (Violation{Violation::Kind::MissingDepot, 0}));
  const auto unknown = validate_allocation(3, Allocation{{{0, 1, 7}, {0, 2}}});
  ASSERT_EQ(unknown.size(), 1u);
  EXPECT_EQ(unknown[0], (Violation{Violation::Kind::UnknownCity, 7}));
}

// Property: random corruption is flagged exactly when the partition rules break.
TEST(Allocation, RandomCorruptionMatchesDirectCheck) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const int m = 1 + static_cast<int>(rng() % (n - 1));
    Allocation a = round_robin_endowment(n, m);
    const int edits = static_cast<int>(rng() % 3);
    for (int e = 0; e < edits; ++e) {
      auto& s = a.sets[rng() % m];
      switch (rng() % 4) {
        case 0:
          if (!s.empty()) s.erase(s.begin() + static_cast<long>(rng() % s.size()));
          break;
        case 1: s.push_back(static_cast<CityId>(rng() % n)); break;
        case 2: {
          // move a city to another salesman: still valid unless a set empties
          auto& t = a.sets[rng() % m];
          auto it = std::find_if(s.begin(), s.end(), [](CityId c) { return c != 0; });
          if (it != s.end() && &s != &t) {
            t.push_back(*it);
            s.erase(it);
          }
          break;
        }
        default: break;
      }
    }
    // direct check
    std::vector<int> count(n, 0);
    bool ok = true;
    for (const auto& s : a.sets) {
      int depots = 0, others = 0;
      for (CityId c : s) {
        if (c == 0) ++depots;
        else {
          ++others;
          ++count[c];
        }
      }
      ok = ok && depots >= 1 && others >= 1;
    }
    for (int c = 1; c < n; ++c) ok = ok && count[c] == 1;
    EXPECT_EQ(validate_allocation(n, a).empty(), ok) << "rep " << rep;
  }
}

TEST(Instance, RejectsBadEndowment) {
  EXPECT_THROW(Instance(example_points(), Allocation{{{0, 1, 2}, {0, 3, 4}}}), InstanceError);
  EXPECT_THROW(Instance(example_points(), 0), InstanceError);
  const Instance ok(example_points(), Allocation{{{1, 2, 0}, {5, 4, 3}}});
  EXPECT_EQ(ok.endowment().sets[1], (CitySet{0, 3, 4, 5}));
}

TEST(Route, Covers) {
  Route r;
  r.stops = {0, 2, 1, 0};
  EXPECT_TRUE(route_covers(r, {0, 1, 2}));
  EXPECT_FALSE(route_covers(r, {0, 1, 2, 3}));
  r.stops = {0, 2, 2, 0};
  EXPECT_FALSE(route_covers(r, {0, 2}));
}
