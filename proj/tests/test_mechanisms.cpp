#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mtsp/experiments.hpp"
#include "mtsp/mechanisms.hpp"
#include "oracles.hpp"

using namespace mtsp;

namespace {

const SolveLimits kUnlimited = SolveLimits::unlimited();

// Host 0 holds (100,50) and (0,200); guest 1 holds (50,200), (50,150), (200,150).
Instance worked_example() {
  return Instance({{0, 0}, {50, 200}, {50, 150}, {200, 150}, {100, 50}, {0, 200}},
                  Allocation{{{0, 4, 5}, {0, 1, 2, 3}}}, "worked");
}

const RoundRecord* first_round(const RunResult& r, const std::string& kind) {
  for (const auto& rec : r.trace)
    if (rec.kind == kind) return &rec;
  return nullptr;
}

void expect_valid_trace(const Instance& inst, const RunResult& r) {
  for (const auto& rec : r.trace)
    EXPECT_TRUE(validate_allocation(inst.n(), rec.allocation).empty()) << to_string(r.kind) << " round " << rec.round;
  EXPECT_TRUE(validate_allocation(inst.n(), r.allocation).empty());
  ASSERT_EQ(r.routes.size(), r.allocation.sets.size());
  for (std::size_t a = 0; a < r.routes.size(); ++a) {
    EXPECT_TRUE(route_covers(r.routes[a], r.allocation.sets[a]));
    EXPECT_NEAR(route_length(r.routes[a], inst), r.routes[a].length, 1e-6);
  }
}

double tour(const Instance& inst, const CitySet& s) { return oracle::tsp_permutations(inst.distances(), s); }

}  // namespace

TEST(Names, RoundTrip) {
  for (auto k : all_mechanisms()) EXPECT_EQ(parse_mechanism(to_string(k)), k);
  EXPECT_FALSE(parse_mechanism("cluster_s").has_value());
  EXPECT_EQ(all_mechanisms().size(), 10u);
}

TEST(NoRealloc, ForcedTriangleEqualsCentr) {
  const Instance inst({{0, 0}, {10, 0}, {0, 10}}, 2);
  EXPECT_NEAR(run_norealloc(inst, kUnlimited).total(), 40.0, 1e-9);
  EXPECT_NEAR(run_centr(inst, kUnlimited).total(), 40.0, 1e-9);
}

TEST(NoRealloc, InterleavedEndowmentIsWorse) {
  for (int i = 0; i < 3; ++i) {
    const Instance inst = experiments::gen_circle(1, i, 10, 2);
    const double centr = run_centr(inst, kUnlimited).total();
    EXPECT_NEAR(centr, oracle::mtsp_partition(inst.distances(), 2), 1e-6);
    EXPECT_GT(run_norealloc(inst, kUnlimited).total(), centr + 1e-6);
  }
}

TEST(NoRealloc, KeepsEndowment) {
  const auto inst = worked_example();
  const auto r = run_norealloc(inst, kUnlimited);
  EXPECT_EQ(r.allocation, inst.endowment());
  EXPECT_NEAR(r.routes[1].length, 616.23, 0.01);
}

TEST(Centr, MatchesOracle) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 4; ++rep) {
    const Instance inst(oracle::random_points(rng, 9), 2);
    const auto r = run_centr(inst, kUnlimited);
    EXPECT_EQ(r.termination, Termination::Converged);
    EXPECT_NEAR(r.total(), oracle::mtsp_partition(inst.distances(), 2), 1e-6);
    expect_valid_trace(inst, r);
  }
}

TEST(Centr, OneNodeBudgetExhausts) {
  std::mt19937_64 rng(32);
  const Instance inst(oracle::random_points(rng, 9), 2);
  const auto r = run_centr(inst, SolveLimits::nodes(1));
  EXPECT_EQ(r.termination, Termination::BudgetExhausted);
  expect_valid_trace(inst, r);
  if (r.fallback) EXPECT_EQ(r.allocation, inst.endowment());
}

TEST(P2P, WorkedExampleFirstRound) {
  const auto inst = worked_example();
  const auto r = run_p2p(inst, kUnlimited);
  const auto* rec = first_round(r, "p2p");
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->host, 0);
  EXPECT_EQ(rec->proposed, (std::vector<CityId>{5, 3}));
  ASSERT_TRUE(rec->objective.has_value());
  EXPECT_NEAR(*rec->objective, 272.66, 0.01);
  EXPECT_NEAR(*rec->status_quo, 470.42, 0.02);
  EXPECT_EQ(rec->outcome, "exchanged");
  EXPECT_EQ(rec->allocation.sets[0], (CitySet{0, 4}));
  EXPECT_EQ(rec->allocation.sets[1], (CitySet{0, 1, 2, 3, 5}));
  expect_valid_trace(inst, r);
  EXPECT_GE(r.total(), run_centr(inst, kUnlimited).total() - 1e-6);
}

TEST(P2P, SelfishNeverMovesBundles) {
  const auto inst = worked_example();
  const auto r = run_p2p(inst, kUnlimited, true);
  const auto* rec = first_round(r, "p2p");
  ASSERT_NE(rec, nullptr);
  EXPECT_TRUE(rec->outcome == "kept" || rec->outcome == "swapped") << rec->outcome;
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    for (std::size_t a = 0; a < 2; ++a)
      EXPECT_EQ(r.trace[k].allocation.sets[a].size(), r.trace[k - 1].allocation.sets[a].size());
  expect_valid_trace(inst, r);
}

TEST(P2P, OptimalEndowmentIsStable) {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 3; ++rep) {
    const auto pts = oracle::random_points(rng, 8);
    const auto centr = run_centr(Instance(pts, 2), kUnlimited);
    const Instance inst(pts, centr.allocation);
    const auto r = run_p2p(inst, kUnlimited);
    EXPECT_EQ(r.termination, Termination::Converged);
    for (const auto& rec : r.trace) EXPECT_FALSE(rec.changed) << rec.outcome;
    EXPECT_NEAR(r.total(), centr.total(), 1e-6);
  }
}

TEST(P2P, SingleSalesmanDoesNothing) {
  const Instance inst({{0, 0}, {1, 2}, {3, 1}}, 1);
  const auto r = run_p2p(inst, kUnlimited);
  EXPECT_EQ(r.trace.size(), 1u);  // initial tours only
  EXPECT_NEAR(r.total(), tour(inst, {1, 2}), 1e-9);
}

TEST(CNP, OneGuestMatchesP2PRound) {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 4; ++rep) {
    const Instance inst(oracle::random_points(rng, 8), 2);
    const auto p_run = run_p2p(inst, kUnlimited);
    const auto* p = first_round(p_run, "p2p");
    const auto c_run = run_cnp(inst, kUnlimited);
    const auto* c = first_round(c_run, "cnp");
    ASSERT_TRUE(p && c);
    EXPECT_EQ(p->proposed, c->proposed);
    ASSERT_EQ(p->objective.has_value(), c->objective.has_value());
    if (p->objective) EXPECT_NEAR(*p->objective, *c->objective, 1e-6);
    EXPECT_EQ(p->allocation, c->allocation);
  }
}

// The host's round matrix rebuilt by brute force gives the same optimum.
TEST(CNP, TwoGuestRoundMatchesEnumeration) {
  std::mt19937_64 rng(35);
  int checked = 0;
  for (int rep = 0; rep < 10 && checked < 3; ++rep) {
    const Instance inst(oracle::random_points(rng, 9), 3);
    const auto r = run_cnp(inst, kUnlimited);
    const auto* rec = first_round(r, "cnp");
    ASSERT_NE(rec, nullptr);
    if (rec->participants.size() != 3 || !rec->objective) continue;
    ++checked;
    const auto& before = inst.endowment();
    const auto er = build_bundles(ExchangeKind::CNP, rec->participants, rec->proposed,
                                  {static_cast<int>(before.sets[rec->participants[0]].size()),
                                   static_cast<int>(before.sets[rec->participants[1]].size()),
                                   static_cast<int>(before.sets[rec->participants[2]].size())});
    CostMatrix m = CostMatrix::for_round(er);
    for (std::size_t k = 0; k < 3; ++k) {
      const CitySet base = without(before.sets[er.agents[k]], er.proposed[k]);
      for (std::size_t b = 0; b < er.num_bundles(); ++b) {
        const auto& bun = er.bundles[b];
        const bool own = std::find(bun.begin(), bun.end(), er.proposed[k]) != bun.end();
        const bool host_single = bun.size() == 1 && bun[0] == er.proposed[0];
        if (k != 0 && !own && !host_single) continue;
        m.d[b][k] = tour(inst, with(base, bun)) - tour(inst, base);
      }
    }
    const auto p = pad_missing_costs(m);
    std::vector<std::vector<double>> dense;
    for (const auto& row : p.d) {
      dense.emplace_back();
      for (const auto& v : row) dense.back().push_back(*v);
    }
    const auto o = oracle::exchange_enumerate(er.bundles, er.proposed, dense, er.city_count, true);
    EXPECT_NEAR(*rec->objective, o.objective, 1e-6);
  }
  EXPECT_GT(checked, 0);
}

TEST(CNP, BenevolentObjectiveNotAboveSelfish) {
  std::mt19937_64 rng(36);
  int compared = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const Instance inst(oracle::random_points(rng, 8), 2);
    const auto b_run = run_cnp(inst, kUnlimited);
    const auto s_run = run_cnp(inst, kUnlimited, true);
    const auto* b = first_round(b_run, "cnp");
    const auto* s = first_round(s_run, "cnp");
    ASSERT_TRUE(b && s);
    if (!b->objective || !s->objective) continue;
    ++compared;
    EXPECT_LE(*b->objective, *s->objective + 1e-6);
  }
  EXPECT_GT(compared, 0);
}

TEST(Auction, TwoBiddersMatchP2PRound) {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 4; ++rep) {
    const Instance inst(oracle::random_points(rng, 8), 2);
    const auto p_run = run_p2p(inst, kUnlimited);
    const auto a_run = run_auction(inst, kUnlimited);
    const auto* p = first_round(p_run, "p2p");
    const auto* a = first_round(a_run, "auction");
    ASSERT_TRUE(p && a);
    EXPECT_EQ(p->proposed, a->proposed);
    ASSERT_TRUE(p->objective && a->objective);
    EXPECT_NEAR(*p->objective, *a->objective, 1e-6);
    EXPECT_EQ(p->allocation, a->allocation);
  }
}

TEST(Auction, ObjectiveBoundedByStatusQuo) {
  std::mt19937_64 rng(38);
  for (int rep = 0; rep < 4; ++rep) {
    const Instance inst(oracle::random_points(rng, 9), 4);
    for (bool selfish : {false, true}) {
      const auto r = run_auction(inst, kUnlimited, selfish);
      for (const auto& rec : r.trace)
        if (rec.objective && rec.status_quo) EXPECT_LE(*rec.objective, *rec.status_quo + 1e-6);
      expect_valid_trace(inst, r);
    }
  }
}

TEST(Auction, FourBiddersUseTenBundles) {
  EXPECT_EQ(build_bundles(ExchangeKind::Auction, {0, 1, 2, 3}, {1, 2, 3, 4}, {3, 3, 3, 3}).num_bundles(), 10u);
}

TEST(Auction, SelfishKeepsCityCounts) {
  std::mt19937_64 rng(39);
  const Instance inst(oracle::random_points(rng, 9), 3);
  const auto r = run_auction(inst, kUnlimited, true);
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    for (std::size_t a = 0; a < 3; ++a)
      EXPECT_EQ(r.trace[k].allocation.sets[a].size(), r.trace[k - 1].allocation.sets[a].size());
}

TEST(Cluster, OneSalesmanIsTsp) {
  std::mt19937_64 rng(40);
  const Instance inst(oracle::random_points(rng, 8), 1);
  for (auto f : {ClusterFormulation::R, ClusterFormulation::S})
    EXPECT_NEAR(run_cluster(inst, kUnlimited, f).total(), tour(inst, {1, 2, 3, 4, 5, 6, 7}), 1e-6);
}

TEST(Cluster, FarGroupsMatchOracle) {
  const Instance inst({{500, 0}, {0, 0}, {1000, 0}, {3, 1}, {1002, 2}, {1, 4}, {1004, 1}, {2, 2}, {1001, 3}}, 2);
  for (auto f : {ClusterFormulation::R, ClusterFormulation::S}) {
    const auto r = run_cluster(inst, kUnlimited, f);
    EXPECT_NEAR(r.total(), oracle::mtsp_partition(inst.distances(), 2), 1e-6);
    EXPECT_NEAR(r.total(), tour(inst, {1, 3, 5, 7}) + tour(inst, {2, 4, 6, 8}), 1e-6);
  }
}

TEST(Cluster, NoBudgetKeepsEndowment) {
  std::mt19937_64 rng(41);
  const Instance inst(oracle::random_points(rng, 8), 2);
  const auto r = run_cluster(inst, SolveLimits::nodes(0), ClusterFormulation::S);
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.allocation, inst.endowment());
  EXPECT_EQ(r.termination, Termination::BudgetExhausted);
}

// Properties over every mechanism on small random instances.
TEST(Properties, DominanceValidityMonotonicity) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 4; ++rep) {
    const int n = 6 + rep, m = 2 + rep % 2;
    const Instance inst(oracle::random_points(rng, n), m);
    const double centr = run_centr(inst, kUnlimited).total();
    for (auto k : all_mechanisms()) {
      const auto r = run_mechanism(inst, k, kUnlimited);
      EXPECT_GE(r.total(), centr - 1e-6) << to_string(k);
      EXPECT_EQ(r.termination, Termination::Converged) << to_string(k);
      expect_valid_trace(inst, r);
      const bool benevolent = k == MechanismKind::P2P_b || k == MechanismKind::CNP_b || k == MechanismKind::Auction_b;
      if (!benevolent) continue;
      for (const auto& rec : r.trace)
        if (rec.all_optimal && rec.kind != "init")
          EXPECT_LE(rec.total_after, rec.total_before + 1e-6) << to_string(k) << " round " << rec.round;
    }
  }
}

TEST(Properties, NoRepeatedProposal) {
  std::mt19937_64 rng(43);
  const Instance inst(oracle::random_points(rng, 9), 3);
  for (auto k : {MechanismKind::P2P_b, MechanismKind::CNP_s, MechanismKind::Auction_b}) {
    const auto r = run_mechanism(inst, k, kUnlimited);
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& rec : r.trace)
      for (const auto& p : rec.proposals)
        EXPECT_TRUE(seen.insert({p.agent, p.counterpart, p.city}).second) << to_string(k);
  }
}

TEST(Properties, DeterministicRuns) {
  std::mt19937_64 rng(44);
  const Instance inst(oracle::random_points(rng, 8), 2);
  for (auto k : all_mechanisms()) {
    const auto a = run_mechanism(inst, k, SolveLimits::nodes(400));
    const auto b = run_mechanism(inst, k, SolveLimits::nodes(400));
    EXPECT_EQ(a.allocation, b.allocation) << to_string(k);
    EXPECT_EQ(a.total(), b.total());
    EXPECT_EQ(a.ledger, b.ledger);
  }
}

TEST(Properties, TightBudgetsStayValid) {
  std::mt19937_64 rng(45);
  const Instance inst(oracle::random_points(rng, 10), 3);
  for (double budget : {0.0, 1.0, 5.0, 20.0, 80.0})
    for (auto k : all_mechanisms()) {
      const auto r = run_mechanism(inst, k, SolveLimits::nodes(budget));
      expect_valid_trace(inst, r);
      EXPECT_LE(r.elapsed, budget + 1e-9) << to_string(k);
    }
}

TEST(Trace, JsonLines) {
  const auto inst = worked_example();
  const auto r = run_auction(inst, kUnlimited);
  std::stringstream out;
  write_trace(out, r, "worked");
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(out, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(rows.size(), r.trace.size() + 1);
  EXPECT_EQ(rows.front()["kind"], "init");
  EXPECT_EQ(rows.back()["summary"], true);
  EXPECT_EQ(rows.back()["mechanism"], "auction_b");
  EXPECT_TRUE(rows.back()["ledger"].contains("ca"));
  EXPECT_NEAR(rows.back()["total"].get<double>(), r.total(), 1e-9);
}
