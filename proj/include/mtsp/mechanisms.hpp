#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mtsp/clock.hpp"
#include "mtsp/clustering.hpp"
#include "mtsp/core.hpp"
#include "mtsp/exchange.hpp"
#include "mtsp/routing.hpp"

namespace mtsp {

enum class MechanismKind {
  NoRealloc,
  Centr_b,
  P2P_b,
  P2P_s,
  CNP_b,
  CNP_s,
  Auction_b,
  Auction_s,
  ClusterR_b,
  ClusterS_b,
};

inline constexpr std::array<std::pair<MechanismKind, std::string_view>, 10> kMechanismNames{{
    {MechanismKind::NoRealloc, "norealloc"},
    {MechanismKind::Centr_b, "centr_b"},
    {MechanismKind::P2P_b, "p2p_b"},
    {MechanismKind::P2P_s, "p2p_s"},
    {MechanismKind::CNP_b, "cnp_b"},
    {MechanismKind::CNP_s, "cnp_s"},
    {MechanismKind::Auction_b, "auction_b"},
    {MechanismKind::Auction_s, "auction_s"},
    {MechanismKind::ClusterR_b, "cluster_r_b"},
    {MechanismKind::ClusterS_b, "cluster_s_b"},
}};

inline std::string to_string(MechanismKind k) {
  for (const auto& [kind, name] : kMechanismNames)
    if (kind == k) return std::string(name);
  return "?";
}

inline std::optional<MechanismKind> parse_mechanism(std::string_view s) {
  for (const auto& [kind, name] : kMechanismNames)
    if (name == s) return kind;
  return std::nullopt;
}

inline std::vector<MechanismKind> all_mechanisms() {
  std::vector<MechanismKind> out;
  for (const auto& [kind, name] : kMechanismNames) out.push_back(kind);
  return out;
}

enum class Termination { Converged, BudgetExhausted };

inline const char* to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "budget-exhausted";
}

// A city offered by `agent` to `counterpart` (a salesman, the central agent,
// or everyone at once).
struct Proposal {
  SalesmanId agent = 0;
  int counterpart = 0;
  CityId city = 0;
};

// One protocol round as seen from outside.
struct RoundRecord {
  int round = 0;
  std::string kind;          // init, centr, cluster, p2p, cnp, auction
  int host = -1;             // host salesman, or the central agent
  std::vector<int> participants;
  std::vector<CityId> proposed;
  std::vector<Proposal> proposals;
  std::optional<double> objective;   // exchange objective after padding
  std::optional<double> status_quo;  // sum of the proposers' own savings
  bool all_optimal = true;           // every sub-solve proven optimal
  bool changed = false;              // allocation differs after the round
  bool padded_choice = false;        // a padded cost entry was selected
  std::string outcome;               // no-op, kept, exchanged, abandoned, ...
  double total_before = 0.0;
  double total_after = 0.0;
  double elapsed = 0.0;  // clock after the round
  Allocation allocation;  // after the round
};

struct RunResult {
  MechanismKind kind = MechanismKind::NoRealloc;
  Allocation allocation;
  std::vector<Route> routes;  // routes[a] visits allocation.sets[a]
  std::vector<RoundRecord> trace;
  double elapsed = 0.0;
  std::map<int, double> ledger;
  Termination termination = Termination::Converged;
  bool fallback = false;  // centralised or clustering step produced nothing usable

  double total() const {
    double t = 0.0;
    for (const auto& r : routes) t += r.length;
    return t;
  }
};

inline nlohmann::json to_json(const RoundRecord& r) {
  nlohmann::json j;
  j["round"] = r.round;
  j["kind"] = r.kind;
  j["host"] = r.host;
  j["participants"] = r.participants;
  j["proposed"] = r.proposed;
  j["objective"] = r.objective ? nlohmann::json(*r.objective) : nlohmann::json(nullptr);
  j["status_quo"] = r.status_quo ? nlohmann::json(*r.status_quo) : nlohmann::json(nullptr);
  j["all_optimal"] = r.all_optimal;
  j["changed"] = r.changed;
  j["padded_choice"] = r.padded_choice;
  j["outcome"] = r.outcome;
  j["total_before"] = r.total_before;
  j["total_after"] = r.total_after;
  j["elapsed"] = r.elapsed;
  j["allocation"] = r.allocation.sets;
  return j;
}

/// One JSON object per line: the rounds, then a summary record.
inline void write_trace(std::ostream& out, const RunResult& res, const std::string& instance_id = {}) {
  for (const auto& r : res.trace) {
    auto j = to_json(r);
    j["mechanism"] = to_string(res.kind);
    if (!instance_id.empty()) j["instance"] = instance_id;
    out << j.dump() << "\n";
  }
  nlohmann::json s;
  s["mechanism"] = to_string(res.kind);
  if (!instance_id.empty()) s["instance"] = instance_id;
  s["summary"] = true;
  s["total"] = res.total();
  s["elapsed"] = res.elapsed;
  s["termination"] = to_string(res.termination);
  s["fallback"] = res.fallback;
  nlohmann::json ledger = nlohmann::json::object();
  for (const auto& [actor, t] : res.ledger) ledger[actor == kCentralAgent ? "ca" : std::to_string(actor)] = t;
  s["ledger"] = ledger;
  out << s.dump() << "\n";
}

namespace detail {

// Counterpart key for a host city offered to every other salesman at once.
inline constexpr int kBroadcast = -2;

struct Agent {
  CitySet cities;
  Route route;
  std::map<int, std::set<CityId>> proposed;  // counterpart -> cities already offered
};

// What one participant knows after choosing the city it gives up.
struct Offer {
  int slot = 0;  // position in the exchange round
  SalesmanId agent = 0;
  CityId city = 0;
  double saving = 0.0;
  CitySet base;                               // cities without the offered one
  std::map<std::vector<CityId>, Route> tours;  // tour of base plus the key cities

  double base_length() const { return tours.at({}).length; }
  std::optional<double> cost(const std::vector<CityId>& add) const {
    auto key = add;
    std::sort(key.begin(), key.end());
    const auto it = tours.find(key);
    if (it == tours.end()) return std::nullopt;
    return it->second.length - base_length();
  }
};

class MechanismRun {
 public:
  MechanismRun(const Instance& inst, MechanismKind kind, VirtualClock clock)
      : inst_(inst), kind_(kind), clock_(std::move(clock)) {
    agents_.resize(static_cast<std::size_t>(inst.m()));
    for (int a = 0; a < inst.m(); ++a) {
      agents_[a].cities = inst.endowment().sets[a];
      agents_[a].route = naive_route(agents_[a].cities, inst.distances());
    }
  }

  RunResult execute() {
    switch (kind_) {
      case MechanismKind::NoRealloc: initial_tours(); break;
      case MechanismKind::Centr_b: centralised(); break;
      case MechanismKind::ClusterR_b: clustered(ClusterFormulation::R); break;
      case MechanismKind::ClusterS_b: clustered(ClusterFormulation::S); break;
      case MechanismKind::P2P_b:
      case MechanismKind::P2P_s:
        if (initial_tours()) p2p(kind_ == MechanismKind::P2P_s);
        break;
      case MechanismKind::CNP_b:
      case MechanismKind::CNP_s:
        if (initial_tours()) cnp(kind_ == MechanismKind::CNP_s);
        break;
      case MechanismKind::Auction_b:
      case MechanismKind::Auction_s:
        if (initial_tours()) auction(kind_ == MechanismKind::Auction_s);
        break;
    }
    RunResult res;
    res.kind = kind_;
    for (const auto& a : agents_) {
      res.allocation.sets.push_back(a.cities);
      res.routes.push_back(a.route);
    }
    res.trace = std::move(trace_);
    res.elapsed = clock_.elapsed();
    res.ledger = clock_.ledger();
    res.termination = exhausted_ ? Termination::BudgetExhausted : Termination::Converged;
    res.fallback = fallback_;
    return res;
  }

 private:
  int m() const { return static_cast<int>(agents_.size()); }

  double total() const {
    double t = 0.0;
    for (const auto& a : agents_) t += a.route.length;
    return t;
  }

  RoundRecord open_round(const std::string& kind, int host) {
    RoundRecord r;
    r.round = static_cast<int>(trace_.size());
    r.kind = kind;
    r.host = host;
    r.total_before = total();
    return r;
  }

  void close_round(RoundRecord r) {
    r.total_after = total();
    r.elapsed = clock_.elapsed();
    r.allocation.sets.clear();
    for (const auto& a : agents_) r.allocation.sets.push_back(a.cities);
    trace_.push_back(std::move(r));
  }

  TourResult tsp(int actor, const CitySet& cities, RoundRecord& rec) {
    TourResult t = solve_tsp(inst_, cities, clock_.limits_for(actor));
    clock_.charge(actor, t.consumed);
    if (!t.optimal()) {
      rec.all_optimal = false;
      exhausted_ = true;
    }
    return t;
  }

  // The agent's drop MILP against the given counterpart.
  std::optional<Offer> make_offer(SalesmanId a, int counterpart, RoundRecord& rec, bool& failed) {
    auto& ag = agents_[a];
    DropQuery q{ag.cities, ag.proposed[counterpart], ag.route.length};
    bool any = false;
    for (CityId c : ag.cities)
      if (c != kDepot && !q.proposed.count(c)) any = true;
    if (!any) return std::nullopt;
    const DropResult d = select_city_to_drop(inst_, q, clock_.limits_for(a));
    clock_.charge(a, d.consumed);
    if (d.status != SolveStatus::Optimal || !d.city) {
      rec.all_optimal = false;
      exhausted_ = true;
      failed = true;
      return std::nullopt;
    }
    ag.proposed[counterpart].insert(*d.city);
    rec.proposals.push_back({a, counterpart, *d.city});
    Offer o;
    o.agent = a;
    o.city = *d.city;
    o.saving = d.saving;
    o.base = without(ag.cities, *d.city);
    o.tours[{}] = d.remaining;
    o.tours[{*d.city}] = ag.route;
    return o;
  }

  // Prices base plus `add` for the offering agent; false when out of budget.
  bool price(Offer& o, std::vector<CityId> add, RoundRecord& rec) {
    std::sort(add.begin(), add.end());
    if (o.tours.count(add)) return true;
    const TourResult t = tsp(o.agent, with(o.base, add), rec);
    if (!t.optimal()) return false;
    o.tours[add] = t.route;
    return true;
  }

  bool initial_tours() {
    RoundRecord rec = open_round("init", kCentralAgent);
    clock_.begin_phase();
    bool ok = true;
    for (int a = 0; a < m(); ++a) {
      rec.participants.push_back(a);
      const TourResult t = tsp(a, agents_[a].cities, rec);
      if (t.ok()) agents_[a].route = t.route;
      ok = ok && t.optimal();
    }
    rec.outcome = ok ? "solved" : "budget";
    close_round(std::move(rec));
    return ok;
  }

  void centralised() {
    RoundRecord rec = open_round("centr", kCentralAgent);
    clock_.begin_phase();
    const MtspResult r = solve_mtsp(inst_, m(), clock_.limits_for(kCentralAgent));
    clock_.charge(kCentralAgent, r.consumed);
    rec.all_optimal = r.status == SolveStatus::Optimal;
    if (!rec.all_optimal) exhausted_ = true;
    if (r.ok()) {
      for (int a = 0; a < m(); ++a) {
        agents_[a].cities = r.allocation.sets[a];
        agents_[a].route = r.routes[a];
      }
      rec.outcome = rec.all_optimal ? "optimal" : "incumbent";
    } else {
      // Nothing usable: the salesmen route their endowments with what is left.
      fallback_ = true;
      rec.outcome = "fallback";
      clock_.begin_phase();
      for (int a = 0; a < m(); ++a) {
        const TourResult t = tsp(a, agents_[a].cities, rec);
        if (t.ok()) agents_[a].route = t.route;
      }
    }
    rec.changed = true;
    close_round(std::move(rec));
  }

  void clustered(ClusterFormulation f) {
    RoundRecord rec = open_round("cluster", kCentralAgent);
    clock_.begin_phase();
    const ClusterResult c = cluster(inst_, m(), f, clock_.limits_for(kCentralAgent));
    clock_.charge(kCentralAgent, c.consumed);
    if (c.status != SolveStatus::Optimal) {
      rec.all_optimal = false;
      exhausted_ = true;
    }
    fallback_ = c.fell_back;
    for (int a = 0; a < m(); ++a) {
      agents_[a].cities = c.allocation.sets[a];
      agents_[a].route = naive_route(agents_[a].cities, inst_.distances());
    }
    clock_.begin_phase();
    for (int a = 0; a < m(); ++a) {
      rec.participants.push_back(a);
      const TourResult t = tsp(a, agents_[a].cities, rec);
      if (t.ok()) agents_[a].route = t.route;
    }
    rec.outcome = c.fell_back ? "fallback" : "clustered";
    rec.changed = !(c.allocation == inst_.endowment());
    close_round(std::move(rec));
  }

  // Applies a solved exchange; tours that were not priced are solved now.
  bool apply(const ExchangeRound& er, const ExchangeDecision& dec, std::vector<Offer>& offers,
             const CostMatrix& raw, RoundRecord& rec) {
    for (std::size_t k = 0; k < er.num_agents(); ++k)
      for (std::size_t b = 0; b < er.num_bundles(); ++b)
        if (dec.x[k][b] && !raw.d[b][k]) rec.padded_choice = true;
    clock_.begin_phase();
    std::vector<std::pair<CitySet, Route>> next(offers.size());
    for (std::size_t k = 0; k < offers.size(); ++k) {
      auto got = dec.received(er, k);
      if (!price(offers[k], got, rec)) return false;
      next[k] = {with(offers[k].base, got), offers[k].tours.at(got)};
    }
    bool changed = false;
    for (std::size_t k = 0; k < offers.size(); ++k) {
      auto& ag = agents_[offers[k].agent];
      if (ag.cities != next[k].first) changed = true;
      ag.cities = std::move(next[k].first);
      ag.route = std::move(next[k].second);
    }
    rec.changed = changed;
    return true;
  }

  void abandon(RoundRecord& rec) { rec.outcome = "abandoned"; }

  // --- P2P -----------------------------------------------------------------

  // Returns whether any city was proposed.
  bool p2p_round(SalesmanId h, SalesmanId g, bool selfish) {
    RoundRecord rec = open_round("p2p", h);
    rec.participants = {h, g};
    bool failed = false;
    clock_.begin_phase();
    auto og = make_offer(g, h, rec, failed);
    if (failed) return abandon(rec), close_round(std::move(rec)), true;
    if (!og) {
      rec.outcome = "no-op";
      close_round(std::move(rec));
      return false;
    }
    rec.proposed.push_back(og->city);
    clock_.begin_phase();
    auto oh = make_offer(h, g, rec, failed);
    if (failed) return abandon(rec), close_round(std::move(rec)), true;
    if (!oh) {
      rec.outcome = "host-declined";
      close_round(std::move(rec));
      return true;
    }
    rec.proposed.insert(rec.proposed.begin(), oh->city);
    if (!price(*oh, {og->city}, rec) || (!selfish && !price(*oh, {oh->city, og->city}, rec)))
      return abandon(rec), close_round(std::move(rec)), true;
    clock_.begin_phase();
    if (!price(*og, {oh->city}, rec) || (!selfish && !price(*og, {oh->city, og->city}, rec)))
      return abandon(rec), close_round(std::move(rec)), true;

    rec.status_quo = oh->saving + og->saving;
    if (selfish) {
      const double gh = *og->cost({oh->city});
      const double hg = *oh->cost({og->city});
      const bool swap = gh < og->saving - kLengthTol && hg < oh->saving - kLengthTol;
      rec.objective = swap ? gh + hg : *rec.status_quo;
      if (swap) {
        auto& H = agents_[h];
        auto& G = agents_[g];
        H.cities = with(oh->base, {og->city});
        H.route = oh->tours.at({og->city});
        G.cities = with(og->base, {oh->city});
        G.route = og->tours.at({oh->city});
        rec.changed = true;
      }
      rec.outcome = swap ? "swapped" : "kept";
      close_round(std::move(rec));
      return true;
    }

    oh->slot = 0;
    og->slot = 1;
    std::vector<Offer> offers{*oh, *og};
    exchange(ExchangeKind::P2P, offers, g, rec);
    close_round(std::move(rec));
    return true;
  }

  // Builds the matrix from whatever each offer priced, pads it, and solves.
  void exchange(ExchangeKind kind, std::vector<Offer>& offers, int solver, RoundRecord& rec) {
    std::vector<SalesmanId> agents;
    std::vector<CityId> cities;
    std::vector<int> counts;
    for (const auto& o : offers) {
      agents.push_back(o.agent);
      cities.push_back(o.city);
      counts.push_back(static_cast<int>(agents_[o.agent].cities.size()));
    }
    const ExchangeRound er = build_bundles(kind, agents, cities, counts);
    CostMatrix raw = CostMatrix::for_round(er);
    for (std::size_t b = 0; b < er.num_bundles(); ++b)
      for (std::size_t k = 0; k < offers.size(); ++k) {
        if (!allowed(kind, er, k, b)) continue;
        raw.d[b][k] = offers[k].cost(er.bundles[b]);
      }
    const CostMatrix padded = pad_missing_costs(raw);
    const ExchangeDecision dec = solve_exchange(er, padded, clock_.limits_for(solver));
    clock_.charge(solver, dec.consumed);
    if (dec.status != SolveStatus::Optimal) {
      rec.all_optimal = false;
      exhausted_ = true;
      return abandon(rec);
    }
    rec.objective = dec.objective;
    if (!apply(er, dec, offers, raw, rec)) return abandon(rec);
    rec.outcome = rec.changed ? "exchanged" : "kept";
  }

  // Which entries of the matrix the protocol actually computes.
  static bool allowed(ExchangeKind kind, const ExchangeRound& er, std::size_t k, std::size_t b) {
    const auto& bundle = er.bundles[b];
    const CityId own = er.proposed[k];
    const bool has_own = std::find(bundle.begin(), bundle.end(), own) != bundle.end();
    switch (kind) {
      case ExchangeKind::P2P: return true;
      case ExchangeKind::CNP:
        if (k == 0) return true;  // the host prices everything
        if (bundle.size() == 1) return bundle[0] == er.proposed[0] || bundle[0] == own;
        return has_own;
      case ExchangeKind::Auction: return bundle.size() == 1 || has_own;
    }
    return false;
  }

  void p2p(bool selfish) {
    if (m() < 2) return;
    for (;;) {
      bool any = false;
      for (int h = 0; h < m(); ++h)
        for (int g = 0; g < m(); ++g) {
          if (h == g) continue;
          any = p2p_round(h, g, selfish) || any;
          if (exhausted_) return;
        }
      if (!any) return;
    }
  }

  // --- CNP -----------------------------------------------------------------

  bool cnp_round(SalesmanId h, bool selfish) {
    RoundRecord rec = open_round("cnp", h);
    bool failed = false;
    clock_.begin_phase();
    auto oh = make_offer(h, kBroadcast, rec, failed);
    if (failed) return abandon(rec), close_round(std::move(rec)), true;
    if (!oh) {
      rec.outcome = "no-op";
      close_round(std::move(rec));
      return false;
    }
    rec.proposed.push_back(oh->city);
    rec.participants.push_back(h);

    // Guests answer in parallel.
    clock_.begin_phase();
    std::vector<Offer> guests;
    for (int g = 0; g < m(); ++g) {
      if (g == h) continue;
      auto og = make_offer(g, h, rec, failed);
      if (failed) return abandon(rec), close_round(std::move(rec)), true;
      if (!og) continue;
      if (!price(*og, {oh->city}, rec)) return abandon(rec), close_round(std::move(rec)), true;
      if (selfish) {
        // Only guests that gain from the swap reply.
        if (!(*og->cost({oh->city}) < og->saving - kLengthTol)) continue;
      } else if (!price(*og, {oh->city, og->city}, rec)) {
        return abandon(rec), close_round(std::move(rec)), true;
      }
      guests.push_back(std::move(*og));
    }
    if (guests.empty()) {
      rec.outcome = "no-guest";
      close_round(std::move(rec));
      return true;
    }
    for (const auto& g : guests) {
      rec.participants.push_back(g.agent);
      rec.proposed.push_back(g.city);
    }

    clock_.begin_phase();
    for (const auto& g : guests) {
      if (!price(*oh, {g.city}, rec)) return abandon(rec), close_round(std::move(rec)), true;
      if (!selfish && !price(*oh, {oh->city, g.city}, rec))
        return abandon(rec), close_round(std::move(rec)), true;
    }
    double sq = oh->saving;
    for (const auto& g : guests) sq += g.saving;
    rec.status_quo = sq;

    if (selfish) {
      int pick = -1;
      double best = oh->saving - kLengthTol;
      for (std::size_t i = 0; i < guests.size(); ++i) {
        const double c = *oh->cost({guests[i].city});
        if (c < best) {
          best = c;
          pick = static_cast<int>(i);
        }
      }
      rec.objective = sq;
      if (pick >= 0) {
        const Offer& g = guests[pick];
        rec.objective = sq - oh->saving - g.saving + best + *g.cost({oh->city});
        auto& H = agents_[h];
        auto& G = agents_[g.agent];
        H.cities = with(oh->base, {g.city});
        H.route = oh->tours.at({g.city});
        G.cities = with(g.base, {oh->city});
        G.route = g.tours.at({oh->city});
        rec.changed = true;
      }
      rec.outcome = pick >= 0 ? "swapped" : "kept";
      close_round(std::move(rec));
      return true;
    }

    std::vector<Offer> offers{*oh};
    for (auto& g : guests) offers.push_back(std::move(g));
    exchange(ExchangeKind::CNP, offers, h, rec);
    close_round(std::move(rec));
    return true;
  }

  void cnp(bool selfish) {
    if (m() < 2) return;
    for (;;) {
      bool any = false;
      for (int h = 0; h < m(); ++h) {
        any = cnp_round(h, selfish) || any;
        if (exhausted_) return;
      }
      if (!any) return;
    }
  }

  // --- Auction ---------------------------------------------------------------

  bool auction_round(bool selfish) {
    RoundRecord rec = open_round("auction", kCentralAgent);
    bool failed = false;
    clock_.begin_phase();
    std::vector<Offer> offers;
    for (int a = 0; a < m(); ++a) {
      auto o = make_offer(a, kCentralAgent, rec, failed);
      if (failed) return abandon(rec), close_round(std::move(rec)), true;
      if (o) offers.push_back(std::move(*o));
    }
    for (const auto& o : offers) {
      rec.participants.push_back(o.agent);
      rec.proposed.push_back(o.city);
    }
    if (offers.size() < 2) {
      rec.outcome = offers.empty() ? "no-op" : "single-bidder";
      close_round(std::move(rec));
      return !offers.empty();
    }
    clock_.begin_phase();
    for (auto& o : offers)
      for (const auto& other : offers) {
        if (other.agent == o.agent) continue;
        if (!price(o, {other.city}, rec) || (!selfish && !price(o, {o.city, other.city}, rec)))
          return abandon(rec), close_round(std::move(rec)), true;
      }
    double sq = 0.0;
    for (const auto& o : offers) sq += o.saving;
    rec.status_quo = sq;
    if (selfish) {
      auction_singles(offers, rec);
    } else {
      exchange(ExchangeKind::Auction, offers, kCentralAgent, rec);
    }
    close_round(std::move(rec));
    return true;
  }

  // Single-city bundles only: each bidder ends up with exactly one city.
  void auction_singles(std::vector<Offer>& offers, RoundRecord& rec) {
    std::vector<SalesmanId> agents;
    std::vector<CityId> cities;
    std::vector<int> counts;
    for (const auto& o : offers) {
      agents.push_back(o.agent);
      cities.push_back(o.city);
      counts.push_back(static_cast<int>(agents_[o.agent].cities.size()));
    }
    ExchangeRound er = build_bundles(ExchangeKind::Auction, agents, cities, counts);
    er.bundles.resize(offers.size());
    CostMatrix raw = CostMatrix::for_round(er);
    for (std::size_t b = 0; b < er.num_bundles(); ++b)
      for (std::size_t k = 0; k < offers.size(); ++k) raw.d[b][k] = offers[k].cost(er.bundles[b]);
    const ExchangeDecision dec = solve_exchange(er, raw, clock_.limits_for(kCentralAgent));
    clock_.charge(kCentralAgent, dec.consumed);
    if (dec.status != SolveStatus::Optimal) {
      rec.all_optimal = false;
      exhausted_ = true;
      return abandon(rec);
    }
    rec.objective = dec.objective;
    if (!apply(er, dec, offers, raw, rec)) return abandon(rec);
    rec.outcome = rec.changed ? "exchanged" : "kept";
  }

  void auction(bool selfish) {
    if (m() < 2) return;
    while (auction_round(selfish)) {
      if (exhausted_) return;
    }
  }

  const Instance& inst_;
  MechanismKind kind_;
  VirtualClock clock_;
  std::vector<Agent> agents_;
  std::vector<RoundRecord> trace_;
  bool exhausted_ = false;
  bool fallback_ = false;
};

}  // namespace detail

/// Runs one mechanism on an instance under a solver-time budget.
inline RunResult run_mechanism(const Instance& inst, MechanismKind kind, VirtualClock clock) {
  return detail::MechanismRun(inst, kind, std::move(clock)).execute();
}

inline RunResult run_mechanism(const Instance& inst, MechanismKind kind, milp::SolveLimits limits) {
  return run_mechanism(inst, kind, VirtualClock(limits.mode, limits.budget));
}

inline RunResult run_norealloc(const Instance& inst, milp::SolveLimits limits) {
  return run_mechanism(inst, MechanismKind::NoRealloc, limits);
}
inline RunResult run_centr(const Instance& inst, milp::SolveLimits limits) {
  return run_mechanism(inst, MechanismKind::Centr_b, limits);
}
inline RunResult run_p2p(const Instance& inst, milp::SolveLimits limits, bool selfish = false) {
  return run_mechanism(inst, selfish ? MechanismKind::P2P_s : MechanismKind::P2P_b, limits);
}
inline RunResult run_cnp(const Instance& inst, milp::SolveLimits limits, bool selfish = false) {
  return run_mechanism(inst, selfish ? MechanismKind::CNP_s : MechanismKind::CNP_b, limits);
}
inline RunResult run_auction(const Instance& inst, milp::SolveLimits limits, bool selfish = false) {
  return run_mechanism(inst, selfish ? MechanismKind::Auction_s : MechanismKind::Auction_b, limits);
}
inline RunResult run_cluster(const Instance& inst, milp::SolveLimits limits, ClusterFormulation f) {
  return run_mechanism(inst, f == ClusterFormulation::R ? MechanismKind::ClusterR_b : MechanismKind::ClusterS_b,
                       limits);
}

}  // namespace mtsp
