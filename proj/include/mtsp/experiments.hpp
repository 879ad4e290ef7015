#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtsp/core.hpp"
#include "mtsp/mechanisms.hpp"
#include "mtsp/tsplib.hpp"

namespace mtsp::experiments {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Instance generators

inline constexpr int kCh130Size = 130;

/// City c keeps the abscissa of base city c and takes the ordinate of base
/// city (c + i) mod 130. Cities are dealt round-robin to the salesmen.
inline Instance gen_ch130(const std::vector<Point>& base, int i, int n, int m) {
  if (static_cast<int>(base.size()) != kCh130Size)
    throw ConfigError("ch130 base must hold 130 coordinates, got " + std::to_string(base.size()));
  if (n < 2 || n > kCh130Size) throw ConfigError("ch130 instances need 2 <= n <= 130");
  if (m < 1 || n < m + 1) throw ConfigError("need n >= m + 1");
  std::vector<Point> pts(static_cast<std::size_t>(n));
  const int shift = ((i % kCh130Size) + kCh130Size) % kCh130Size;
  for (int c = 0; c < n; ++c) pts[c] = {base[c].x, base[(c + shift) % kCh130Size].y};
  return Instance(std::move(pts), m, "ch130-" + std::to_string(i) + "-n" + std::to_string(n));
}

inline Instance gen_ch130(const std::string& base_file, int i, int n, int m) {
  return gen_ch130(tsplib::read_file(base_file).points, i, n, m);
}

struct CircleOptions {
  double radius = 150.0;
  double radius_sigma = 0.0;  // zero reproduces the fixed-radius generator
  Point centre{150.0, 150.0};
};

/// Every city (the depot included) sits on a circle at a uniformly drawn
/// angle. The stream depends only on (seed, i), so instances with more
/// cities extend those with fewer.
inline Instance gen_circle(std::uint64_t seed, int i, int n, int m, CircleOptions opt = {}) {
  if (m < 1 || n < m + 1) throw ConfigError("need n >= m + 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> angle(0.0, 360.0);
  std::normal_distribution<double> radius(opt.radius, opt.radius_sigma > 0 ? opt.radius_sigma : 1.0);
  std::vector<Point> pts;
  for (int c = 0; c < n; ++c) {
    const double a = angle(rng) * std::numbers::pi / 180.0;
    const double r = opt.radius_sigma > 0 ? radius(rng) : opt.radius;
    pts.push_back({opt.centre.x + r * std::cos(a), opt.centre.y + r * std::sin(a)});
  }
  return Instance(std::move(pts), m, "circle-" + std::to_string(i) + "-n" + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Statistics and budgets

/// Nearest-rank quantile: the sorted value at rank ceil(q * N).
inline double decile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("decile of an empty list");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

/// Ten halvings: B, B/2, ..., B/2^9.
inline std::vector<double> screening_budgets(double base) {
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(base / std::pow(2.0, k));
  return out;
}

/// Ten linear steps below B/2^7; the step is B * 1250 / 1800000.
inline std::vector<double> detailed_budgets(double base) {
  const double step = base * 1250.0 / 1800000.0;
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(base / 128.0 - step * (1 + k));
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

enum class Generator { Ch130, Circle };

struct ExperimentConfig {
  Generator generator = Generator::Circle;
  int instances = 8;
  std::vector<int> n_values{10};
  int m = 2;
  std::vector<MechanismKind> mechanisms;
  std::vector<double> budgets{1e9};  // experiment 1 uses the first
  ClockMode clock = ClockMode::Nodes;
  std::uint64_t seed = 1;
  std::string base_file;  // ch130 coordinates
  std::string output;  // empty: decided by the caller
  double radius_sigma = 0.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  for (const auto& item : split(v, ',')) {
    try {
      out.push_back(conv(item));
    } catch (const std::exception&) {
      throw ConfigError("bad value '" + item + "' for " + key);
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

}  // namespace detail

inline std::vector<MechanismKind> parse_mechanism_list(const std::string& v) {
  std::vector<MechanismKind> out;
  for (const auto& name : detail::split(v, ',')) {
    if (name == "all") {
      const auto all = all_mechanisms();
      out.insert(out.end(), all.begin(), all.end());
      continue;
    }
    const auto k = parse_mechanism(name);
    if (!k) throw ConfigError("unknown mechanism '" + name + "'");
    out.push_back(*k);
  }
  return out;
}

/// key = value lines; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  c.mechanisms = all_mechanisms();
  std::string line;
  std::string schedule;
  double base_budget = 0.0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    auto as_int = [&](const std::string& s) { return std::stoi(s); };
    auto as_double = [&](const std::string& s) { return std::stod(s); };
    try {
      if (key == "generator") {
        if (val == "ch130" || val == "ch130-permute") c.generator = Generator::Ch130;
        else if (val == "circle") c.generator = Generator::Circle;
        else throw ConfigError("unknown generator '" + val + "'");
      } else if (key == "instances") {
        c.instances = std::stoi(val);
      } else if (key == "n") {
        c.n_values = detail::parse_list<int>(key, val, as_int);
      } else if (key == "m") {
        c.m = std::stoi(val);
      } else if (key == "mechanisms") {
        c.mechanisms = parse_mechanism_list(val);
      } else if (key == "budget" || key == "budgets") {
        c.budgets = detail::parse_list<double>(key, val, as_double);
      } else if (key == "schedule" || key == "budget_schedule") {
        schedule = val;
      } else if (key == "base_budget") {
        base_budget = std::stod(val);
      } else if (key == "clock" || key == "mode") {
        if (val == "nodes") c.clock = ClockMode::Nodes;
        else if (val == "wall") c.clock = ClockMode::Wall;
        else throw ConfigError("clock must be nodes or wall");
      } else if (key == "seed") {
        c.seed = std::stoull(val);
      } else if (key == "base_file") {
        c.base_file = val;
      } else if (key == "output") {
        c.output = val;
      } else if (key == "radius_sigma") {
        c.radius_sigma = std::stod(val);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  if (!schedule.empty()) {
    if (!(base_budget > 0)) throw ConfigError("schedule needs base_budget > 0");
    if (schedule == "screening") c.budgets = screening_budgets(base_budget);
    else if (schedule == "detailed") c.budgets = detailed_budgets(base_budget);
    else throw ConfigError("schedule must be screening or detailed");
  }
  if (c.instances < 1) throw ConfigError("instances must be >= 1");
  if (c.m < 1) throw ConfigError("m must be >= 1");
  for (double b : c.budgets)
    if (!(b > 0)) throw ConfigError("budgets must be positive");
  for (int n : c.n_values)
    if (n < c.m + 1) throw ConfigError("every n must be >= m + 1");
  return c;
}

inline ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Ratio tables

struct RatioRow {
  std::string mechanism;
  int n = 0;
  int m = 0;
  double budget = 0.0;
  int instance_id = 0;
  double ratio = 0.0;
};

struct SummaryRow {
  std::string mechanism;
  double key = 0.0;  // n or budget
  double median = 0.0;
  double d9 = 0.0;
};

struct RatioTable {
  std::string key_name = "n";  // what the summary groups by: n or budget
  std::vector<RatioRow> rows;
  std::vector<std::string> warnings;

  std::vector<double> ratios(const std::string& mechanism, double key) const {
    std::vector<double> out;
    for (const auto& r : rows)
      if (r.mechanism == mechanism && key_of(r) == key) out.push_back(r.ratio);
    return out;
  }

  double key_of(const RatioRow& r) const { return key_name == "budget" ? r.budget : r.n; }

  /// Groups in first-appearance order of mechanism, keys ascending.
  std::vector<SummaryRow> summary() const {
    std::vector<std::string> mechs;
    std::map<std::string, std::vector<double>> keys;
    for (const auto& r : rows) {
      if (std::find(mechs.begin(), mechs.end(), r.mechanism) == mechs.end()) mechs.push_back(r.mechanism);
      auto& k = keys[r.mechanism];
      if (std::find(k.begin(), k.end(), key_of(r)) == k.end()) k.push_back(key_of(r));
    }
    std::vector<SummaryRow> out;
    for (const auto& mech : mechs) {
      auto k = keys[mech];
      std::sort(k.begin(), k.end());
      for (double key : k) {
        const auto v = ratios(mech, key);
        out.push_back({mech, key, decile(v, 0.5), decile(v, 0.9)});
      }
    }
    return out;
  }
};

/// Per-run hook, e.g. for writing traces.
using RunObserver = std::function<void(const Instance&, int instance_id, double budget, const RunResult&)>;

namespace detail {

inline Instance make_instance(const ExperimentConfig& c, const std::vector<Point>& base, int i, int n) {
  if (c.generator == Generator::Ch130) return gen_ch130(base, i, n, c.m);
  CircleOptions opt;
  opt.radius_sigma = c.radius_sigma;
  return gen_circle(c.seed, i, n, c.m, opt);
}

inline std::vector<Point> load_base(const ExperimentConfig& c) {
  if (c.generator != Generator::Ch130) return {};
  if (c.base_file.empty()) throw ConfigError("generator ch130 needs base_file");
  return tsplib::read_file(c.base_file).points;
}

inline void run_cell(const ExperimentConfig& c, const Instance& inst, int i, double budget,
                     RatioTable& table, const RunObserver& observe) {
  const milp::SolveLimits limits{c.clock, budget};
  std::map<MechanismKind, RunResult> done;
  auto run = [&](MechanismKind k) -> const RunResult* {
    if (auto it = done.find(k); it != done.end()) return &it->second;
    try {
      auto res = run_mechanism(inst, k, limits);
      if (observe) observe(inst, i, budget, res);
      return &done.emplace(k, std::move(res)).first->second;
    } catch (const std::exception& e) {
      table.warnings.push_back(to_string(k) + " failed on instance " + std::to_string(i) + ": " + e.what());
      return nullptr;
    }
  };
  const RunResult* centr = run(MechanismKind::Centr_b);
  if (centr == nullptr || !(centr->total() > 0)) {
    table.warnings.push_back("no Centr_b reference for instance " + std::to_string(i));
    return;
  }
  for (MechanismKind k : c.mechanisms) {
    const RunResult* r = run(k);
    if (r == nullptr) continue;
    table.rows.push_back({to_string(k), inst.n(), inst.m(), budget, i, r->total() / centr->total()});
  }
}

}  // namespace detail

/// Fixed budget, one table entry per (mechanism, n, instance).
inline RatioTable run_experiment1(const ExperimentConfig& c, const RunObserver& observe = {}) {
  RatioTable t;
  t.key_name = "n";
  const auto base = detail::load_base(c);
  for (int n : c.n_values)
    for (int i = 0; i < c.instances; ++i)
      detail::run_cell(c, detail::make_instance(c, base, i, n), i, c.budgets.front(), t, observe);
  return t;
}

/// Fixed n (the first listed), one table entry per (mechanism, budget, instance).
inline RatioTable run_experiment2(const ExperimentConfig& c, const RunObserver& observe = {}) {
  RatioTable t;
  t.key_name = "budget";
  const auto base = detail::load_base(c);
  const int n = c.n_values.front();
  for (double b : c.budgets)
    for (int i = 0; i < c.instances; ++i)
      detail::run_cell(c, detail::make_instance(c, base, i, n), i, b, t, observe);
  return t;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_detail_csv(std::ostream& out, const RatioTable& t) {
  out << "mechanism,n,m,budget,instance_id,ratio\n";
  for (const auto& r : t.rows)
    out << r.mechanism << ',' << r.n << ',' << r.m << ',' << format_number(r.budget) << ',' << r.instance_id
        << ',' << format_number(r.ratio) << '\n';
}

inline void write_summary_csv(std::ostream& out, const RatioTable& t) {
  out << "mechanism,budget_or_n,median,d9\n";
  for (const auto& s : t.summary())
    out << s.mechanism << ',' << format_number(s.key) << ',' << format_number(s.median) << ','
        << format_number(s.d9) << '\n';
}

/// Writes <prefix>_detail.csv and <prefix>_summary.csv.
inline void emit_report(const RatioTable& t, const std::string& prefix) {
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
  };
  {
    auto f = open(prefix + "_detail.csv");
    write_detail_csv(f, t);
    if (!f) throw std::runtime_error("write failed: " + prefix + "_detail.csv");
  }
  {
    auto f = open(prefix + "_summary.csv");
    write_summary_csv(f, t);
    if (!f) throw std::runtime_error("write failed: " + prefix + "_summary.csv");
  }
}

/// Reads a detail CSV back. The summary key is the budget when the file
/// holds more than one budget, otherwise n.
inline RatioTable read_detail_csv(std::istream& in) {
  RatioTable t;
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "mechanism,n,m,budget,instance_id,ratio")
    throw ConfigError("not a detail CSV (bad header)");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(detail::trim(cell));
    if (f.size() != 6) throw ConfigError("line " + std::to_string(line_no) + ": expected 6 fields");
    try {
      t.rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]), std::stoi(f[4]), std::stod(f[5])});
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": bad number");
    }
  }
  std::vector<double> budgets;
  for (const auto& r : t.rows)
    if (std::find(budgets.begin(), budgets.end(), r.budget) == budgets.end()) budgets.push_back(r.budget);
  t.key_name = budgets.size() > 1 ? "budget" : "n";
  return t;
}

}  // namespace mtsp::experiments
