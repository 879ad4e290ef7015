#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mtsp/experiments.hpp"
#include "mtsp/mechanisms.hpp"
#include "mtsp/tsplib.hpp"

namespace fs = std::filesystem;
namespace ex = mtsp::experiments;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --out, then the config, then $MTSP_OUT_DIR, then ./out
std::string output_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("MTSP_OUT_DIR"); env != nullptr && *env) return env;
  return "out";
}

mtsp::ClockMode parse_mode(const std::string& s) {
  if (s == "nodes") return mtsp::ClockMode::Nodes;
  if (s == "wall") return mtsp::ClockMode::Wall;
  throw UsageError("--mode must be nodes or wall");
}

mtsp::MechanismKind parse_mechanism_flag(const std::string& s) {
  if (s == "cluster_s" || s == "cluster_r" || s == "centr_s")
    throw UsageError("mechanism '" + s + "' has no specified variant; use e.g. cluster_s_b");
  if (auto k = mtsp::parse_mechanism(s)) return *k;
  throw UsageError("unknown mechanism '" + s + "'");
}

ex::ExperimentConfig load_config(const std::string& path) {
  try {
    return ex::read_config(path);
  } catch (const ex::ConfigError& e) {
    throw UsageError(e.what());
  }
}

void write_tables(const ex::RatioTable& t, const std::string& dir, const std::string& prefix) {
  fs::create_directories(dir);
  ex::emit_report(t, (fs::path(dir) / prefix).string());
  for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << (fs::path(dir) / (prefix + "_detail.csv")).string() << " and "
            << (fs::path(dir) / (prefix + "_summary.csv")).string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-salesman allocation mechanisms: instance generation, runs and experiments"};
  app.require_subcommand(1, 1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instance files");
  std::string gen_kind = "circle", gen_out, gen_base;
  std::uint64_t gen_seed = 1;
  int gen_n = 10, gen_m = 2, gen_count = 1;
  gen->add_option("--generator", gen_kind, "circle or ch130")->check(CLI::IsMember({"circle", "ch130"}));
  gen->add_option("--seed", gen_seed, "Random seed (circle)");
  gen->add_option("--n", gen_n, "Cities including the depot")->check(CLI::PositiveNumber);
  gen->add_option("--m", gen_m, "Salesmen")->check(CLI::PositiveNumber);
  gen->add_option("--count", gen_count, "Number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--base", gen_base, "130-city coordinate file (ch130)");
  gen->add_option("--out", gen_out, "Output directory");

  // run
  auto* run = app.add_subcommand("run", "Run one mechanism on one instance");
  std::string run_instance, run_mech, run_mode = "nodes", run_trace;
  double run_budget = 1e9;
  int run_m = 2;
  run->add_option("--instance", run_instance, "Instance file")->required();
  run->add_option("--mechanism", run_mech, "Mechanism name")->required();
  run->add_option("--budget", run_budget, "Budget (nodes or milliseconds)");
  run->add_option("--mode", run_mode, "nodes or wall");
  run->add_option("--trace", run_trace, "Write the round trace (JSON lines) here");
  run->add_option("--m", run_m, "Salesmen when the file does not say")->check(CLI::PositiveNumber);

  // exp1 / exp2
  std::string exp_config, exp_out;
  auto* exp1 = app.add_subcommand("exp1", "Fixed budget, varying n");
  exp1->add_option("--config", exp_config, "key=value config file")->required();
  exp1->add_option("--out", exp_out, "Output directory");
  auto* exp2 = app.add_subcommand("exp2", "Fixed n, varying budget");
  exp2->add_option("--config", exp_config, "key=value config file")->required();
  exp2->add_option("--out", exp_out, "Output directory");

  // report
  auto* report = app.add_subcommand("report", "Recompute the summary from a detail CSV");
  std::string rep_detail, rep_out;
  report->add_option("--detail-csv", rep_detail, "Detail CSV")->required();
  report->add_option("--out", rep_out, "Summary CSV path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*gen) {
      const std::string dir = output_dir(gen_out, "");
      fs::create_directories(dir);
      std::vector<mtsp::Point> base;
      if (gen_kind == "ch130") {
        if (gen_base.empty()) throw UsageError("--generator ch130 needs --base");
        base = mtsp::tsplib::read_file(gen_base).points;
      }
      for (int i = 0; i < gen_count; ++i) {
        const mtsp::Instance inst = gen_kind == "ch130" ? ex::gen_ch130(base, i, gen_n, gen_m)
                                                        : ex::gen_circle(gen_seed, i, gen_n, gen_m);
        const fs::path path = fs::path(dir) / (inst.name() + ".tsp");
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        mtsp::tsplib::write(f, inst);
        std::cout << path.string() << "\n";
      }
      return 0;
    }
    if (*run) {
      const auto kind = parse_mechanism_flag(run_mech);
      const auto mode = parse_mode(run_mode);
      if (!(run_budget >= 0)) throw UsageError("--budget must be nonnegative");
      const auto file = mtsp::tsplib::read_file(run_instance);
      const mtsp::Instance inst = mtsp::tsplib::to_instance(file, run_m);
      const auto res = mtsp::run_mechanism(inst, kind, mtsp::SolveLimits{mode, run_budget});
      std::cout << "mechanism " << mtsp::to_string(kind) << "\n";
      std::cout << "total " << ex::format_number(res.total()) << "\n";
      std::cout << "elapsed " << ex::format_number(res.elapsed) << "\n";
      std::cout << "termination " << mtsp::to_string(res.termination) << "\n";
      for (std::size_t a = 0; a < res.routes.size(); ++a) {
        std::cout << "route " << a << ":";
        for (mtsp::CityId c : res.routes[a].stops) std::cout << " " << c + 1;
        std::cout << " (" << res.routes[a].length << ")\n";
      }
      if (!run_trace.empty()) {
        std::ofstream t(run_trace);
        if (!t) throw std::runtime_error("cannot write " + run_trace);
        mtsp::write_trace(t, res, inst.name());
      }
      return 0;
    }
    if (*exp1 || *exp2) {
      const auto cfg = load_config(exp_config);
      const std::string dir = output_dir(exp_out, cfg.output);
      if (*exp1) write_tables(ex::run_experiment1(cfg), dir, "exp1");
      else write_tables(ex::run_experiment2(cfg), dir, "exp2");
      return 0;
    }
    if (*report) {
      std::ifstream in(rep_detail);
      if (!in) throw std::runtime_error("cannot open " + rep_detail);
      const auto table = ex::read_detail_csv(in);
      if (rep_out.empty()) {
        ex::write_summary_csv(std::cout, table);
      } else {
        std::ofstream f(rep_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + rep_out);
        ex::write_summary_csv(f, table);
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
