#include "cli.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "treeweave/boundary_sweeps.hpp"
#include "treeweave/churn.hpp"
#include "treeweave/errors.hpp"
#include "treeweave/graph.hpp"
#include "treeweave/mixing.hpp"
#include "treeweave/pairing.hpp"
#include "treeweave/report.hpp"
#include "treeweave/rng.hpp"
#include "treeweave/spectral.hpp"
#include "treeweave/vtree.hpp"

namespace treeweave::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw Error("write to '" + path + "' failed");
}

bool is_power_of_two(std::uint32_t x) { return x >= 2 && (x & (x - 1)) == 0; }

struct SimulateOptions {
  ScenarioConfig config;
  std::string adversary = "highest_h";
  std::size_t jobs = 1;
  std::string out_path;
  std::string summary_path;
  bool gnuplot = false;
};

/// Executes the runs (in parallel up to the jobs bound; traces land in
/// per-run slots, so the merged output does not depend on scheduling).
std::vector<RoundTrace> run_batch(const ScenarioConfig& config, std::size_t jobs) {
  std::vector<std::vector<RoundTrace>> slots(config.runs);
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, config.runs));
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t run = next.fetch_add(1);
        if (run >= config.runs || failed.load()) return;
        try {
          slots[run] = run_one(config, run);
        } catch (const std::exception& e) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          failed.store(true);
          if (error_message.empty()) error_message = e.what();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw ScenarioError(error_message);

  std::vector<RoundTrace> merged;
  merged.reserve(config.runs * config.total_rounds);
  for (const auto& slot : slots) merged.insert(merged.end(), slot.begin(), slot.end());
  return merged;
}

int cmd_simulate(const SimulateOptions& opt) {
  ScenarioConfig config = opt.config;
  config.adversary = adversary_from_name(opt.adversary);
  config.validate();

  const std::vector<RoundTrace> traces = run_batch(config, opt.jobs);
  const SummaryStats stats = summarize(traces);

  if (!opt.out_path.empty()) write_file(opt.out_path, traces_to_csv(traces));
  if (!opt.summary_path.empty()) write_file(opt.summary_path, summary_to_json(config, stats));
  if (opt.gnuplot) {
    const std::filesystem::path base(opt.out_path);
    const std::filesystem::path dir = base.parent_path();
    const std::string stem = base.stem().string();
    for (std::size_t run = 0; run < config.runs; ++run) {
      const std::filesystem::path p =
          dir / (stem + "_run" + std::to_string(run) + ".dat");
      write_file(p.string(), run_to_gnuplot(traces, run));
    }
  }

  std::cout << "runs " << config.runs << ", rounds " << config.total_rounds
            << ", population " << config.initial_leaves << ", churn "
            << config.churn_fraction << "\n";
  std::cout << "pooled lambda2: min " << stats.pooled.min << " max " << stats.pooled.max
            << " mean " << stats.pooled.mean << " stddev " << stats.pooled.stddev << "\n";
  return kExitOk;
}

int cmd_expansion(std::uint32_t leaves, std::uint64_t seed, const std::string& dump_path) {
  const VirtualTree tree = VirtualTree::complete(leaves);
  Rng rng = make_rng(seed);
  const Pairing pairing = Pairing::uniform_random(tree, rng);
  const Graph g = contract(tree, pairing);

  const ExpansionResult res = exact_node_expansion(g);
  const SpectralReport spectral = lambda2(g);

  if (!dump_path.empty()) write_file(dump_path, g.dump_edges());

  std::cout << "vertices " << g.order() << ", edges " << g.size() << "\n";
  std::cout << "h = " << res.value.str() << " (" << res.value.to_double() << ")\n";
  std::cout << "witness:";
  for (const std::uint32_t v : res.witness) std::cout << ' ' << v;
  std::cout << "\n";
  std::cout << "lambda2 = " << spectral.lambda2 << "\n";
  return kExitOk;
}

int cmd_mixconv(std::uint32_t leaves, std::size_t rounds, std::size_t runs,
                std::uint64_t seed, const std::string& out_path) {
  const VirtualTree tree = VirtualTree::complete(leaves);
  std::ostringstream os;
  os << "run,round,lambda2,swaps\n";
  for (std::size_t run = 0; run < runs; ++run) {
    Rng rng = make_rng(run_seed(seed, run));
    Pairing pairing = Pairing::canonical(tree);
    for (std::size_t round = 1; round <= rounds; ++round) {
      const MixRoundStats stats = mix_round(tree, pairing, rng);
      const SpectralReport report = lambda2(contract(tree, pairing));
      char lambda_buf[64];
      std::snprintf(lambda_buf, sizeof(lambda_buf), "%.9g", report.lambda2);
      os << run << ',' << round << ',' << lambda_buf << ',' << stats.swaps << '\n';
    }
  }
  if (!out_path.empty()) {
    write_file(out_path, os.str());
  } else {
    std::cout << os.str();
  }
  return kExitOk;
}

int cmd_lemmas(std::size_t samples, std::uint64_t seed) {
  bool all_passed = true;
  const auto report = [&](const char* name, const SweepResult& r) {
    all_passed = all_passed && r.passed();
    std::cout << (r.passed() ? "PASS" : "FAIL") << " " << name << ": " << r.cases_checked
              << " cases, " << r.violations << " violations\n";
  };

  for (const std::uint32_t n : {4u, 8u, 16u}) {
    const std::string suffix = " (" + std::to_string(n) + " leaves)";
    report(("connected-internal boundary" + suffix).c_str(),
           sweep_connected_internal_boundary(n));
    report(("general-internal boundary" + suffix).c_str(),
           sweep_general_internal_boundary(n));
    report(("subtree boundary" + suffix).c_str(), sweep_subtree_internal_boundary(n));
  }
  for (const std::uint32_t n : {4u, 8u}) {
    const std::string suffix = " (" + std::to_string(n) + " leaves, exhaustive)";
    report(("occupied-subtree halving" + suffix).c_str(),
           sweep_occupied_halving_exhaustive(n));
  }
  Rng rng = make_rng(seed);
  report("occupied-subtree halving (16-64 leaves, randomized)",
         sweep_occupied_halving_random(16, 64, samples, rng));

  return all_passed ? kExitOk : kExitRuntime;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"treeweave: tree-overlay virtualization simulator and analyzer"};
  app.require_subcommand(1);

  // simulate
  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run churn scenarios and emit trace CSV / summary JSON");
  simulate->add_option("--leaves", sim.config.initial_leaves, "Initial leaf count (power of two)")
      ->check([](const std::string& s) -> std::string {
        try {
          if (is_power_of_two(static_cast<std::uint32_t>(std::stoul(s)))) return {};
        } catch (...) {
        }
        return "must be a power of two >= 2";
      });
  simulate->add_option("--rounds", sim.config.total_rounds, "Rounds per run")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--runs", sim.config.runs, "Number of independent runs")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--churn", sim.config.churn_fraction,
                       "Join/leave fraction per cycle, relative to the initial population")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--cycle", sim.config.cycle_length, "Rounds per phase cycle")
      ->check(CLI::Range(static_cast<std::size_t>(3), static_cast<std::size_t>(1) << 20));
  simulate->add_option("--adversary", sim.adversary, "highest_h|random|lowest_h")
      ->check(CLI::IsMember({"highest_h", "random", "lowest_h"}));
  simulate->add_option("--seed", sim.config.seed, "Master seed")->envname("TREEWEAVE_SEED");
  simulate->add_option("--jobs", sim.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out_path, "Trace CSV path");
  simulate->add_option("--summary", sim.summary_path, "Summary JSON path");
  simulate->add_flag("--gnuplot", sim.gnuplot,
                     "Also emit per-run (round, lambda2) data files next to --out");

  // expansion
  std::uint32_t exp_leaves = 8;
  std::uint64_t exp_seed = 1;
  std::string exp_dump;
  CLI::App* expansion = app.add_subcommand(
      "expansion", "Exact node expansion of one contracted graph (small sizes)");
  expansion->add_option("--leaves", exp_leaves, "Leaf count (power of two, <= 16)");
  expansion->add_option("--seed", exp_seed, "Pairing seed")->envname("TREEWEAVE_SEED");
  expansion->add_option("--dump", exp_dump, "Write the edge list to this path");

  // mixconv
  std::uint32_t mc_leaves = 512;
  std::size_t mc_rounds = 50;
  std::size_t mc_runs = 1;
  std::uint64_t mc_seed = 1;
  std::string mc_out;
  CLI::App* mixconv = app.add_subcommand(
      "mixconv", "Mixing convergence: lambda2 per round from the canonical pairing");
  mixconv->add_option("--leaves", mc_leaves, "Leaf count (power of two)");
  mixconv->add_option("--rounds", mc_rounds, "Mixing rounds")->check(CLI::PositiveNumber);
  mixconv->add_option("--runs", mc_runs, "Independent runs")->check(CLI::PositiveNumber);
  mixconv->add_option("--seed", mc_seed, "Master seed")->envname("TREEWEAVE_SEED");
  mixconv->add_option("--out", mc_out, "CSV output path (stdout when omitted)");

  // lemmas
  std::size_t lm_samples = 10000;
  std::uint64_t lm_seed = 1;
  CLI::App* lemmas = app.add_subcommand(
      "lemmas", "Run the boundary property sweeps and report pass/fail counts");
  lemmas->add_option("--samples", lm_samples, "Randomized sweep sample count")
      ->check(CLI::PositiveNumber);
  lemmas->add_option("--seed", lm_seed, "Randomized sweep seed")->envname("TREEWEAVE_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (expansion->parsed()) {
      if (!is_power_of_two(exp_leaves)) {
        std::cerr << "error: --leaves must be a power of two >= 2\n";
        return kExitUsage;
      }
      return cmd_expansion(exp_leaves, exp_seed, exp_dump);
    }
    if (mixconv->parsed()) {
      if (!is_power_of_two(mc_leaves)) {
        std::cerr << "error: --leaves must be a power of two >= 2\n";
        return kExitUsage;
      }
      return cmd_mixconv(mc_leaves, mc_rounds, mc_runs, mc_seed, mc_out);
    }
    if (lemmas->parsed()) return cmd_lemmas(lm_samples, lm_seed);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cerr << "error: no subcommand\n";
  return kExitUsage;
}

int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("treeweave");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace treeweave::cli
