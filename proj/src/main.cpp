#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlq/allocator.h"
#include "dlq/codes.h"
#include "dlq/costmodel.h"
#include "dlq/partitioner.h"
#include "dlq/universality.h"

namespace {

constexpr const char* kOutDirEnv = "DLQ_OUT_DIR";

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// "7..25" (odd values only when odd_only), "3,5,9", or a single value.
std::vector<int> parse_range(const std::string& text, bool odd_only) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      if (hi < lo) throw UsageError("Empty range '" + text + "'");
      for (int v = lo; v <= hi; ++v) {
        if (!odd_only || v % 2 != 0) out.push_back(v);
      }
    } else {
      std::stringstream in(text);
      std::string item;
      while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const UsageError*>(&e)) throw;
    throw UsageError("Cannot parse range '" + text + "'");
  }
  if (out.empty()) throw UsageError("Empty range '" + text + "'");
  return out;
}

std::vector<std::size_t> parse_capacities(const std::string& text) {
  std::vector<std::size_t> caps;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      const long long v = std::stoll(item);
      if (v < 0) throw UsageError("Capacities must be non-negative");
      caps.push_back(static_cast<std::size_t>(v));
    } catch (const UsageError&) {
      throw;
    } catch (const std::logic_error&) {
      throw UsageError("Cannot parse capacity list '" + text + "'");
    }
  }
  if (caps.empty()) throw UsageError("Capacity list is empty");
  return caps;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw std::runtime_error("Cannot write '" + path.string() + "'");
  file << content;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed color-code allocation toolkit"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed");

  std::string out;
  std::string family = "488";
  int d = 7;
  std::string procs;
  std::string policy = "strict";
  std::string mode = "standard";
  double time_limit = dlq::kDefaultTimeLimit;
  std::size_t iterations = dlq::kDefaultIterations;
  bool heuristic = false;

  auto* build = app.add_subcommand("build-code", "Construct a code block and print it as JSON");
  build->add_option("--family", family, "488, 666, 4612, steane or five")->required();
  build->add_option("--d", d, "Code distance");
  build->add_option("--out", out, "Output file");

  auto* allocate = app.add_subcommand("allocate", "Allocate two colocated blocks across processors");
  std::size_t block_count = 2;
  allocate->add_option("--code", family, "Code family")->required();
  allocate->add_option("--d", d, "Code distance");
  allocate->add_option("--procs", procs, "Comma-separated processor capacities")->required();
  allocate->add_option("--policy", policy, "strict or flexible");
  allocate->add_option("--mode", mode, "standard, teleport or swap");
  allocate->add_option("--blocks", block_count, "Number of blocks (1 or 2)")->check(CLI::Range(1, 2));
  allocate->add_option("--time-limit", time_limit, "Exact solver time limit in seconds");
  allocate->add_flag("--heuristic", heuristic, "Use the annealing heuristic instead of the exact solver");
  allocate->add_option("--iterations", iterations, "Heuristic iterations per restart");
  allocate->add_option("--out", out, "Output file");

  auto* sweep = app.add_subcommand("sweep", "Two-processor local versus distributed sweep (CSV)");
  int dmin = 3, dmax = 9;
  sweep->add_option("--family", family, "Code family")->required();
  sweep->add_option("--dmin", dmin, "Smallest distance");
  sweep->add_option("--dmax", dmax, "Largest distance");
  sweep->add_option("--policy", policy, "Capacity policy (strict)");
  sweep->add_option("--time-limit", time_limit, "Exact solver time limit per distance");
  sweep->add_flag("--heuristic", heuristic, "Use the annealing heuristic");
  sweep->add_option("--out", out, "Output file");

  auto* thresholds = app.add_subcommand("thresholds", "First advantageous distance per processor count (CSV)");
  std::size_t pmin = 2, pmax = 5;
  int threshold_dmax = 25;
  double threshold_limit = 60.0;
  thresholds->add_option("--family", family, "Code family")->required();
  thresholds->add_option("--pmin", pmin, "Smallest processor count")->check(CLI::Range(2, 64));
  thresholds->add_option("--pmax", pmax, "Largest processor count")->check(CLI::Range(2, 64));
  thresholds->add_option("--dmax", threshold_dmax, "Largest distance searched");
  thresholds->add_option("--time-limit", threshold_limit, "Exact solver time limit per instance");
  thresholds->add_option("--iterations", iterations, "Heuristic iterations per restart");
  thresholds->add_option("--out", out, "Output file");

  auto* univ = app.add_subcommand("universality", "Universality strategy estimates (CSV)");
  std::string strategy = "all", d_range = "7..25", nr_range = "1..3";
  dlq::UniversalityParams params;
  double c_cut = -1.0;
  univ->add_option("--strategy", strategy, "all, msd, code-switch, gauge-fix or dynamic-swap");
  univ->add_option("--d", d_range, "Distances, e.g. 7..25 or 7,9");
  univ->add_option("--nr", nr_range, "Distillation rounds, e.g. 1..3");
  univ->add_option("--mode", mode, "standard, teleport or swap");
  univ->add_option("--nt", params.n_T, "Number of T gates");
  univ->add_option("--c-cut", c_cut, "Per-round cut cost (default from the allocator)");
  univ->add_option("--beta", params.beta, "Cut 3D checks per d^2");
  univ->add_option("--gamma", params.gamma, "3D block size per d^3");
  univ->add_option("--avg-cut-weight", params.avg_cut_weight_3d, "Average cut 3D check weight");
  univ->add_option("--msd-rounds", params.msd_rounds, "Extraction rounds per distillation invocation");
  univ->add_option("--rounds-3d", params.rounds_3d, "Extraction rounds while the 3D block is active");
  univ->add_flag("--all-levels", params.count_all_levels, "Count invocations over every distillation level");
  univ->add_option("--out", out, "Output file");

  auto* part = app.add_subcommand("partition", "Partition a logical circuit across processors (JSON)");
  std::string circuit_path, layout = "auto", refine_procs;
  std::size_t max_groups = 0;
  int rounds = 1;
  double tolerance = std::numeric_limits<double>::infinity();
  part->add_option("--circuit", circuit_path, "Circuit file")->required();
  part->add_option("--procs", procs, "Comma-separated processor capacities")->required();
  part->add_option("--code", family, "Code family");
  part->add_option("--d", d, "Code distance");
  part->add_option("--mode", mode, "standard, teleport or swap");
  part->add_option("--layout", layout, "auto, local or distributed");
  part->add_option("--max-groups", max_groups, "Largest group count (0 = processor count)");
  part->add_option("--refine-procs", refine_procs, "Refine the plan onto these smaller processors");
  part->add_option("--rounds", rounds, "Refinement rounds");
  part->add_option("--tolerance", tolerance, "Largest relative cost increase accepted per refinement round");
  part->add_option("--out", out, "Output file");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite on constructed codes");
  int verify_dmax = 13;
  verify->add_option("--dmax", verify_dmax, "Largest distance checked");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*build) {
      auto block = dlq::build_code(dlq::parse_family(family), d);
      block.block_id = dlq::family_name(block.family) + "-d" + std::to_string(block.distance);
      emit(out, dump(dlq::to_json(block)));
    } else if (*allocate) {
      dlq::AllocationProblem problem;
      const auto fam = dlq::parse_family(family);
      for (std::size_t b = 0; b < block_count; ++b) {
        auto block = dlq::build_code(fam, d);
        block.block_id = std::string(1, static_cast<char>('A' + b));
        problem.blocks.push_back(block);
      }
      problem.network = {parse_capacities(procs), dlq::parse_policy(policy)};
      problem.mode = dlq::parse_mode(mode);
      const auto result = heuristic ? dlq::solve_heuristic(problem, seed, iterations)
                                    : dlq::solve_exact(problem, time_limit, seed);
      auto doc = dlq::to_json(result, problem);
      doc["code"] = {{"family", dlq::family_name(fam)}, {"d", problem.blocks[0].distance}};
      doc["local_baseline"] = problem.blocks.size() == 2 ? problem.blocks[0].n : 0;
      emit(out, dump(doc));
      std::cerr << dlq::format_cost_table(result.cost);
    } else if (*sweep) {
      if (dlq::parse_policy(policy) != dlq::CapacityPolicy::Strict) {
        throw UsageError("The two-processor sweep uses strict equal capacities");
      }
      std::vector<int> ds;
      for (int v = dmin; v <= dmax; ++v) {
        if (v % 2 != 0 && v >= 3) ds.push_back(v);
      }
      if (ds.empty()) throw UsageError("No odd distance in the requested range");
      dlq::SweepOptions opts;
      opts.time_limit = time_limit;
      opts.seed = seed;
      opts.threads = threads;
      opts.exact = !heuristic;
      emit(out, dlq::sweep_csv(dlq::sweep_two_processor(dlq::parse_family(family), ds, opts)));
    } else if (*thresholds) {
      if (pmax < pmin) throw UsageError("--pmax must be at least --pmin");
      dlq::ThresholdOptions opts;
      opts.d_max = threshold_dmax;
      opts.time_limit = threshold_limit;
      opts.seed = seed;
      opts.iterations = iterations;
      std::vector<dlq::ThresholdRow> rows;
      for (std::size_t p = pmin; p <= pmax; ++p) {
        rows.push_back(dlq::multi_processor_threshold(dlq::parse_family(family), p, opts));
      }
      emit(out, dlq::threshold_csv(rows));
    } else if (*univ) {
      params.mode = dlq::parse_mode(mode);
      if (c_cut >= 0) params.c_cut = c_cut;
      const auto rows = dlq::universality_table(strategy, parse_range(d_range, true), parse_range(nr_range, false), params);
      emit(out, dlq::universality_csv(rows));
      if (strategy == "all" || strategy == "code-switch") {
        const auto ds = parse_range(d_range, true);
        const int dstar = dlq::code_switch_crossover(params, ds.front(), ds.back());
        std::cerr << "code-switch crossover d* (" << dlq::mode_name(params.mode) << "): "
                  << (dstar ? std::to_string(dstar) : std::string("none")) << "\n";
      }
    } else if (*part) {
      const auto circuit = dlq::load_circuit(circuit_path);
      const dlq::ProcessorNetwork network{parse_capacities(procs), dlq::CapacityPolicy::Flexible};
      dlq::PartitionOptions opts;
      opts.max_groups = max_groups;
      opts.seed = seed;
      opts.mode = dlq::parse_mode(mode);
      if (layout == "auto") {
        opts.layout = dlq::LayoutPreference::Auto;
      } else if (layout == "local") {
        opts.layout = dlq::LayoutPreference::ForceLocal;
      } else if (layout == "distributed") {
        opts.layout = dlq::LayoutPreference::ForceDistributed;
      } else {
        throw UsageError("Unknown layout '" + layout + "'");
      }
      auto plan = dlq::partition(circuit, network, dlq::parse_family(family), d, opts);
      nlohmann::json doc;
      if (!refine_procs.empty()) {
        const dlq::ProcessorNetwork target{parse_capacities(refine_procs), dlq::CapacityPolicy::Flexible};
        const auto refined = dlq::iterative_refine(plan, circuit, target, rounds, tolerance, opts);
        doc = dlq::to_json(refined.plan);
        doc["refinement"] = {{"cost_before", refined.cost_before},
                             {"cost_after", refined.cost_after},
                             {"increase", refined.increase},
                             {"rounds_applied", refined.rounds_applied},
                             {"stopped_by_tolerance", refined.stopped_by_tolerance}};
      } else {
        doc = dlq::to_json(plan);
      }
      emit(out, dump(doc));
    } else if (*verify) {
      int failures = 0;
      auto report = [&](const dlq::CodeBlock& block) {
        const auto rep = dlq::check_invariants(block);
        std::cout << dlq::family_name(block.family) << " d=" << block.distance << " n=" << block.n
                  << " checks=" << block.checks.size() << " k=" << rep.logical_qubits << " "
                  << (rep.ok() ? "ok" : "FAIL");
        for (const auto& v : rep.violations) std::cout << " [" << v << "]";
        if (rep.ok() && block.n <= dlq::kMaxDistanceCheckQubits) {
          const int dist = dlq::verify_distance(block);
          std::cout << " distance=" << dist;
          if (dist != block.distance) {
            std::cout << " FAIL";
            ++failures;
          }
        }
        std::cout << "\n";
        if (!rep.ok()) ++failures;
      };
      for (auto fam : {dlq::CodeFamily::Hex488, dlq::CodeFamily::Hex666, dlq::CodeFamily::Hex4612}) {
        for (int dd = 3; dd <= verify_dmax; dd += 2) report(dlq::build_code(fam, dd));
      }
      report(dlq::build_code(dlq::CodeFamily::Steane, 3));
      report(dlq::build_code(dlq::CodeFamily::FiveQubitPerfect, 3));
      std::cout << (failures ? "FAILED" : "all invariants hold") << "\n";
      return failures ? 1 : 0;
    }
  } catch (const dlq::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
