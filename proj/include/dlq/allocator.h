#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlq/codes.h"
#include "dlq/costmodel.h"

namespace dlq {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AllocationProblem {
  std::vector<CodeBlock> blocks;
  ProcessorNetwork network;
  Schedule schedule;
  MeasurementMode mode = MeasurementMode::Standard;
  // Empty means one CNOT between blocks 0 and 1, or one extraction round for a single block.
  std::vector<LogicalGate> gates;
  // Unset means (0,1) for two-block problems and nothing otherwise.
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> colocate_pairs;

  std::vector<LogicalGate> effective_gates() const;
  std::vector<std::pair<std::size_t, std::size_t>> effective_colocation() const;
};

enum class Optimality { ProvenOptimal, BestFound };

struct SolverStats {
  std::uint64_t nodes = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct SolveResult {
  Allocation allocation;
  CostReport cost;
  Optimality optimality = Optimality::BestFound;
  SolverStats stats;
};

constexpr double kDefaultTimeLimit = 300.0;
constexpr std::size_t kDefaultIterations = 20000;

std::string optimality_name(Optimality optimality);

// Throws std::invalid_argument or InfeasibleError when the problem cannot be allocated.
void validate_problem(const AllocationProblem& problem);

// Branch and bound over data qubits with optimal ancilla placement at the leaves.
// Ties are broken toward the lexicographically smallest vector (data units in block order,
// then ancillas in block order).
SolveResult solve_exact(const AllocationProblem& problem, double time_limit = kDefaultTimeLimit,
                        std::uint64_t seed = 0);

// Straight-cut seeding followed by simulated annealing.
SolveResult solve_heuristic(const AllocationProblem& problem, std::uint64_t seed = 0,
                            std::size_t iterations = kDefaultIterations);

// Two colocated blocks of one family on p processors with near-equal strict capacities.
AllocationProblem split_problem(CodeFamily family, int d, std::size_t processors,
                                MeasurementMode mode = MeasurementMode::Standard);

struct SweepRow {
  CodeFamily family = CodeFamily::Hex488;
  int d = 3;
  Cost local_pnl = 0;
  Cost distributed_pnl = 0;
  Optimality optimality = Optimality::BestFound;
};

struct SweepOptions {
  double time_limit = kDefaultTimeLimit;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool exact = true;
};

std::vector<SweepRow> sweep_two_processor(CodeFamily family, const std::vector<int>& d_list,
                                          const SweepOptions& options = {});
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct ThresholdRow {
  CodeFamily family = CodeFamily::Hex488;
  std::size_t processors = 2;
  int threshold = 0;  // 0 when no advantage up to d_max
  Cost distributed_pnl = 0;
  Cost local_pnl = 0;
  Optimality optimality = Optimality::BestFound;
};

struct ThresholdOptions {
  int d_max = 25;
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  std::size_t iterations = kDefaultIterations;
  // Largest physical-qubit total for which the exact solver is attempted.
  std::size_t exact_qubit_limit = 130;
};

// Smallest odd d whose distributed per-gate cost beats the local transversal baseline n(d).
ThresholdRow multi_processor_threshold(CodeFamily family, std::size_t processors,
                                       const ThresholdOptions& options = {});
std::string threshold_csv(const std::vector<ThresholdRow>& rows);

nlohmann::json to_json(const SolveResult& result, const AllocationProblem& problem);

}  // namespace dlq
