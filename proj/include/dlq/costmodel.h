#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlq/codes.h"
#include "json.hpp"

namespace dlq {

using Cost = std::int64_t;

enum class CapacityPolicy { Strict, Flexible };

struct ProcessorNetwork {
  std::vector<std::size_t> capacities;
  CapacityPolicy policy = CapacityPolicy::Strict;

  std::size_t size() const noexcept { return capacities.size(); }
  std::size_t total_capacity() const noexcept;
};

enum class MeasurementMode { Standard, AncillaTeleport, AncillaSwap };

enum class ExtractionScope { AllBlocks, InvolvedBlocks };

struct Schedule {
  int rounds_per_gate = 1;
  ExtractionScope scope = ExtractionScope::AllBlocks;
  // When false, the round after a final transversal CNOT that crosses processors is skipped.
  bool charge_trailing_round = true;
};

enum class GateKind { CNOT, H, S, T, X, Z, Measure };

struct LogicalGate {
  GateKind kind = GateKind::CNOT;
  std::vector<std::size_t> blocks;  // block indices the gate acts on
};

constexpr int kUnassigned = -1;

// assignment[b][q] is the processor of physical qubit q of block b (data first, then ancillas).
struct Allocation {
  std::vector<std::vector<int>> assignment;

  static Allocation unassigned(const std::vector<CodeBlock>& blocks);
  int at(std::size_t block, std::size_t qubit) const;
  bool operator==(const Allocation&) const = default;
};

class AllocationIncompleteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IncompatibleBlocksError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedGateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CostReport {
  Cost pnl_total = 0;
  Cost pnl_syndrome = 0;
  Cost pnl_transversal = 0;
  Cost pnl_movement = 0;
  std::map<std::pair<std::size_t, std::size_t>, Cost> per_check;  // (block, check) -> count

  bool consistent() const noexcept { return pnl_total == pnl_syndrome + pnl_transversal + pnl_movement; }
};

std::string mode_name(MeasurementMode mode);
MeasurementMode parse_mode(const std::string& text);
std::string policy_name(CapacityPolicy policy);
CapacityPolicy parse_policy(const std::string& text);
std::string gate_name(GateKind kind);
GateKind parse_gate(const std::string& text);

// Cost of one measurement of a check given the processors of the block's physical qubits.
Cost check_cost(const Check& check, const std::vector<int>& block_assignment, MeasurementMode mode);
Cost check_cost(const Check& check, const Allocation& alloc, std::size_t block, MeasurementMode mode);

Cost syndrome_round_cost(const std::vector<CodeBlock>& blocks, const Allocation& alloc, MeasurementMode mode);

Cost transversal_cnot_cost(const CodeBlock& block_a, const CodeBlock& block_b, const Allocation& alloc,
                           std::size_t index_a = 0, std::size_t index_b = 1);

CostReport gate_sequence_cost(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                              const Schedule& schedule, MeasurementMode mode,
                              const std::vector<LogicalGate>& gates);

// Per-processor qubit counts; throws AllocationIncompleteError on unassigned or unknown processors.
std::vector<std::size_t> processor_loads(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                                         std::size_t processor_count);

bool respects_capacity(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                       const ProcessorNetwork& network);

nlohmann::json to_json(const CostReport& report);
nlohmann::json to_json(const Allocation& alloc, const std::vector<CodeBlock>& blocks);
Allocation allocation_from_json(const nlohmann::json& doc);

// Fixed-column "source count" table.
std::string format_cost_table(const CostReport& report);

}  // namespace dlq
