#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlq/allocator.h"
#include "dlq/codes.h"
#include "dlq/costmodel.h"
#include "json.hpp"

namespace dlq {

class CircuitParseError : public std::invalid_argument {
 public:
  CircuitParseError(std::size_t line, const std::string& message)
      : std::invalid_argument("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct CircuitGate {
  GateKind kind = GateKind::CNOT;
  std::vector<std::size_t> operands;
  std::size_t line = 0;
};

struct LogicalCircuit {
  std::vector<std::string> qubits;
  std::vector<CircuitGate> gates;

  std::size_t cnot_count() const;
  std::size_t t_count() const;
};

// One gate per line: mnemonic then qubit names; '#' starts a comment. An optional
// "qubits a b c" line declares the register; without it qubits are declared on first use.
LogicalCircuit parse_circuit(const std::string& text);
LogicalCircuit load_circuit(const std::string& path);

struct InteractionGraph {
  std::size_t vertices = 0;
  std::map<std::pair<std::size_t, std::size_t>, Cost> weights;  // key has first < second

  Cost weight(std::size_t a, std::size_t b) const;
  Cost total_weight() const;
  // group[q] is the group label of qubit q.
  Cost cut_weight(const std::vector<std::size_t>& group) const;
};

InteractionGraph build_interaction_graph(const LogicalCircuit& circuit);

enum class LayoutKind { Local, Distributed };

struct GroupLayout {
  LayoutKind kind = LayoutKind::Local;
  std::vector<std::size_t> processors;
  std::vector<std::size_t> qubits;
};

struct Diagnostics {
  double intra_gate_fraction = 0.0;
  std::size_t cut_gate_count = 0;
  Cost quadratic_cost_share = 0;
  Cost linear_cost_share = 0;
  double ratio = 0.0;  // linear / quadratic; infinity when quadratic is 0 and linear is not
  bool balanced = false;
};

struct PartitionPlan {
  CodeFamily family = CodeFamily::Hex488;
  int d = 7;
  MeasurementMode mode = MeasurementMode::Standard;
  ProcessorNetwork network;
  std::vector<std::string> qubit_names;
  std::vector<std::size_t> groups;  // logical qubit -> group
  std::vector<GroupLayout> layouts;
  Allocation allocation;            // one block per logical qubit
  CostReport predicted_cost;
  Cost t_gate_pnl = 0;
  Diagnostics diagnostics;

  Cost total_pnl() const noexcept { return predicted_cost.pnl_total + t_gate_pnl; }
};

enum class LayoutPreference { Auto, ForceLocal, ForceDistributed };

struct PartitionOptions {
  std::size_t max_groups = 0;  // 0 means the processor count
  std::uint64_t seed = 0;
  LayoutPreference layout = LayoutPreference::Auto;
  MeasurementMode mode = MeasurementMode::Standard;
  double time_limit = 60.0;
};

// Circuit-level schedule: one round after each gate on the blocks it touches, with the
// round after a final cross-processor CNOT left uncharged.
Schedule circuit_schedule();

// Cost of a plan recomputed from its explicit allocation.
CostReport evaluate_plan(const PartitionPlan& plan, const LogicalCircuit& circuit);

PartitionPlan partition(const LogicalCircuit& circuit, const ProcessorNetwork& network, CodeFamily family, int d,
                        const PartitionOptions& options = {});

struct RefineResult {
  PartitionPlan plan;
  Cost cost_before = 0;
  Cost cost_after = 0;
  Cost increase = 0;
  std::size_t rounds_applied = 0;
  bool stopped_by_tolerance = false;
};

// Subdivides groups that do not fit the target processors; tolerance is the largest
// accepted relative cost increase per round.
RefineResult iterative_refine(const PartitionPlan& plan, const LogicalCircuit& circuit,
                              const ProcessorNetwork& target, int rounds,
                              double tolerance = std::numeric_limits<double>::infinity(),
                              const PartitionOptions& options = {});

Diagnostics balance_diagnostic(const PartitionPlan& plan, const LogicalCircuit& circuit);

nlohmann::json to_json(const PartitionPlan& plan);

}  // namespace dlq
