#include "dlq/costmodel.h"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace dlq {

namespace {

std::string lower(const std::string& text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return t;
}

int processor_of(const std::vector<int>& assignment, std::size_t qubit) {
  if (qubit >= assignment.size() || assignment[qubit] < 0) {
    throw AllocationIncompleteError("Qubit " + std::to_string(qubit) + " has no processor");
  }
  return assignment[qubit];
}

}  // namespace

std::size_t ProcessorNetwork::total_capacity() const noexcept {
  return std::accumulate(capacities.begin(), capacities.end(), std::size_t{0});
}

Allocation Allocation::unassigned(const std::vector<CodeBlock>& blocks) {
  Allocation alloc;
  for (const auto& b : blocks) alloc.assignment.emplace_back(b.physical_count(), kUnassigned);
  return alloc;
}

int Allocation::at(std::size_t block, std::size_t qubit) const {
  if (block >= assignment.size()) throw AllocationIncompleteError("Block " + std::to_string(block) + " has no assignment");
  return processor_of(assignment[block], qubit);
}

std::string mode_name(MeasurementMode mode) {
  switch (mode) {
    case MeasurementMode::Standard: return "standard";
    case MeasurementMode::AncillaTeleport: return "teleport";
    case MeasurementMode::AncillaSwap: return "swap";
  }
  return "standard";
}

MeasurementMode parse_mode(const std::string& text) {
  const auto t = lower(text);
  if (t == "standard") return MeasurementMode::Standard;
  if (t == "teleport" || t == "ancillateleport") return MeasurementMode::AncillaTeleport;
  if (t == "swap" || t == "ancillaswap") return MeasurementMode::AncillaSwap;
  throw std::invalid_argument("Unknown measurement mode '" + text + "'");
}

std::string policy_name(CapacityPolicy policy) {
  return policy == CapacityPolicy::Strict ? "strict" : "flexible";
}

CapacityPolicy parse_policy(const std::string& text) {
  const auto t = lower(text);
  if (t == "strict") return CapacityPolicy::Strict;
  if (t == "flexible") return CapacityPolicy::Flexible;
  throw std::invalid_argument("Unknown capacity policy '" + text + "'");
}

std::string gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT: return "cx";
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::T: return "t";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

GateKind parse_gate(const std::string& text) {
  const auto t = lower(text);
  if (t == "cx" || t == "cnot") return GateKind::CNOT;
  if (t == "h") return GateKind::H;
  if (t == "s") return GateKind::S;
  if (t == "t") return GateKind::T;
  if (t == "x") return GateKind::X;
  if (t == "z") return GateKind::Z;
  if (t == "measure" || t == "m") return GateKind::Measure;
  throw std::invalid_argument("Unknown gate mnemonic '" + text + "'");
}

Cost check_cost(const Check& check, const std::vector<int>& block_assignment, MeasurementMode mode) {
  const int home = processor_of(block_assignment, check.ancilla);
  if (mode == MeasurementMode::Standard) {
    Cost crossings = 0;
    for (auto q : check.support) crossings += processor_of(block_assignment, q) != home ? 1 : 0;
    return crossings;
  }
  std::set<int> procs{home};
  for (auto q : check.support) procs.insert(processor_of(block_assignment, q));
  const Cost hops = static_cast<Cost>(procs.size()) - 1;
  return (mode == MeasurementMode::AncillaTeleport ? 2 : 3) * hops;
}

Cost check_cost(const Check& check, const Allocation& alloc, std::size_t block, MeasurementMode mode) {
  if (block >= alloc.assignment.size()) throw AllocationIncompleteError("Block " + std::to_string(block) + " has no assignment");
  return check_cost(check, alloc.assignment[block], mode);
}

Cost syndrome_round_cost(const std::vector<CodeBlock>& blocks, const Allocation& alloc, MeasurementMode mode) {
  Cost total = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& c : blocks[b].checks) total += check_cost(c, alloc, b, mode);
  }
  return total;
}

Cost transversal_cnot_cost(const CodeBlock& block_a, const CodeBlock& block_b, const Allocation& alloc,
                           std::size_t index_a, std::size_t index_b) {
  if (block_a.family != block_b.family || block_a.distance != block_b.distance || block_a.n != block_b.n) {
    throw IncompatibleBlocksError("Transversal CNOT needs blocks of the same family and distance");
  }
  Cost total = 0;
  for (std::size_t i = 0; i < block_a.n; ++i) total += alloc.at(index_a, i) != alloc.at(index_b, i) ? 1 : 0;
  return total;
}

CostReport gate_sequence_cost(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                              const Schedule& schedule, MeasurementMode mode,
                              const std::vector<LogicalGate>& gates) {
  if (schedule.rounds_per_gate < 0) throw std::invalid_argument("rounds_per_gate must be non-negative");
  CostReport report;
  std::vector<std::vector<Cost>> per_round(blocks.size());
  auto round_cost = [&](std::size_t b) -> const std::vector<Cost>& {
    if (per_round[b].empty()) {
      for (const auto& c : blocks[b].checks) per_round[b].push_back(check_cost(c, alloc, b, mode));
    }
    return per_round[b];
  };

  std::vector<std::size_t> all(blocks.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    for (auto b : gate.blocks) {
      if (b >= blocks.size()) throw std::invalid_argument("Gate references unknown block " + std::to_string(b));
    }
    Cost transversal = 0;
    switch (gate.kind) {
      case GateKind::CNOT:
        if (gate.blocks.size() != 2 || gate.blocks[0] == gate.blocks[1]) {
          throw std::invalid_argument("CNOT needs two distinct blocks");
        }
        transversal = transversal_cnot_cost(blocks[gate.blocks[0]], blocks[gate.blocks[1]], alloc, gate.blocks[0],
                                            gate.blocks[1]);
        break;
      case GateKind::H:
      case GateKind::S:
      case GateKind::X:
      case GateKind::Z:
      case GateKind::Measure:
        if (gate.blocks.size() != 1) throw std::invalid_argument("Single-block gate needs exactly one block");
        break;
      case GateKind::T:
        throw UnsupportedGateError("T is not transversal; cost it through a universality strategy");
    }
    report.pnl_transversal += transversal;

    const bool last = g + 1 == gates.size();
    if (last && !schedule.charge_trailing_round && gate.kind == GateKind::CNOT && transversal > 0) continue;
    const auto& scope = schedule.scope == ExtractionScope::AllBlocks ? all : gate.blocks;
    std::set<std::size_t> seen;
    for (auto b : scope) {
      if (!seen.insert(b).second) continue;
      const auto& costs = round_cost(b);
      for (std::size_t c = 0; c < costs.size(); ++c) {
        const Cost charged = schedule.rounds_per_gate * costs[c];
        report.pnl_syndrome += charged;
        if (charged > 0) report.per_check[{b, c}] += charged;
      }
    }
  }
  report.pnl_total = report.pnl_syndrome + report.pnl_transversal + report.pnl_movement;
  return report;
}

std::vector<std::size_t> processor_loads(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                                         std::size_t processor_count) {
  std::vector<std::size_t> loads(processor_count, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t q = 0; q < blocks[b].physical_count(); ++q) {
      const int p = alloc.at(b, q);
      if (static_cast<std::size_t>(p) >= processor_count) {
        throw AllocationIncompleteError("Qubit assigned to unknown processor " + std::to_string(p));
      }
      ++loads[static_cast<std::size_t>(p)];
    }
  }
  return loads;
}

bool respects_capacity(const std::vector<CodeBlock>& blocks, const Allocation& alloc,
                       const ProcessorNetwork& network) {
  const auto loads = processor_loads(blocks, alloc, network.size());
  for (std::size_t p = 0; p < loads.size(); ++p) {
    if (network.policy == CapacityPolicy::Strict ? loads[p] != network.capacities[p]
                                                 : loads[p] > network.capacities[p]) {
      return false;
    }
  }
  return true;
}

nlohmann::json to_json(const CostReport& report) {
  nlohmann::json doc = {{"pnl_total", report.pnl_total},
                        {"pnl_syndrome", report.pnl_syndrome},
                        {"pnl_transversal", report.pnl_transversal},
                        {"pnl_movement", report.pnl_movement}};
  doc["per_check"] = nlohmann::json::array();
  for (const auto& [key, count] : report.per_check) {
    doc["per_check"].push_back({{"block", key.first}, {"check", key.second}, {"count", count}});
  }
  return doc;
}

nlohmann::json to_json(const Allocation& alloc, const std::vector<CodeBlock>& blocks) {
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t b = 0; b < alloc.assignment.size(); ++b) {
    const std::size_t n = b < blocks.size() ? blocks[b].n : alloc.assignment[b].size();
    const auto& a = alloc.assignment[b];
    nlohmann::json entry;
    entry["block"] = b;
    if (b < blocks.size()) entry["block_id"] = blocks[b].block_id;
    entry["data"] = std::vector<int>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(n, a.size())));
    entry["ancilla"] = std::vector<int>(a.begin() + static_cast<std::ptrdiff_t>(std::min(n, a.size())), a.end());
    doc.push_back(std::move(entry));
  }
  return doc;
}

Allocation allocation_from_json(const nlohmann::json& doc) {
  Allocation alloc;
  for (const auto& entry : doc) {
    auto row = entry.at("data").get<std::vector<int>>();
    const auto anc = entry.at("ancilla").get<std::vector<int>>();
    row.insert(row.end(), anc.begin(), anc.end());
    alloc.assignment.push_back(std::move(row));
  }
  return alloc;
}

std::string format_cost_table(const CostReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "source" << std::right << std::setw(10) << "count" << "\n";
  const std::pair<const char*, Cost> rows[] = {{"syndrome", report.pnl_syndrome},
                                               {"transversal", report.pnl_transversal},
                                               {"movement", report.pnl_movement},
                                               {"total", report.pnl_total}};
  for (const auto& [name, value] : rows) out << std::left << std::setw(14) << name << std::right << std::setw(10) << value << "\n";
  return out.str();
}

}  // namespace dlq
