#include "dlq/partitioner.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dlq/universality.h"

namespace dlq {

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::vector<LogicalGate> costmodel_gates(const LogicalCircuit& circuit) {
  std::vector<LogicalGate> gates;
  gates.reserve(circuit.gates.size());
  for (const auto& g : circuit.gates) {
    // T is charged through the universality estimate; its extraction round is kept.
    const GateKind kind = g.kind == GateKind::T ? GateKind::Z : g.kind;
    gates.push_back({kind, g.operands});
  }
  return gates;
}

std::vector<CodeBlock> plan_blocks(const PartitionPlan& plan) {
  const auto code = build_code(plan.family, plan.d);
  std::vector<CodeBlock> blocks(plan.qubit_names.size(), code);
  for (std::size_t q = 0; q < blocks.size(); ++q) blocks[q].block_id = plan.qubit_names[q];
  return blocks;
}

// Undirected weighted graph with vertex weights, used at every coarsening level.
struct WGraph {
  std::vector<Cost> vw;
  std::vector<std::map<std::size_t, Cost>> adj;
  std::size_t size() const noexcept { return vw.size(); }
};

void refine(const WGraph& g, std::vector<std::size_t>& part, std::size_t k, Cost max_part) {
  std::vector<Cost> load(k, 0);
  for (std::size_t v = 0; v < g.size(); ++v) load[part[v]] += g.vw[v];
  for (int pass = 0; pass < 8; ++pass) {
    bool improved = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      std::vector<Cost> conn(k, 0);
      for (const auto& [u, w] : g.adj[v]) conn[part[u]] += w;
      const auto own = part[v];
      std::size_t target = own;
      Cost best_gain = 0;
      for (std::size_t t = 0; t < k; ++t) {
        if (t == own || load[t] + g.vw[v] > max_part) continue;
        const Cost gain = conn[t] - conn[own];
        if (gain > best_gain) {
          best_gain = gain;
          target = t;
        }
      }
      if (target != own) {
        load[own] -= g.vw[v];
        load[target] += g.vw[v];
        part[v] = target;
        improved = true;
      }
    }
    if (!improved) break;
  }
}

// Heavy-edge coarsening, greedy initial assignment, gain refinement while projecting back.
std::vector<std::size_t> multilevel_partition(const WGraph& fine, std::size_t k, Cost max_part, std::mt19937_64& rng) {
  std::vector<WGraph> levels{fine};
  std::vector<std::vector<std::size_t>> maps;
  while (levels.back().size() > 2 * k) {
    const WGraph& cur = levels.back();
    std::vector<std::size_t> order(cur.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<long long> match(cur.size(), -1);
    bool any = false;
    for (auto v : order) {
      if (match[v] >= 0) continue;
      long long best = -1;
      Cost best_w = 0;
      for (const auto& [u, w] : cur.adj[v]) {
        if (match[u] >= 0 || u == v || cur.vw[u] + cur.vw[v] > max_part) continue;
        if (w > best_w) {
          best_w = w;
          best = static_cast<long long>(u);
        }
      }
      if (best >= 0) {
        match[v] = best;
        match[static_cast<std::size_t>(best)] = static_cast<long long>(v);
        any = true;
      } else {
        match[v] = static_cast<long long>(v);
      }
    }
    if (!any) break;
    std::vector<std::size_t> map(cur.size(), 0);
    WGraph next;
    for (std::size_t v = 0; v < cur.size(); ++v) {
      const auto m = static_cast<std::size_t>(match[v]);
      if (m < v) {
        map[v] = map[m];
        continue;
      }
      map[v] = next.vw.size();
      next.vw.push_back(cur.vw[v] + (m != v ? cur.vw[m] : 0));
    }
    next.adj.resize(next.vw.size());
    for (std::size_t v = 0; v < cur.size(); ++v) {
      for (const auto& [u, w] : cur.adj[v]) {
        if (map[u] != map[v]) next.adj[map[v]][map[u]] += w;
      }
    }
    maps.push_back(std::move(map));
    levels.push_back(std::move(next));
  }

  const WGraph& coarse = levels.back();
  std::vector<std::size_t> order(coarse.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coarse.vw[a] > coarse.vw[b]; });
  std::vector<std::size_t> part(coarse.size(), 0);
  std::vector<bool> placed(coarse.size(), false);
  std::vector<Cost> load(k, 0);
  for (auto v : order) {
    long long choice = -1;
    Cost best_conn = -1;
    for (std::size_t t = 0; t < k; ++t) {
      if (load[t] + coarse.vw[v] > max_part) continue;
      Cost conn = 0;
      for (const auto& [u, w] : coarse.adj[v]) conn += placed[u] && part[u] == t ? w : 0;
      if (conn > best_conn || (conn == best_conn && load[t] < load[static_cast<std::size_t>(choice)])) {
        best_conn = conn;
        choice = static_cast<long long>(t);
      }
    }
    if (choice < 0) return {};
    part[v] = static_cast<std::size_t>(choice);
    placed[v] = true;
    load[part[v]] += coarse.vw[v];
  }
  refine(coarse, part, k, max_part);
  for (std::size_t level = maps.size(); level-- > 0;) {
    std::vector<std::size_t> finer(maps[level].size());
    for (std::size_t v = 0; v < finer.size(); ++v) finer[v] = part[maps[level][v]];
    part = std::move(finer);
    refine(levels[level], part, k, max_part);
  }
  return part;
}

// Builds plans from groupings and caches the distributed allocations they need.
class Planner {
 public:
  Planner(const LogicalCircuit& circuit, const ProcessorNetwork& network, CodeFamily family, int d,
          const PartitionOptions& options)
      : circuit_(circuit), network_(network), family_(family), d_(d), options_(options),
        code_(build_code(family, d)), gates_(costmodel_gates(circuit)) {
    blocks_.assign(circuit.qubits.size(), code_);
    for (std::size_t q = 0; q < blocks_.size(); ++q) blocks_[q].block_id = circuit.qubits[q];
  }

  std::size_t block_size() const noexcept { return code_.physical_count(); }

  // Each group gets its own processors. Returns false (recording the failing group) when they run out.
  bool place(const std::vector<std::vector<std::size_t>>& groups, LayoutPreference pref, PartitionPlan& out,
             bool all_processors = false) {
    const std::size_t phys = block_size();
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return groups[a].size() > groups[b].size(); });
    std::vector<bool> used(network_.size(), false);
    std::vector<GroupLayout> layouts(groups.size());
    for (auto gi : order) {
      const auto& g = groups[gi];
      const std::size_t need = g.size() * phys;
      long long local = -1;
      for (std::size_t q = 0; q < network_.size(); ++q) {
        if (used[q] || network_.capacities[q] < need) continue;
        if (local < 0 || network_.capacities[q] < network_.capacities[static_cast<std::size_t>(local)]) {
          local = static_cast<long long>(q);
        }
      }
      const bool want_local = pref == LayoutPreference::ForceLocal || (pref == LayoutPreference::Auto && local >= 0);
      GroupLayout layout;
      layout.qubits = g;
      if (want_local) {
        if (local < 0) return fail(g, need);
        layout.kind = LayoutKind::Local;
        layout.processors = {static_cast<std::size_t>(local)};
        used[static_cast<std::size_t>(local)] = true;
      } else {
        std::vector<std::size_t> free;
        for (std::size_t q = 0; q < network_.size(); ++q) {
          if (!used[q]) free.push_back(q);
        }
        std::stable_sort(free.begin(), free.end(),
                         [&](std::size_t a, std::size_t b) { return network_.capacities[a] > network_.capacities[b]; });
        std::vector<std::size_t> chosen;
        std::size_t room = 0;
        for (auto q : free) {
          if (!all_processors && room >= need && chosen.size() >= 2) break;
          chosen.push_back(q);
          room += network_.capacities[q];
        }
        if (room < need || chosen.size() < 2) return fail(g, need);
        std::sort(chosen.begin(), chosen.end());
        for (auto q : chosen) used[q] = true;
        layout.kind = LayoutKind::Distributed;
        layout.processors = chosen;
      }
      layouts[gi] = std::move(layout);
    }
    out = PartitionPlan{};
    out.family = family_;
    out.d = d_;
    out.mode = options_.mode;
    out.network = network_;
    out.qubit_names = circuit_.qubits;
    out.groups.assign(circuit_.qubits.size(), 0);
    out.allocation = Allocation::unassigned(blocks_);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      for (auto q : groups[gi]) out.groups[q] = gi;
      const auto& layout = layouts[gi];
      if (layout.kind == LayoutKind::Local) {
        for (auto q : layout.qubits) {
          std::fill(out.allocation.assignment[q].begin(), out.allocation.assignment[q].end(),
                    static_cast<int>(layout.processors[0]));
        }
      } else {
        const auto& sub = distributed(layout.qubits.size(), layout.processors);
        for (std::size_t j = 0; j < layout.qubits.size(); ++j) {
          auto& row = out.allocation.assignment[layout.qubits[j]];
          for (std::size_t k = 0; k < row.size(); ++k) {
            row[k] = static_cast<int>(layout.processors[static_cast<std::size_t>(sub.assignment[j][k])]);
          }
        }
      }
    }
    out.layouts = std::move(layouts);
    out.predicted_cost = gate_sequence_cost(blocks_, out.allocation, circuit_schedule(), options_.mode, gates_);
    out.t_gate_pnl = t_cost();
    out.diagnostics = balance_diagnostic(out, circuit_);
    return true;
  }

  // T gates use the local code-switching block: a transversal CNOT in and out per T.
  Cost t_cost() const {
    UniversalityParams params;
    params.d = d_ < 5 ? 5 : d_;
    params.n_T = static_cast<std::int64_t>(circuit_.t_count());
    params.n_data = static_cast<double>(code_.n);
    return static_cast<Cost>(std::llround(code_switch_estimate(params)[0].pnl_total));
  }

  const std::vector<std::size_t>& failed_group() const noexcept { return failed_; }
  std::size_t failed_need() const noexcept { return failed_need_; }

 private:
  bool fail(const std::vector<std::size_t>& g, std::size_t need) {
    if (failed_.empty() || need < failed_need_) {
      failed_ = g;
      failed_need_ = need;
    }
    return false;
  }

  const Allocation& distributed(std::size_t count, const std::vector<std::size_t>& procs) {
    std::vector<std::size_t> caps;
    for (auto q : procs) caps.push_back(network_.capacities[q]);
    const auto key = std::make_pair(count, caps);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    AllocationProblem problem;
    for (std::size_t j = 0; j < count; ++j) problem.blocks.push_back(code_);
    problem.network = {caps, CapacityPolicy::Flexible};
    problem.mode = options_.mode;
    problem.gates = {LogicalGate{GateKind::H, {0}}};
    problem.schedule.scope = ExtractionScope::AllBlocks;
    std::vector<std::pair<std::size_t, std::size_t>> chain;
    for (std::size_t j = 1; j < count; ++j) chain.emplace_back(j - 1, j);
    problem.colocate_pairs = chain;
    const std::size_t total = count * code_.physical_count();
    const auto result = procs.size() == 2 && total <= 130 ? solve_exact(problem, options_.time_limit, options_.seed)
                                                         : solve_heuristic(problem, options_.seed, 5000);
    return cache_.emplace(key, result.allocation).first->second;
  }

  const LogicalCircuit& circuit_;
  ProcessorNetwork network_;
  CodeFamily family_;
  int d_;
  PartitionOptions options_;
  CodeBlock code_;
  std::vector<CodeBlock> blocks_;
  std::vector<LogicalGate> gates_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, Allocation> cache_;
  std::vector<std::size_t> failed_;
  std::size_t failed_need_ = 0;
};

// Qubits ordered by first use, so renaming the register does not change the search.
std::vector<std::size_t> canonical_order(const LogicalCircuit& circuit) {
  std::vector<std::size_t> order;
  std::vector<bool> seen(circuit.qubits.size(), false);
  for (const auto& g : circuit.gates) {
    for (auto q : g.operands) {
      if (!seen[q]) {
        seen[q] = true;
        order.push_back(q);
      }
    }
  }
  for (std::size_t q = 0; q < circuit.qubits.size(); ++q) {
    if (!seen[q]) order.push_back(q);
  }
  return order;
}

bool better_plan(const PartitionPlan& a, const PartitionPlan& b) {
  if (a.total_pnl() != b.total_pnl()) return a.total_pnl() < b.total_pnl();
  return a.layouts.size() < b.layouts.size();
}

std::vector<std::vector<std::size_t>> to_groups(const std::vector<std::size_t>& part,
                                                const std::vector<std::size_t>& order) {
  std::map<std::size_t, std::size_t> relabel;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < part.size(); ++i) {
    auto it = relabel.find(part[i]);
    if (it == relabel.end()) {
      it = relabel.emplace(part[i], groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(order[i]);
  }
  return groups;
}

// Interaction graph restricted to subset, with vertex i standing for subset[i].
WGraph subgraph(const LogicalCircuit& circuit, const std::vector<std::size_t>& subset) {
  std::vector<long long> pos(circuit.qubits.size(), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) pos[subset[i]] = static_cast<long long>(i);
  WGraph g;
  g.vw.assign(subset.size(), 1);
  g.adj.resize(subset.size());
  const auto graph = build_interaction_graph(circuit);
  for (const auto& [key, w] : graph.weights) {
    const auto a = pos[key.first], b = pos[key.second];
    if (a < 0 || b < 0) continue;
    g.adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += w;
    g.adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] += w;
  }
  return g;
}

}  // namespace

std::size_t LogicalCircuit::cnot_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const CircuitGate& g) { return g.kind == GateKind::CNOT; }));
}

std::size_t LogicalCircuit::t_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const CircuitGate& g) { return g.kind == GateKind::T; }));
}

LogicalCircuit parse_circuit(const std::string& text) {
  LogicalCircuit circuit;
  std::map<std::string, std::size_t> index;
  bool declared = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const auto words = split_words(raw);
    if (words.empty()) continue;
    if (words[0] == "qubits" || words[0] == "qreg") {
      if (!circuit.gates.empty()) throw CircuitParseError(line_no, "qubit declarations must precede gates");
      declared = true;
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (index.count(words[i])) throw CircuitParseError(line_no, "qubit '" + words[i] + "' declared twice");
        index[words[i]] = circuit.qubits.size();
        circuit.qubits.push_back(words[i]);
      }
      continue;
    }
    CircuitGate gate;
    gate.line = line_no;
    try {
      gate.kind = parse_gate(words[0]);
    } catch (const std::invalid_argument&) {
      throw CircuitParseError(line_no, "unknown mnemonic '" + words[0] + "'");
    }
    const std::size_t arity = gate.kind == GateKind::CNOT ? 2 : 1;
    if (words.size() - 1 != arity) {
      throw CircuitParseError(line_no, "'" + words[0] + "' expects " + std::to_string(arity) + " operand(s), got " +
                                           std::to_string(words.size() - 1));
    }
    for (std::size_t i = 1; i < words.size(); ++i) {
      auto it = index.find(words[i]);
      if (it == index.end()) {
        if (declared) throw CircuitParseError(line_no, "undeclared qubit '" + words[i] + "'");
        it = index.emplace(words[i], circuit.qubits.size()).first;
        circuit.qubits.push_back(words[i]);
      }
      gate.operands.push_back(it->second);
    }
    if (arity == 2 && gate.operands[0] == gate.operands[1]) {
      throw CircuitParseError(line_no, "CNOT operands must be distinct");
    }
    circuit.gates.push_back(std::move(gate));
  }
  return circuit;
}

LogicalCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("Cannot open circuit file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_circuit(buffer.str());
}

Cost InteractionGraph::weight(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  auto it = weights.find({a, b});
  return it == weights.end() ? 0 : it->second;
}

Cost InteractionGraph::total_weight() const {
  Cost total = 0;
  for (const auto& [key, w] : weights) total += w;
  return total;
}

Cost InteractionGraph::cut_weight(const std::vector<std::size_t>& group) const {
  Cost total = 0;
  for (const auto& [key, w] : weights) total += group.at(key.first) != group.at(key.second) ? w : 0;
  return total;
}

InteractionGraph build_interaction_graph(const LogicalCircuit& circuit) {
  InteractionGraph graph;
  graph.vertices = circuit.qubits.size();
  for (const auto& g : circuit.gates) {
    if (g.kind != GateKind::CNOT) continue;
    auto a = g.operands[0], b = g.operands[1];
    if (a > b) std::swap(a, b);
    graph.weights[{a, b}] += 1;
  }
  return graph;
}

Schedule circuit_schedule() {
  Schedule s;
  s.rounds_per_gate = 1;
  s.scope = ExtractionScope::InvolvedBlocks;
  s.charge_trailing_round = false;
  return s;
}

CostReport evaluate_plan(const PartitionPlan& plan, const LogicalCircuit& circuit) {
  return gate_sequence_cost(plan_blocks(plan), plan.allocation, circuit_schedule(), plan.mode,
                            costmodel_gates(circuit));
}

PartitionPlan partition(const LogicalCircuit& circuit, const ProcessorNetwork& network, CodeFamily family, int d,
                        const PartitionOptions& options) {
  if (network.size() == 0) throw std::invalid_argument("Processor network is empty");
  Planner planner(circuit, network, family, d, options);
  const std::size_t N = circuit.qubits.size();
  PartitionPlan best;
  bool have = false;
  auto consider = [&](const std::vector<std::vector<std::size_t>>& groups, LayoutPreference pref, bool all = false) {
    PartitionPlan plan;
    if (!planner.place(groups, pref, plan, all)) return;
    if (!have || better_plan(plan, best)) {
      best = std::move(plan);
      have = true;
    }
  };
  if (N == 0) {
    consider({}, LayoutPreference::Auto);
    return best;
  }

  const auto order = canonical_order(circuit);
  const bool local_ok = options.layout != LayoutPreference::ForceDistributed;
  const bool dist_ok = options.layout != LayoutPreference::ForceLocal;

  // All-local packing in first-use order.
  if (local_ok) {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t next = 0;
    for (std::size_t q = 0; q < network.size() && next < N; ++q) {
      const std::size_t fit = network.capacities[q] / planner.block_size();
      if (fit == 0) continue;
      groups.emplace_back();
      for (std::size_t j = 0; j < fit && next < N; ++j) groups.back().push_back(order[next++]);
    }
    if (next == N) consider(groups, LayoutPreference::ForceLocal);
  }
  // Everything in one group spread over every processor.
  if (dist_ok && network.size() >= 2) consider({order}, LayoutPreference::ForceDistributed, true);

  const std::size_t max_groups = options.max_groups ? options.max_groups : network.size();
  const WGraph graph = subgraph(circuit, order);
  for (std::size_t k = 1; k <= std::min({N, network.size(), max_groups}); ++k) {
    std::mt19937_64 rng(options.seed + k);
    const Cost max_part = static_cast<Cost>((N + k - 1) / k);
    const auto part = multilevel_partition(graph, k, max_part, rng);
    if (part.empty()) continue;
    const auto groups = to_groups(part, order);
    if (options.layout == LayoutPreference::Auto) {
      consider(groups, LayoutPreference::Auto);
      consider(groups, LayoutPreference::ForceDistributed);
    } else {
      consider(groups, options.layout);
    }
  }
  if (!have) {
    std::size_t need = N * planner.block_size();
    std::string names;
    const auto& g = planner.failed_group();
    if (!g.empty()) need = planner.failed_need();
    for (auto q : g.empty() ? order : g) names += (names.empty() ? "" : ",") + circuit.qubits[q];
    throw InfeasibleError("No processor assignment fits group {" + names + "} needing " + std::to_string(need) +
                          " physical qubits");
  }
  return best;
}

RefineResult iterative_refine(const PartitionPlan& plan, const LogicalCircuit& circuit,
                              const ProcessorNetwork& target, int rounds, double tolerance,
                              const PartitionOptions& options) {
  if (rounds < 0) throw std::invalid_argument("Refinement rounds must be non-negative");
  if (target.size() == 0) throw std::invalid_argument("Target network is empty");
  RefineResult out;
  out.plan = plan;
  out.cost_before = plan.total_pnl();
  out.cost_after = out.cost_before;

  PartitionOptions opts = options;
  opts.mode = plan.mode;
  Planner planner(circuit, target, plan.family, plan.d, opts);
  const std::size_t phys = planner.block_size();
  const std::size_t max_cap = *std::max_element(target.capacities.begin(), target.capacities.end());
  const std::size_t per_proc = max_cap / phys;

  for (int r = 0; r < rounds; ++r) {
    const auto& cur = out.plan;
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& layout : cur.layouts) groups.push_back(layout.qubits);
    if (cur.network.capacities == target.capacities && cur.network.policy == target.policy) break;
    std::vector<bool> oversized(groups.size(), false);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) oversized[gi] = groups[gi].size() * phys > max_cap;

    // Each oversized group either stays whole (distributed) or splits into local subgroups.
    std::vector<std::vector<std::size_t>> chosen;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      if (!oversized[gi]) {
        chosen.push_back(groups[gi]);
        continue;
      }
      std::vector<std::vector<std::size_t>> subgroups;
      if (per_proc > 0) {
        const std::size_t k = (groups[gi].size() + per_proc - 1) / per_proc;
        std::mt19937_64 rng(opts.seed + gi);
        const auto& members = groups[gi];
        const auto part = multilevel_partition(subgraph(circuit, members), k, static_cast<Cost>(per_proc), rng);
        if (!part.empty()) subgroups = to_groups(part, members);
      }
      auto trial = [&](bool split) -> Cost {
        auto g = chosen;
        if (split) {
          g.insert(g.end(), subgroups.begin(), subgroups.end());
        } else {
          g.push_back(groups[gi]);
        }
        g.insert(g.end(), groups.begin() + static_cast<std::ptrdiff_t>(gi) + 1, groups.end());
        PartitionPlan p;
        if (!planner.place(g, LayoutPreference::Auto, p)) return std::numeric_limits<Cost>::max();
        return p.total_pnl();
      };
      const Cost keep_cost = trial(false);
      const Cost split_cost = subgroups.empty() ? std::numeric_limits<Cost>::max() : trial(true);
      if (split_cost < keep_cost) {
        chosen.insert(chosen.end(), subgroups.begin(), subgroups.end());
      } else {
        chosen.push_back(groups[gi]);
      }
    }
    PartitionPlan next;
    if (!planner.place(chosen, LayoutPreference::Auto, next)) {
      throw InfeasibleError("Refined groups do not fit the target processors");
    }
    const Cost before = out.plan.total_pnl();
    const Cost after = next.total_pnl();
    const double rel = static_cast<double>(after - before) / static_cast<double>(std::max<Cost>(before, 1));
    if (after > before && rel > tolerance) {
      out.stopped_by_tolerance = true;
      break;
    }
    out.plan = std::move(next);
    ++out.rounds_applied;
  }
  out.cost_after = out.plan.total_pnl();
  out.increase = out.cost_after - out.cost_before;
  return out;
}

Diagnostics balance_diagnostic(const PartitionPlan& plan, const LogicalCircuit& circuit) {
  Diagnostics diag;
  const auto code = build_code(plan.family, plan.d);
  std::size_t intra_cnots = 0, cnots = 0;
  for (const auto& g : circuit.gates) {
    const bool cut = g.kind == GateKind::CNOT && plan.groups.at(g.operands[0]) != plan.groups.at(g.operands[1]);
    if (g.kind == GateKind::CNOT) ++cnots;
    if (cut) {
      ++diag.cut_gate_count;
      diag.quadratic_cost_share += static_cast<Cost>(code.n);
      continue;
    }
    if (g.kind == GateKind::CNOT) ++intra_cnots;
    for (auto q : std::set<std::size_t>(g.operands.begin(), g.operands.end())) {
      for (const auto& c : code.checks) diag.linear_cost_share += check_cost(c, plan.allocation, q, plan.mode);
    }
  }
  diag.intra_gate_fraction = cnots ? static_cast<double>(intra_cnots) / static_cast<double>(cnots) : 0.0;
  if (diag.quadratic_cost_share == 0) {
    diag.ratio = diag.linear_cost_share == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    diag.ratio = static_cast<double>(diag.linear_cost_share) / static_cast<double>(diag.quadratic_cost_share);
  }
  diag.balanced = diag.ratio >= 0.1 && diag.ratio <= 10.0;
  return diag;
}

nlohmann::json to_json(const PartitionPlan& plan) {
  nlohmann::json doc;
  doc["code"] = {{"family", family_name(plan.family)}, {"d", plan.d}};
  doc["mode"] = mode_name(plan.mode);
  doc["network"] = {{"capacities", plan.network.capacities}, {"policy", policy_name(plan.network.policy)}};
  doc["groups"] = nlohmann::json::object();
  for (std::size_t q = 0; q < plan.qubit_names.size(); ++q) doc["groups"][plan.qubit_names[q]] = plan.groups[q];
  doc["layouts"] = nlohmann::json::array();
  for (std::size_t g = 0; g < plan.layouts.size(); ++g) {
    const auto& l = plan.layouts[g];
    std::vector<std::string> names;
    for (auto q : l.qubits) names.push_back(plan.qubit_names[q]);
    doc["layouts"].push_back({{"group", g},
                              {"kind", l.kind == LayoutKind::Local ? "Local" : "Distributed"},
                              {"processors", l.processors},
                              {"qubits", names}});
  }
  std::vector<CodeBlock> blocks;
  if (!plan.qubit_names.empty()) {
    const auto code = build_code(plan.family, plan.d);
    for (const auto& name : plan.qubit_names) {
      blocks.push_back(code);
      blocks.back().block_id = name;
    }
  }
  doc["allocations"] = to_json(plan.allocation, blocks);
  doc["predicted_cost"] = to_json(plan.predicted_cost);
  doc["t_gate_pnl"] = plan.t_gate_pnl;
  doc["total_pnl"] = plan.total_pnl();
  const auto& dg = plan.diagnostics;
  doc["diagnostics"] = {{"intra_gate_fraction", dg.intra_gate_fraction},
                        {"cut_gate_count", dg.cut_gate_count},
                        {"quadratic_cost_share", dg.quadratic_cost_share},
                        {"linear_cost_share", dg.linear_cost_share},
                        {"ratio", std::isfinite(dg.ratio) ? nlohmann::json(dg.ratio) : nlohmann::json(nullptr)},
                        {"balanced", dg.balanced}};
  return doc;
}

}  // namespace dlq
