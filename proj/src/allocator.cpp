#include "dlq/allocator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace dlq {

namespace {

constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Ancilla placement: a transportation problem with unit supplies.

struct Transport {
  Cost cost = kInf;
  std::vector<int> assign;
  bool feasible = false;
};

class TransportSolver {
 public:
  TransportSolver(const std::vector<std::vector<Cost>>& costs, std::vector<std::size_t> lower,
                  std::vector<std::size_t> upper)
      : c_(costs), lower_(std::move(lower)), upper_(std::move(upper)), p_(lower_.size()) {}

  Transport solve() {
    Transport out;
    const std::size_t m = c_.size();
    std::size_t lo = 0, hi = 0;
    for (std::size_t q = 0; q < p_; ++q) {
      if (lower_[q] > upper_[q]) return out;
      lo += lower_[q];
      hi += upper_[q];
    }
    if (lo > m || hi < m) return out;

    assign_.assign(m, 0);
    load_.assign(p_, 0);
    for (std::size_t i = 0; i < m; ++i) {
      int best = 0;
      for (std::size_t q = 1; q < p_; ++q) {
        if (c_[i][q] < c_[i][static_cast<std::size_t>(best)]) best = static_cast<int>(q);
      }
      assign_[i] = best;
      ++load_[static_cast<std::size_t>(best)];
    }
    while (true) {
      cancel_cycles();
      std::vector<bool> src(p_, false), dst(p_, false);
      bool over = false;
      for (std::size_t q = 0; q < p_; ++q) {
        if (load_[q] > upper_[q]) {
          src[q] = true;
          over = true;
        }
      }
      if (over) {
        for (std::size_t q = 0; q < p_; ++q) dst[q] = load_[q] < upper_[q];
      } else {
        bool under = false;
        for (std::size_t q = 0; q < p_; ++q) {
          if (load_[q] < lower_[q]) {
            dst[q] = true;
            under = true;
          }
        }
        if (!under) break;
        for (std::size_t q = 0; q < p_; ++q) src[q] = load_[q] > lower_[q];
      }
      if (!augment(src, dst)) return out;
    }
    cancel_cycles();
    out.assign = assign_;
    out.cost = 0;
    for (std::size_t i = 0; i < m; ++i) out.cost += c_[i][static_cast<std::size_t>(assign_[i])];
    out.feasible = true;
    return out;
  }

 private:
  struct Edge {
    Cost w = kInf;
    std::size_t item = 0;
  };

  // Cheapest single-item move between every ordered processor pair.
  std::vector<std::vector<Edge>> edges() const {
    std::vector<std::vector<Edge>> e(p_, std::vector<Edge>(p_));
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const auto a = static_cast<std::size_t>(assign_[i]);
      for (std::size_t b = 0; b < p_; ++b) {
        if (b == a) continue;
        const Cost w = c_[i][b] - c_[i][a];
        if (w < e[a][b].w) e[a][b] = {w, i};
      }
    }
    return e;
  }

  void move(std::size_t item, std::size_t to) {
    --load_[static_cast<std::size_t>(assign_[item])];
    assign_[item] = static_cast<int>(to);
    ++load_[to];
  }

  bool augment(const std::vector<bool>& src, const std::vector<bool>& dst) {
    const auto e = edges();
    std::vector<Cost> dist(p_, kInf);
    std::vector<int> pred(p_, -1);
    for (std::size_t q = 0; q < p_; ++q) {
      if (src[q]) dist[q] = 0;
    }
    for (std::size_t round = 0; round < p_; ++round) {
      bool changed = false;
      for (std::size_t a = 0; a < p_; ++a) {
        if (dist[a] >= kInf) continue;
        for (std::size_t b = 0; b < p_; ++b) {
          if (b == a || e[a][b].w >= kInf || src[b]) continue;
          if (dist[a] + e[a][b].w < dist[b]) {
            dist[b] = dist[a] + e[a][b].w;
            pred[b] = static_cast<int>(a);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    int target = -1;
    for (std::size_t q = 0; q < p_; ++q) {
      if (dst[q] && !src[q] && dist[q] < kInf && (target < 0 || dist[q] < dist[static_cast<std::size_t>(target)])) {
        target = static_cast<int>(q);
      }
    }
    if (target < 0) return false;
    std::vector<std::pair<std::size_t, std::size_t>> path;
    for (int b = target; pred[static_cast<std::size_t>(b)] >= 0; b = pred[static_cast<std::size_t>(b)]) {
      const auto a = static_cast<std::size_t>(pred[static_cast<std::size_t>(b)]);
      path.emplace_back(e[a][static_cast<std::size_t>(b)].item, static_cast<std::size_t>(b));
      if (path.size() > p_) return false;
    }
    for (const auto& [item, to] : path) move(item, to);
    return true;
  }

  // Removes negative cycles; node p_ is a slack node linking processors with spare room.
  void cancel_cycles() {
    const std::size_t nodes = p_ + 1;
    while (true) {
      const auto e = edges();
      auto weight = [&](std::size_t a, std::size_t b) -> Cost {
        if (a == p_ && b < p_) return load_[b] > lower_[b] ? 0 : kInf;
        if (b == p_ && a < p_) return load_[a] < upper_[a] ? 0 : kInf;
        if (a < p_ && b < p_ && a != b) return e[a][b].w;
        return kInf;
      };
      std::vector<Cost> dist(nodes, 0);
      std::vector<int> pred(nodes, -1);
      int last = -1;
      for (std::size_t round = 0; round < nodes; ++round) {
        last = -1;
        for (std::size_t a = 0; a < nodes; ++a) {
          for (std::size_t b = 0; b < nodes; ++b) {
            const Cost w = weight(a, b);
            if (w >= kInf) continue;
            if (dist[a] + w < dist[b]) {
              dist[b] = dist[a] + w;
              pred[b] = static_cast<int>(a);
              last = static_cast<int>(b);
            }
          }
        }
        if (last < 0) return;
      }
      int x = last;
      for (std::size_t k = 0; k < nodes; ++k) x = pred[static_cast<std::size_t>(x)];
      std::vector<std::pair<std::size_t, std::size_t>> cycle;
      int b = x;
      do {
        const auto a = static_cast<std::size_t>(pred[static_cast<std::size_t>(b)]);
        cycle.emplace_back(a, static_cast<std::size_t>(b));
        b = static_cast<int>(a);
      } while (b != x && cycle.size() <= nodes);
      for (const auto& [a, to] : cycle) {
        if (a < p_ && to < p_) move(e[a][to].item, to);
      }
    }
  }

  const std::vector<std::vector<Cost>>& c_;
  std::vector<std::size_t> lower_;
  std::vector<std::size_t> upper_;
  std::size_t p_;
  std::vector<int> assign_;
  std::vector<std::size_t> load_;
};

// ---------------------------------------------------------------------------
// Problem compiled into units (data qubits merged by colocation) and ancilla items.

struct Item {
  std::vector<std::size_t> units;
  Cost mult = 0;
  std::size_t block = 0;
  std::size_t check = 0;
};

struct PairTerm {
  std::size_t u = 0;
  std::size_t v = 0;
  Cost w = 0;
};

struct Model {
  std::size_t p = 0;
  std::vector<std::size_t> caps;
  bool strict = true;
  MeasurementMode mode = MeasurementMode::Standard;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members;  // unit -> (block, qubit)
  std::vector<std::size_t> size;
  std::vector<Coord> coord;
  std::vector<std::vector<std::size_t>> unit_of;  // [block][data qubit]
  std::vector<Item> items;
  std::vector<PairTerm> pairs;
  std::vector<std::vector<std::size_t>> unit_items;  // unit -> items containing it
  std::vector<std::vector<std::size_t>> unit_pairs;
  std::size_t total_data = 0;

  std::size_t units() const noexcept { return size.size(); }

  Cost hop_factor() const noexcept {
    return mode == MeasurementMode::AncillaTeleport ? 2 : mode == MeasurementMode::AncillaSwap ? 3 : 0;
  }

  std::vector<Cost> item_costs(const Item& it, const std::vector<int>& proc) const {
    std::vector<Cost> cnt(p, 0);
    Cost total = 0;
    for (auto u : it.units) {
      const int q = proc[u];
      if (q < 0) continue;
      ++cnt[static_cast<std::size_t>(q)];
      ++total;
    }
    return costs_from_counts(it, cnt, total);
  }

  std::vector<Cost> costs_from_counts(const Item& it, const std::vector<Cost>& cnt, Cost total) const {
    std::vector<Cost> out(p, 0);
    if (mode == MeasurementMode::Standard) {
      for (std::size_t q = 0; q < p; ++q) out[q] = it.mult * (total - cnt[q]);
      return out;
    }
    Cost distinct = 0;
    for (auto c : cnt) distinct += c > 0 ? 1 : 0;
    for (std::size_t q = 0; q < p; ++q) {
      const Cost hops = distinct + (cnt[q] == 0 ? 1 : 0) - 1;
      out[q] = it.mult * hop_factor() * std::max<Cost>(hops, 0);
    }
    return out;
  }

  Cost pair_cost(const std::vector<int>& proc) const {
    Cost total = 0;
    for (const auto& t : pairs) total += proc[t.u] != proc[t.v] ? t.w : 0;
    return total;
  }

  // Ancilla slot bounds per processor for a complete data assignment; empty when infeasible.
  bool slots(const std::vector<int>& proc, std::vector<std::size_t>& lower, std::vector<std::size_t>& upper) const {
    std::vector<std::size_t> load(p, 0);
    for (std::size_t u = 0; u < units(); ++u) load[static_cast<std::size_t>(proc[u])] += size[u];
    lower.assign(p, 0);
    upper.assign(p, 0);
    for (std::size_t q = 0; q < p; ++q) {
      if (load[q] > caps[q]) return false;
      upper[q] = caps[q] - load[q];
      if (strict) lower[q] = upper[q];
    }
    return true;
  }

  std::vector<std::vector<Cost>> cost_matrix(const std::vector<int>& proc) const {
    std::vector<std::vector<Cost>> c;
    c.reserve(items.size());
    for (const auto& it : items) c.push_back(item_costs(it, proc));
    return c;
  }

  // Optimal total for a complete data assignment (kInf when infeasible).
  Cost evaluate(const std::vector<int>& proc, std::vector<int>* ancillas = nullptr) const {
    std::vector<std::size_t> lower, upper;
    if (!slots(proc, lower, upper)) return kInf;
    const auto c = cost_matrix(proc);
    auto t = TransportSolver(c, lower, upper).solve();
    if (!t.feasible) return kInf;
    if (ancillas) *ancillas = t.assign;
    return t.cost + pair_cost(proc);
  }

  // Lexicographically smallest ancilla vector among those achieving the optimum.
  std::vector<int> lex_ancillas(const std::vector<int>& proc, Cost target) const {
    std::vector<std::size_t> lower, upper;
    slots(proc, lower, upper);
    const auto c = cost_matrix(proc);
    const Cost fixed_pairs = pair_cost(proc);
    std::vector<int> out(items.size(), 0);
    Cost fixed = fixed_pairs;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::vector<std::vector<Cost>> rest(c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c.end());
      bool placed = false;
      for (std::size_t q = 0; q < p && !placed; ++q) {
        if (upper[q] == 0) continue;
        auto lo = lower;
        auto up = upper;
        --up[q];
        if (lo[q] > 0) --lo[q];
        auto t = TransportSolver(rest, lo, up).solve();
        if (!t.feasible || fixed + c[i][q] + t.cost != target) continue;
        out[i] = static_cast<int>(q);
        fixed += c[i][q];
        lower = lo;
        upper = up;
        placed = true;
      }
      if (!placed) throw std::logic_error("Ancilla placement lost the optimum");
    }
    return out;
  }

  Allocation to_allocation(const std::vector<CodeBlock>& blocks, const std::vector<int>& proc,
                           const std::vector<int>& ancillas) const {
    Allocation alloc = Allocation::unassigned(blocks);
    for (std::size_t u = 0; u < units(); ++u) {
      for (const auto& [b, q] : members[u]) alloc.assignment[b][q] = proc[u];
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      alloc.assignment[items[i].block][blocks[items[i].block].n + items[i].check] = ancillas[i];
    }
    return alloc;
  }
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

Model compile(const AllocationProblem& problem) {
  validate_problem(problem);
  Model m;
  m.p = problem.network.size();
  m.caps = problem.network.capacities;
  m.strict = problem.network.policy == CapacityPolicy::Strict;
  m.mode = problem.mode;
  const auto& blocks = problem.blocks;

  std::vector<std::size_t> offset(blocks.size() + 1, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) offset[b + 1] = offset[b] + blocks[b].n;
  std::vector<std::size_t> parent(offset.back());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& [a, b] : problem.effective_colocation()) {
    for (std::size_t i = 0; i < blocks[a].n; ++i) {
      const auto ra = find_root(parent, offset[a] + i);
      const auto rb = find_root(parent, offset[b] + i);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::map<std::size_t, std::size_t> unit_index;
  m.unit_of.resize(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].n; ++i) {
      const auto r = find_root(parent, offset[b] + i);
      auto it = unit_index.find(r);
      if (it == unit_index.end()) {
        it = unit_index.emplace(r, m.size.size()).first;
        m.size.push_back(0);
        m.members.emplace_back();
        m.coord.push_back(blocks[b].coords.empty() ? Coord{static_cast<int>(i), 0} : blocks[b].coords[i]);
      }
      ++m.size[it->second];
      m.members[it->second].emplace_back(b, i);
      m.unit_of[b].push_back(it->second);
    }
    m.total_data += blocks[b].n;
  }

  const auto gates = problem.effective_gates();
  std::vector<Cost> mult(blocks.size(), 0);
  std::map<std::pair<std::size_t, std::size_t>, Cost> pair_weight;
  for (const auto& g : gates) {
    if (problem.schedule.scope == ExtractionScope::AllBlocks) {
      for (auto& x : mult) x += problem.schedule.rounds_per_gate;
    } else {
      for (auto b : std::set<std::size_t>(g.blocks.begin(), g.blocks.end())) mult[b] += problem.schedule.rounds_per_gate;
    }
    if (g.kind != GateKind::CNOT) continue;
    const auto a = g.blocks[0], b = g.blocks[1];
    for (std::size_t i = 0; i < blocks[a].n; ++i) {
      auto u = m.unit_of[a][i], v = m.unit_of[b][i];
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      pair_weight[{u, v}] += 1;
    }
  }
  for (const auto& [key, w] : pair_weight) m.pairs.push_back({key.first, key.second, w});

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t c = 0; c < blocks[b].checks.size(); ++c) {
      Item it;
      it.block = b;
      it.check = c;
      it.mult = mult[b];
      for (auto q : blocks[b].checks[c].support) it.units.push_back(m.unit_of[b][q]);
      m.items.push_back(std::move(it));
    }
  }
  m.unit_items.resize(m.units());
  m.unit_pairs.resize(m.units());
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    for (auto u : m.items[i].units) m.unit_items[u].push_back(i);
  }
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    m.unit_pairs[m.pairs[k].u].push_back(k);
    m.unit_pairs[m.pairs[k].v].push_back(k);
  }
  return m;
}

SolveResult finish(const AllocationProblem& problem, const Model& m, const std::vector<int>& proc, Cost cost,
                   Optimality optimality, SolverStats stats) {
  SolveResult result;
  const auto ancillas = m.lex_ancillas(proc, cost);
  result.allocation = m.to_allocation(problem.blocks, proc, ancillas);
  result.cost = gate_sequence_cost(problem.blocks, result.allocation, problem.schedule, problem.mode,
                                   problem.effective_gates());
  if (result.cost.pnl_total != cost || !respects_capacity(problem.blocks, result.allocation, problem.network)) {
    throw std::logic_error("Allocator result failed independent re-evaluation");
  }
  result.optimality = optimality;
  result.stats = stats;
  return result;
}

// ---------------------------------------------------------------------------
// Heuristic search over data-unit assignments.

struct Candidate {
  std::vector<int> proc;
  Cost cost = kInf;
};

bool lex_better(const Candidate& a, const Candidate& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.proc < b.proc);
}

std::vector<Candidate> geometric_seeds(const Model& m) {
  std::vector<Candidate> seeds;
  const std::size_t U = m.units();
  if (m.p == 1) {
    Candidate c{std::vector<int>(U, 0), 0};
    c.cost = m.evaluate(c.proc);
    if (c.cost < kInf) seeds.push_back(c);
    return seeds;
  }
  const double pi = std::acos(-1.0);
  std::vector<std::size_t> target(m.p, 0);
  const std::size_t cap_total = std::accumulate(m.caps.begin(), m.caps.end(), std::size_t{0});
  std::size_t assigned = 0;
  for (std::size_t q = 0; q < m.p; ++q) {
    target[q] = cap_total ? m.caps[q] * m.total_data / cap_total : 0;
    assigned += target[q];
  }
  for (std::size_t q = 0; assigned < m.total_data; q = (q + 1) % m.p, ++assigned) ++target[q];

  for (int k = 0; k < 24; ++k) {
    const double angle = k * pi / 12.0;
    const double cx = std::cos(angle), cy = std::sin(angle);
    std::vector<std::size_t> order(U);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> key(U);
    for (std::size_t u = 0; u < U; ++u) key[u] = cx * m.coord[u].x + cy * m.coord[u].y;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b] - 1e-9; });
    if (m.p == 2) {
      std::vector<int> proc(U, 1);
      for (std::size_t t = 0; t <= U; ++t) {
        if (t > 0) proc[order[t - 1]] = 0;
        const Cost c = m.evaluate(proc);
        if (c < kInf) seeds.push_back({proc, c});
      }
    } else {
      std::vector<int> proc(U, 0);
      std::size_t q = 0, load = 0;
      for (auto u : order) {
        while (q + 1 < m.p && (load >= target[q] || load + m.size[u] > m.caps[q])) {
          ++q;
          load = 0;
        }
        proc[u] = static_cast<int>(q);
        load += m.size[u];
      }
      const Cost c = m.evaluate(proc);
      if (c < kInf) seeds.push_back({proc, c});
    }
  }
  if (seeds.empty()) {
    // First fit in index order as a last resort.
    std::vector<int> proc(U, 0);
    std::vector<std::size_t> load(m.p, 0);
    bool ok = true;
    for (std::size_t u = 0; u < U && ok; ++u) {
      ok = false;
      for (std::size_t q = 0; q < m.p; ++q) {
        if (load[q] + m.size[u] <= m.caps[q]) {
          proc[u] = static_cast<int>(q);
          load[q] += m.size[u];
          ok = true;
          break;
        }
      }
    }
    if (ok) {
      const Cost c = m.evaluate(proc);
      if (c < kInf) seeds.push_back({proc, c});
    }
  }
  std::sort(seeds.begin(), seeds.end(), lex_better);
  seeds.erase(std::unique(seeds.begin(), seeds.end(),
                          [](const Candidate& a, const Candidate& b) { return a.proc == b.proc; }),
              seeds.end());
  return seeds;
}

Candidate anneal(const Model& m, Candidate start, std::mt19937_64& rng, std::size_t iterations) {
  Candidate best = start;
  Candidate cur = start;
  if (m.p < 2 || m.units() < 2 || iterations == 0) return best;
  std::vector<std::size_t> load(m.p, 0);
  for (std::size_t u = 0; u < m.units(); ++u) load[static_cast<std::size_t>(cur.proc[u])] += m.size[u];
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const double t0 = 2.0, t1 = 0.05;

  // Units on a cut check are the interesting ones to move.
  auto boundary_unit = [&]() -> std::size_t {
    for (int tries = 0; tries < 8; ++tries) {
      const auto& it = m.items[pick(m.items.size())];
      if (it.units.empty()) continue;
      const int first = cur.proc[it.units[0]];
      bool cut = false;
      for (auto u : it.units) cut = cut || cur.proc[u] != first;
      if (cut) return it.units[pick(it.units.size())];
    }
    return pick(m.units());
  };

  for (std::size_t iter = 0; iter < iterations; ++iter) {
    const double temp = t0 * std::pow(t1 / t0, static_cast<double>(iter) / static_cast<double>(iterations));
    const std::size_t u = unit01(rng) < 0.8 ? boundary_unit() : pick(m.units());
    const auto from = static_cast<std::size_t>(cur.proc[u]);
    std::vector<std::pair<std::size_t, int>> changes;
    if (unit01(rng) < 0.5) {
      auto to = pick(m.p - 1);
      if (to >= from) ++to;
      if (load[to] + m.size[u] > m.caps[to]) continue;
      changes = {{u, static_cast<int>(to)}};
    } else {
      const std::size_t v = boundary_unit();
      if (cur.proc[v] == cur.proc[u] || m.size[v] != m.size[u]) continue;
      changes = {{u, cur.proc[v]}, {v, cur.proc[u]}};
    }
    Candidate next = cur;
    for (const auto& [w, q] : changes) next.proc[w] = q;
    next.cost = m.evaluate(next.proc);
    if (next.cost >= kInf) continue;
    const double delta = static_cast<double>(next.cost - cur.cost);
    if (delta <= 0 || unit01(rng) < std::exp(-delta / temp)) {
      for (const auto& [w, q] : changes) {
        load[static_cast<std::size_t>(cur.proc[w])] -= m.size[w];
        load[static_cast<std::size_t>(q)] += m.size[w];
      }
      cur = std::move(next);
      if (lex_better(cur, best)) best = cur;
    }
  }
  return best;
}

Candidate heuristic_search(const Model& m, std::uint64_t seed, std::size_t iterations) {
  const auto seeds = geometric_seeds(m);
  if (seeds.empty()) throw InfeasibleError("No capacity-respecting allocation exists for the given processors");
  std::mt19937_64 rng(seed);
  Candidate best = seeds.front();
  const std::size_t restarts = std::min<std::size_t>(3, seeds.size());
  for (std::size_t r = 0; r < restarts; ++r) {
    auto c = anneal(m, seeds[r], rng, iterations);
    if (lex_better(c, best)) best = c;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Branch and bound.

class BranchAndBound {
 public:
  BranchAndBound(const Model& m, Candidate incumbent, double time_limit)
      : m_(m), best_(std::move(incumbent)), limit_(time_limit), start_(Clock::now()) {
    proc_.assign(m.units(), kUnassigned);
    load_.assign(m.p, 0);
    unit_count_.assign(m.p, 0);
    cnt_.assign(m.items.size(), std::vector<Cost>(m.p, 0));
    assigned_.assign(m.items.size(), 0);
    remaining_ = m.total_data;
    prev_same_.assign(m.p, -1);
    for (std::size_t q = 0; q < m.p; ++q) {
      for (std::size_t r = q; r-- > 0;) {
        if (m.caps[r] == m.caps[q]) {
          prev_same_[q] = static_cast<int>(r);
          break;
        }
      }
    }
  }

  bool run() {
    dfs(0);
    return !timed_out_;
  }

  const Candidate& best() const noexcept { return best_; }
  std::uint64_t nodes() const noexcept { return nodes_; }
  bool found_any() const noexcept { return best_.cost < kInf; }

 private:
  bool prune(Cost lb) const { return from_search_ ? lb >= best_.cost : lb > best_.cost; }

  Cost lower_bound() const {
    Cost lb = pair_cost_;
    if (m_.p == 2) {
      Cost base = 0;
      std::vector<Cost> deltas;
      deltas.reserve(m_.items.size());
      for (std::size_t i = 0; i < m_.items.size(); ++i) {
        const auto c = m_.costs_from_counts(m_.items[i], cnt_[i], assigned_[i]);
        base += c[0];
        deltas.push_back(c[1] - c[0]);
      }
      std::sort(deltas.begin(), deltas.end());
      const auto items = static_cast<long long>(m_.items.size());
      const auto cap0 = static_cast<long long>(m_.caps[0]), cap1 = static_cast<long long>(m_.caps[1]);
      const auto d0 = static_cast<long long>(load_[0]), d1 = static_cast<long long>(load_[1]);
      const auto rem = static_cast<long long>(remaining_);
      long long r_lo, r_hi;
      if (m_.strict) {
        r_lo = cap1 - std::min(d1 + rem, cap1);
        r_hi = cap1 - std::max(d1, static_cast<long long>(m_.total_data) - cap0);
      } else {
        r_lo = items - (cap0 - d0);
        r_hi = cap1 - d1;
      }
      r_lo = std::max(r_lo, 0LL);
      r_hi = std::min(r_hi, items);
      if (r_lo > r_hi) return kInf;
      Cost prefix = 0, best = kInf;
      for (long long r = 0; r <= r_hi; ++r) {
        if (r >= r_lo) best = std::min(best, prefix);
        if (r < items) prefix += deltas[static_cast<std::size_t>(r)];
      }
      return lb + base + best;
    }
    for (std::size_t i = 0; i < m_.items.size(); ++i) {
      const auto c = m_.costs_from_counts(m_.items[i], cnt_[i], assigned_[i]);
      lb += *std::min_element(c.begin(), c.end());
    }
    return lb;
  }

  void assign(std::size_t u, int q) {
    const auto uq = static_cast<std::size_t>(q);
    proc_[u] = q;
    load_[uq] += m_.size[u];
    ++unit_count_[uq];
    remaining_ -= m_.size[u];
    for (auto i : m_.unit_items[u]) {
      ++cnt_[i][uq];
      ++assigned_[i];
    }
    for (auto k : m_.unit_pairs[u]) {
      const auto& t = m_.pairs[k];
      const auto other = t.u == u ? t.v : t.u;
      if (proc_[other] >= 0 && proc_[other] != q) pair_cost_ += t.w;
    }
  }

  void unassign(std::size_t u) {
    const int q = proc_[u];
    const auto uq = static_cast<std::size_t>(q);
    for (auto k : m_.unit_pairs[u]) {
      const auto& t = m_.pairs[k];
      const auto other = t.u == u ? t.v : t.u;
      if (proc_[other] >= 0 && proc_[other] != q) pair_cost_ -= t.w;
    }
    for (auto i : m_.unit_items[u]) {
      --cnt_[i][uq];
      --assigned_[i];
    }
    remaining_ += m_.size[u];
    --unit_count_[uq];
    load_[uq] -= m_.size[u];
    proc_[u] = kUnassigned;
  }

  void dfs(std::size_t u) {
    if (timed_out_) return;
    if ((++nodes_ & 1023) == 0 && limit_ >= 0 && seconds_since(start_) > limit_) {
      timed_out_ = true;
      return;
    }
    if (u == m_.units()) {
      const Cost c = m_.evaluate(proc_);
      if (c < kInf && (c < best_.cost || (!from_search_ && c == best_.cost))) {
        best_ = {proc_, c};
        from_search_ = true;
      }
      return;
    }
    for (std::size_t q = 0; q < m_.p; ++q) {
      if (load_[q] + m_.size[u] > m_.caps[q]) continue;
      if (prev_same_[q] >= 0 && unit_count_[static_cast<std::size_t>(prev_same_[q])] == 0) continue;
      assign(u, static_cast<int>(q));
      const Cost lb = lower_bound();
      if (lb < kInf && !prune(lb)) dfs(u + 1);
      unassign(u);
      if (timed_out_) return;
    }
  }

  const Model& m_;
  Candidate best_;
  bool from_search_ = false;
  double limit_;
  Clock::time_point start_;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
  std::vector<int> proc_;
  std::vector<std::size_t> load_;
  std::vector<std::size_t> unit_count_;
  std::vector<std::vector<Cost>> cnt_;
  std::vector<Cost> assigned_;
  std::vector<int> prev_same_;
  std::size_t remaining_ = 0;
  Cost pair_cost_ = 0;
};

}  // namespace

std::vector<LogicalGate> AllocationProblem::effective_gates() const {
  if (!gates.empty()) return gates;
  if (blocks.size() >= 2) return {LogicalGate{GateKind::CNOT, {0, 1}}};
  if (blocks.size() == 1) return {LogicalGate{GateKind::H, {0}}};
  return {};
}

std::vector<std::pair<std::size_t, std::size_t>> AllocationProblem::effective_colocation() const {
  if (colocate_pairs) return *colocate_pairs;
  if (blocks.size() == 2) return {{0, 1}};
  return {};
}

std::string optimality_name(Optimality optimality) {
  return optimality == Optimality::ProvenOptimal ? "ProvenOptimal" : "BestFound";
}

void validate_problem(const AllocationProblem& problem) {
  if (problem.blocks.empty()) throw std::invalid_argument("Allocation problem has no blocks");
  if (problem.network.size() == 0) throw std::invalid_argument("Processor network is empty");
  if (problem.schedule.rounds_per_gate < 0) throw std::invalid_argument("rounds_per_gate must be non-negative");
  if (!problem.schedule.charge_trailing_round) {
    throw std::invalid_argument("Allocation problems charge every extraction round");
  }
  std::size_t total = 0;
  for (const auto& b : problem.blocks) total += b.physical_count();
  const std::size_t cap = problem.network.total_capacity();
  if (total > cap) {
    throw InfeasibleError("Blocks need " + std::to_string(total) + " qubits but processors hold " + std::to_string(cap));
  }
  if (problem.network.policy == CapacityPolicy::Strict && total != cap) {
    throw InfeasibleError("Strict capacities must sum to the " + std::to_string(total) + " physical qubits");
  }
  for (const auto& g : problem.effective_gates()) {
    if (g.kind == GateKind::T) throw UnsupportedGateError("T is not transversal; cost it through a universality strategy");
    for (auto b : g.blocks) {
      if (b >= problem.blocks.size()) throw std::invalid_argument("Gate references unknown block " + std::to_string(b));
    }
    if (g.kind == GateKind::CNOT) {
      if (g.blocks.size() != 2 || g.blocks[0] == g.blocks[1]) throw std::invalid_argument("CNOT needs two distinct blocks");
      const auto& a = problem.blocks[g.blocks[0]];
      const auto& b = problem.blocks[g.blocks[1]];
      if (a.family != b.family || a.distance != b.distance || a.n != b.n) {
        throw IncompatibleBlocksError("Transversal CNOT needs blocks of the same family and distance");
      }
    } else if (g.blocks.size() != 1) {
      throw std::invalid_argument("Single-block gate needs exactly one block");
    }
  }
  for (const auto& [a, b] : problem.effective_colocation()) {
    if (a >= problem.blocks.size() || b >= problem.blocks.size() || a == b) {
      throw std::invalid_argument("Colocated pair references invalid blocks");
    }
    if (problem.blocks[a].n != problem.blocks[b].n) {
      throw IncompatibleBlocksError("Colocated blocks need matching data qubit counts");
    }
  }
}

SolveResult solve_heuristic(const AllocationProblem& problem, std::uint64_t seed, std::size_t iterations) {
  const auto start = Clock::now();
  const Model m = compile(problem);
  const auto best = heuristic_search(m, seed, iterations);
  SolverStats stats;
  stats.nodes = iterations;
  stats.seed = seed;
  auto result = finish(problem, m, best.proc, best.cost, Optimality::BestFound, stats);
  result.stats.wall_seconds = seconds_since(start);
  return result;
}

SolveResult solve_exact(const AllocationProblem& problem, double time_limit, std::uint64_t seed) {
  if (time_limit < 0) throw std::invalid_argument("Time limit must be non-negative");
  const auto start = Clock::now();
  const Model m = compile(problem);
  SolverStats stats;
  stats.seed = seed;

  Candidate incumbent;
  if (time_limit == 0) {
    const auto seeds = geometric_seeds(m);
    if (seeds.empty()) throw InfeasibleError("No capacity-respecting allocation exists for the given processors");
    auto result = finish(problem, m, seeds.front().proc, seeds.front().cost, Optimality::BestFound, stats);
    result.stats.wall_seconds = seconds_since(start);
    return result;
  }
  try {
    incumbent = heuristic_search(m, seed, std::min<std::size_t>(kDefaultIterations, 200 * m.units()));
  } catch (const InfeasibleError&) {
    incumbent = Candidate{};
  }
  BranchAndBound bnb(m, incumbent, time_limit - seconds_since(start));
  const bool complete = bnb.run();
  stats.nodes = bnb.nodes();
  if (!bnb.found_any()) throw InfeasibleError("No capacity-respecting allocation exists for the given processors");
  auto result = finish(problem, m, bnb.best().proc, bnb.best().cost,
                       complete ? Optimality::ProvenOptimal : Optimality::BestFound, stats);
  result.stats.wall_seconds = seconds_since(start);
  return result;
}

AllocationProblem split_problem(CodeFamily family, int d, std::size_t processors, MeasurementMode mode) {
  if (processors == 0) throw std::invalid_argument("Need at least one processor");
  AllocationProblem problem;
  auto a = build_code(family, d);
  auto b = a;
  a.block_id = "A";
  b.block_id = "B";
  problem.blocks = {a, b};
  const std::size_t total = a.physical_count() + b.physical_count();
  problem.network.policy = CapacityPolicy::Strict;
  problem.network.capacities.assign(processors, total / processors);
  for (std::size_t q = 0; q < total % processors; ++q) ++problem.network.capacities[q];
  problem.mode = mode;
  return problem;
}

std::vector<SweepRow> sweep_two_processor(CodeFamily family, const std::vector<int>& d_list,
                                          const SweepOptions& options) {
  auto run = [&](int d) {
    const auto problem = split_problem(family, d, 2);
    const auto result = options.exact ? solve_exact(problem, options.time_limit, options.seed)
                                      : solve_heuristic(problem, options.seed);
    SweepRow row;
    row.family = family;
    row.d = d;
    row.local_pnl = static_cast<Cost>(problem.blocks[0].n);
    row.distributed_pnl = result.cost.pnl_total;
    row.optimality = result.optimality;
    return row;
  };
  std::vector<SweepRow> rows(d_list.size());
  if (options.threads <= 1) {
    for (std::size_t k = 0; k < d_list.size(); ++k) rows[k] = run(d_list[k]);
    return rows;
  }
  for (std::size_t k = 0; k < d_list.size(); k += options.threads) {
    std::vector<std::future<SweepRow>> jobs;
    for (std::size_t j = k; j < std::min(d_list.size(), k + options.threads); ++j) {
      jobs.push_back(std::async(std::launch::async, run, d_list[j]));
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) rows[k + j] = jobs[j].get();
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "family,d,local_pnl,distributed_pnl,optimality\n";
  for (const auto& r : rows) {
    out << family_name(r.family) << "," << r.d << "," << r.local_pnl << "," << r.distributed_pnl << ","
        << optimality_name(r.optimality) << "\n";
  }
  return out.str();
}

ThresholdRow multi_processor_threshold(CodeFamily family, std::size_t processors, const ThresholdOptions& options) {
  if (processors < 2) throw std::invalid_argument("Processor count must be at least 2");
  ThresholdRow row;
  row.family = family;
  row.processors = processors;
  for (int d = 3; d <= options.d_max; d += 2) {
    const auto problem = split_problem(family, d, processors);
    const std::size_t total = problem.network.total_capacity();
    const bool exact = processors == 2 && total <= options.exact_qubit_limit;
    const auto result = exact ? solve_exact(problem, options.time_limit, options.seed)
                              : solve_heuristic(problem, options.seed, options.iterations);
    const auto local = static_cast<Cost>(problem.blocks[0].n);
    if (result.cost.pnl_total < local) {
      row.threshold = d;
      row.distributed_pnl = result.cost.pnl_total;
      row.local_pnl = local;
      row.optimality = result.optimality;
      return row;
    }
  }
  return row;
}

std::string threshold_csv(const std::vector<ThresholdRow>& rows) {
  std::ostringstream out;
  out << "family,processors,threshold_d,distributed_pnl,local_pnl,optimality\n";
  for (const auto& r : rows) {
    out << family_name(r.family) << "," << r.processors << "," << r.threshold << "," << r.distributed_pnl << ","
        << r.local_pnl << "," << optimality_name(r.optimality) << "\n";
  }
  return out.str();
}

nlohmann::json to_json(const SolveResult& result, const AllocationProblem& problem) {
  nlohmann::json doc;
  doc["cost"] = to_json(result.cost);
  doc["optimality"] = optimality_name(result.optimality);
  doc["stats"] = {{"nodes", result.stats.nodes}, {"seed", result.stats.seed}};
  doc["network"] = {{"capacities", problem.network.capacities}, {"policy", policy_name(problem.network.policy)}};
  doc["mode"] = mode_name(problem.mode);
  doc["allocation"] = to_json(result.allocation, problem.blocks);
  doc["loads"] = processor_loads(problem.blocks, result.allocation, problem.network.size());
  return doc;
}

}  // namespace dlq
