#pragma once

// Test-side reference implementations that share no code with the library.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "dlq/codes.h"
#include "dlq/costmodel.h"

namespace oracle {

inline std::size_t rank_gf2(std::vector<std::vector<std::uint8_t>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

inline std::vector<std::vector<std::uint8_t>> check_rows(const dlq::CodeBlock& block, dlq::CheckKind kind) {
  std::vector<std::vector<std::uint8_t>> rows;
  for (const auto& c : block.checks) {
    if (c.kind != kind) continue;
    std::vector<std::uint8_t> row(block.n, 0);
    for (auto q : c.support) row[q] = 1;
    rows.push_back(row);
  }
  return rows;
}

// For a self-dual code with even-weight checks and odd n, nontrivial logicals are the odd-weight
// vectors with even overlap on every check. Returns the smallest such weight up to max_weight,
// or 0 when none exists in range.
inline int min_odd_logical_weight(const dlq::CodeBlock& block, int max_weight) {
  std::vector<std::uint64_t> col(block.n, 0);
  std::size_t r = 0;
  for (const auto& c : block.checks) {
    if (c.kind != dlq::CheckKind::X) continue;
    for (auto q : c.support) col[q] |= 1ULL << r;
    ++r;
  }
  const int n = static_cast<int>(block.n);
  for (int w = 1; w <= max_weight && w <= n; w += 2) {
    std::vector<int> idx(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::uint64_t s = 0;
      for (int i : idx) s ^= col[static_cast<std::size_t>(i)];
      if (s == 0) return w;
      int k = w - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - w + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < w; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return 0;
}

inline std::int64_t reference_check_cost(const dlq::Check& c, const std::vector<int>& a, dlq::MeasurementMode mode) {
  const int home = a[c.ancilla];
  if (mode == dlq::MeasurementMode::Standard) {
    std::int64_t n = 0;
    for (auto q : c.support) n += a[q] != home;
    return n;
  }
  std::set<int> procs{home};
  for (auto q : c.support) procs.insert(a[q]);
  return static_cast<std::int64_t>(procs.size() - 1) * (mode == dlq::MeasurementMode::AncillaTeleport ? 2 : 3);
}

struct BruteResult {
  std::int64_t cost = -1;
  std::vector<int> assignment;  // data then ancillas
};

// Exhaustive search over every processor assignment of a single block for one extraction round.
// Enumeration runs in lexicographic order, so the first minimum found is the lex-min one.
inline BruteResult brute_force_single(const dlq::CodeBlock& block, const dlq::ProcessorNetwork& net,
                                      dlq::MeasurementMode mode) {
  const std::size_t N = block.physical_count();
  const std::size_t p = net.size();
  std::vector<int> a(N, 0);
  BruteResult best;
  while (true) {
    std::vector<std::size_t> load(p, 0);
    for (int v : a) ++load[static_cast<std::size_t>(v)];
    bool ok = true;
    for (std::size_t q = 0; q < p; ++q) {
      ok = ok && (net.policy == dlq::CapacityPolicy::Strict ? load[q] == net.capacities[q] : load[q] <= net.capacities[q]);
    }
    if (ok) {
      std::int64_t cost = 0;
      for (const auto& c : block.checks) cost += reference_check_cost(c, a, mode);
      if (best.cost < 0 || cost < best.cost) best = {cost, a};
    }
    std::size_t i = N;
    while (true) {
      if (i == 0) return best;
      --i;
      if (static_cast<std::size_t>(++a[i]) < p) break;
      a[i] = 0;
    }
  }
}

struct RandomInstance {
  dlq::CodeBlock block;
  dlq::ProcessorNetwork network;
  dlq::MeasurementMode mode = dlq::MeasurementMode::Standard;
};

// Random single-block instances with at most 16 physical qubits on 1..3 processors.
inline std::vector<RandomInstance> random_instances(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<dlq::CodeBlock> pool = {dlq::build_code(dlq::CodeFamily::Steane, 3),
                                            dlq::build_code(dlq::CodeFamily::FiveQubitPerfect, 3),
                                            dlq::build_code(dlq::CodeFamily::Hex488, 3)};
  const dlq::MeasurementMode modes[] = {dlq::MeasurementMode::Standard, dlq::MeasurementMode::AncillaTeleport,
                                        dlq::MeasurementMode::AncillaSwap};
  std::vector<RandomInstance> out;
  while (out.size() < count) {
    RandomInstance inst;
    inst.block = pool[rng() % pool.size()];
    const std::size_t p = 1 + rng() % 3;
    const std::size_t total = inst.block.physical_count();
    inst.network.policy = rng() % 2 ? dlq::CapacityPolicy::Strict : dlq::CapacityPolicy::Flexible;
    const std::size_t budget = inst.network.policy == dlq::CapacityPolicy::Strict ? total : total + rng() % 5;
    inst.network.capacities.assign(p, 0);
    for (std::size_t k = 0; k < budget; ++k) ++inst.network.capacities[rng() % p];
    inst.mode = modes[rng() % 3];
    out.push_back(inst);
  }
  return out;
}

// Flattens a single-block allocation as data then ancillas.
inline std::vector<int> flatten(const dlq::Allocation& alloc, const dlq::CodeBlock& block) {
  std::vector<int> out;
  for (std::size_t q = 0; q < block.physical_count(); ++q) out.push_back(static_cast<int>(alloc.assignment[0][q]));
  return out;
}

}  // namespace oracle
