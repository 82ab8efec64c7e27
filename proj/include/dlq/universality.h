#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlq/codes.h"
#include "dlq/costmodel.h"

namespace dlq {

enum class Strategy {
  MSD_FullyDistributed,
  MSD_FullyLocal,
  MSD_Mixed,
  CodeSwitch_LocalBlock,
  CodeSwitch_Distributed,
  GaugeFix,
  DynamicSwap
};

struct UniversalityParams {
  int d = 7;
  int n_r = 1;
  MeasurementMode mode = MeasurementMode::Standard;
  std::int64_t n_T = 1;
  // Per-round cut cost of one distributed 4.8.8 block; unset means ask the allocator.
  std::optional<double> c_cut;
  // Data qubits of the 2D self-dual code; unset means the 4.8.8 count.
  std::optional<double> n_data;
  double beta = 0.5;              // cut 3D checks = beta * d^2
  double avg_cut_weight_3d = 8.0;
  double gamma = 1.0;             // 3D block size = gamma * d^3
  int msd_rounds = 7;             // extraction rounds per 5-to-1 invocation
  int rounds_3d = 1;
  // false: 5^(n_r-1) invocations per output; true: all levels, (5^n_r - 1)/4.
  bool count_all_levels = false;
};

struct StrategyEstimate {
  Strategy strategy = Strategy::MSD_FullyLocal;
  MeasurementMode mode = MeasurementMode::Standard;
  double pnl_total = 0.0;
  int logical_qubits_per_processor = 0;
  std::int64_t physical_qubits_per_processor = 0;
};

enum class MoveKind { Swap, Teleport };

struct DynamicSwapEstimate {
  StrategyEstimate estimate;
  std::size_t moved = 0;
  int break_even_length = 0;  // smallest chain length that pays for the moves
  bool beneficial = false;
};

std::string strategy_name(Strategy strategy);

std::int64_t msd_invocations(int n_r, bool count_all_levels = false);

// Half the optimal two-block equal-split cost for 4.8.8 at distance d (cached).
double default_cut_cost(int d);

std::vector<StrategyEstimate> msd_estimate(const UniversalityParams& params);

// LocalBlock followed by Distributed in params.mode.
std::vector<StrategyEstimate> code_switch_estimate(const UniversalityParams& params);

StrategyEstimate gauge_fix_estimate(const UniversalityParams& params);

DynamicSwapEstimate dynamic_swap_estimate(const CodeBlock& block, const std::vector<int>& block_assignment,
                                          int chain_length, double per_gate_alt_cost, MoveKind kind);

// Smallest d in [d_lo, d_hi] from which Distributed stays below LocalBlock; 0 if none.
int code_switch_crossover(UniversalityParams params, int d_lo, int d_hi);

struct UniversalityRow {
  Strategy strategy;
  int d;
  int n_r;
  MeasurementMode mode;
  double pnl;
  int logical_per_proc;
};

std::vector<UniversalityRow> universality_table(const std::string& strategy, const std::vector<int>& d_list,
                                                const std::vector<int>& nr_list, const UniversalityParams& base);
std::string universality_csv(const std::vector<UniversalityRow>& rows);

std::string format_number(double value);

}  // namespace dlq
