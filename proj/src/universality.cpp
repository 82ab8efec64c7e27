#include "dlq/universality.h"

#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dlq/allocator.h"

namespace dlq {

namespace {

double data_qubits(const UniversalityParams& params) {
  return params.n_data ? *params.n_data
                       : static_cast<double>(expected_data_qubits(CodeFamily::Hex488, params.d));
}

std::int64_t physical_per_processor(const UniversalityParams& params, int logical) {
  const auto n = static_cast<std::int64_t>(std::llround(data_qubits(params)));
  return logical * (2 * n - 1);
}

StrategyEstimate make(Strategy s, const UniversalityParams& params, double pnl, int logical) {
  StrategyEstimate e;
  e.strategy = s;
  e.mode = params.mode;
  e.pnl_total = pnl;
  e.logical_qubits_per_processor = logical;
  e.physical_qubits_per_processor = physical_per_processor(params, logical);
  return e;
}

void check_common(const UniversalityParams& params) {
  if (params.d < 1 || params.d % 2 == 0) throw std::invalid_argument("Distance must be odd and positive");
  if (params.n_T < 0) throw std::invalid_argument("n_T must be non-negative");
  if (params.beta < 0 || params.gamma < 0 || params.avg_cut_weight_3d < 0 || params.msd_rounds < 0 ||
      params.rounds_3d < 0) {
    throw std::invalid_argument("Universality constants must be non-negative");
  }
}

}  // namespace

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::MSD_FullyDistributed: return "MSD_FullyDistributed";
    case Strategy::MSD_FullyLocal: return "MSD_FullyLocal";
    case Strategy::MSD_Mixed: return "MSD_Mixed";
    case Strategy::CodeSwitch_LocalBlock: return "CodeSwitch_LocalBlock";
    case Strategy::CodeSwitch_Distributed: return "CodeSwitch_Distributed";
    case Strategy::GaugeFix: return "GaugeFix";
    case Strategy::DynamicSwap: return "DynamicSwap";
  }
  return "?";
}

std::int64_t msd_invocations(int n_r, bool count_all_levels) {
  if (n_r < 1) throw std::invalid_argument("Distillation needs at least one round");
  std::int64_t power = 1;
  for (int i = 0; i < n_r; ++i) power *= 5;
  return count_all_levels ? (power - 1) / 4 : power / 5;
}

double default_cut_cost(int d) {
  static std::mutex lock;
  static std::map<int, double> cache;
  {
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
  }
  const auto problem = split_problem(CodeFamily::Hex488, d, 2);
  const auto result = d <= 9 ? solve_exact(problem, 60.0) : solve_heuristic(problem, 0, 5000);
  const double value = static_cast<double>(result.cost.pnl_syndrome) / 2.0;
  std::lock_guard<std::mutex> guard(lock);
  cache[d] = value;
  return value;
}

std::vector<StrategyEstimate> msd_estimate(const UniversalityParams& params) {
  check_common(params);
  const auto invocations = static_cast<double>(msd_invocations(params.n_r, params.count_all_levels));
  const double n_T = static_cast<double>(params.n_T);
  const double c_cut = params.n_T == 0 ? 0.0 : (params.c_cut ? *params.c_cut : default_cut_cost(params.d));
  const double n = data_qubits(params);
  return {make(Strategy::MSD_FullyDistributed, params, n_T * invocations * params.msd_rounds * c_cut, 3),
          make(Strategy::MSD_FullyLocal, params, n_T * n, 5), make(Strategy::MSD_Mixed, params, n_T * n, 3)};
}

std::vector<StrategyEstimate> code_switch_estimate(const UniversalityParams& params) {
  check_common(params);
  if (params.d < 5) throw std::invalid_argument("Code switching needs d >= 5");
  const double n_T = static_cast<double>(params.n_T);
  const double d2 = static_cast<double>(params.d) * params.d;
  const double cut_checks = params.beta * d2;
  double per_t = 0.0;
  switch (params.mode) {
    case MeasurementMode::Standard: per_t = cut_checks * params.avg_cut_weight_3d / 2.0; break;
    case MeasurementMode::AncillaTeleport: per_t = 2.0 * cut_checks; break;
    case MeasurementMode::AncillaSwap: per_t = 3.0 * cut_checks; break;
  }
  return {make(Strategy::CodeSwitch_LocalBlock, params, n_T * 2.0 * data_qubits(params), 1),
          make(Strategy::CodeSwitch_Distributed, params, n_T * params.rounds_3d * per_t, 1)};
}

StrategyEstimate gauge_fix_estimate(const UniversalityParams& params) {
  check_common(params);
  const double d = params.d;
  return make(Strategy::GaugeFix, params, static_cast<double>(params.n_T) * params.gamma * d * d * d, 1);
}

DynamicSwapEstimate dynamic_swap_estimate(const CodeBlock& block, const std::vector<int>& block_assignment,
                                          int chain_length, double per_gate_alt_cost, MoveKind kind) {
  if (chain_length < 0) throw std::invalid_argument("Chain length must be non-negative");
  std::map<int, std::size_t> sides;
  for (std::size_t q = 0; q < block.n; ++q) {
    if (q >= block_assignment.size() || block_assignment[q] < 0) {
      throw AllocationIncompleteError("Data qubit " + std::to_string(q) + " has no processor");
    }
    ++sides[block_assignment[q]];
  }
  if (sides.size() > 2) throw std::invalid_argument("Dynamic swaps are unsupported for blocks on more than 2 processors");
  std::size_t moved = 0;
  if (sides.size() == 2) moved = std::min(sides.begin()->second, std::next(sides.begin())->second);

  DynamicSwapEstimate out;
  out.moved = moved;
  const double per_qubit = kind == MoveKind::Swap ? 3.0 : 2.0;
  out.estimate.strategy = Strategy::DynamicSwap;
  out.estimate.mode = kind == MoveKind::Swap ? MeasurementMode::AncillaSwap : MeasurementMode::AncillaTeleport;
  out.estimate.pnl_total = 2.0 * per_qubit * static_cast<double>(moved);
  out.estimate.logical_qubits_per_processor = 1;
  out.estimate.physical_qubits_per_processor = static_cast<std::int64_t>(block.physical_count());
  if (out.estimate.pnl_total == 0.0) {
    out.break_even_length = 0;
    out.beneficial = true;
  } else if (per_gate_alt_cost <= 0.0) {
    out.break_even_length = 0;
    out.beneficial = false;
  } else {
    out.break_even_length = static_cast<int>(std::floor(out.estimate.pnl_total / per_gate_alt_cost)) + 1;
    out.beneficial = out.estimate.pnl_total < chain_length * per_gate_alt_cost;
  }
  return out;
}

int code_switch_crossover(UniversalityParams params, int d_lo, int d_hi) {
  int crossover = 0;
  for (int d = d_hi - (d_hi % 2 == 0 ? 1 : 0); d >= std::max(d_lo, 5); d -= 2) {
    params.d = d;
    const auto e = code_switch_estimate(params);
    if (e[1].pnl_total < e[0].pnl_total) {
      crossover = d;
    } else {
      break;
    }
  }
  return crossover;
}

std::vector<UniversalityRow> universality_table(const std::string& strategy, const std::vector<int>& d_list,
                                                const std::vector<int>& nr_list, const UniversalityParams& base) {
  static const std::set<std::string> known = {"all", "msd", "code-switch", "gauge-fix", "dynamic-swap"};
  if (!known.count(strategy)) throw std::invalid_argument("Unknown strategy '" + strategy + "'");
  auto wants = [&](const std::string& s) { return strategy == "all" || strategy == s; };
  std::vector<UniversalityRow> rows;
  for (int d : d_list) {
    UniversalityParams p = base;
    p.d = d;
    for (int n_r : nr_list) {
      p.n_r = n_r;
      if (wants("msd")) {
        for (const auto& e : msd_estimate(p)) {
          rows.push_back({e.strategy, d, n_r, p.mode, e.pnl_total, e.logical_qubits_per_processor});
        }
      }
      if (wants("code-switch") && d >= 5) {
        for (const auto& e : code_switch_estimate(p)) {
          rows.push_back({e.strategy, d, n_r, p.mode, e.pnl_total, e.logical_qubits_per_processor});
        }
      }
      if (wants("gauge-fix")) {
        const auto e = gauge_fix_estimate(p);
        rows.push_back({e.strategy, d, n_r, p.mode, e.pnl_total, e.logical_qubits_per_processor});
      }
      if (wants("dynamic-swap")) {
        // Equal split of one 4.8.8 block: the smaller side holds (n-1)/2 data qubits.
        const double n = p.n_data ? *p.n_data : static_cast<double>(expected_data_qubits(CodeFamily::Hex488, d));
        const double moved = std::floor(n / 2.0);
        const double per_qubit = p.mode == MeasurementMode::AncillaSwap ? 3.0 : 2.0;
        rows.push_back({Strategy::DynamicSwap, d, n_r, p.mode, 2.0 * per_qubit * moved, 1});
      }
    }
  }
  return rows;
}

std::string format_number(double value) {
  std::ostringstream out;
  if (std::floor(value) == value && std::fabs(value) < 1e15) {
    out << static_cast<long long>(value);
  } else {
    out.precision(10);
    out << value;
  }
  return out.str();
}

std::string universality_csv(const std::vector<UniversalityRow>& rows) {
  std::ostringstream out;
  out << "strategy,d,n_r,mode,pnl,logical_per_proc\n";
  for (const auto& r : rows) {
    out << strategy_name(r.strategy) << "," << r.d << "," << r.n_r << "," << mode_name(r.mode) << ","
        << format_number(r.pnl) << "," << r.logical_per_proc << "\n";
  }
  return out.str();
}

}  // namespace dlq
