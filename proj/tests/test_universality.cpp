#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "dlq/codes.h"
#include "dlq/universality.h"

using namespace dlq;

namespace {

UniversalityParams base(int d, MeasurementMode mode = MeasurementMode::Standard) {
  UniversalityParams p;
  p.d = d;
  p.mode = mode;
  return p;
}

double n488(int d) { return (static_cast<double>(d) * d + 2.0 * d - 1.0) / 2.0; }

std::vector<int> equal_split(const CodeBlock& block) {
  std::vector<int> a(block.physical_count(), 0);
  for (std::size_t q = 0; q < block.n / 2; ++q) a[q] = 1;
  return a;
}

}  // namespace

TEST(Msd, FullyLocalMatchesTransversalBaseline) {
  auto p = base(7);
  p.c_cut = 14.0;
  const auto e = msd_estimate(p);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].strategy, Strategy::MSD_FullyDistributed);
  EXPECT_EQ(e[1].strategy, Strategy::MSD_FullyLocal);
  EXPECT_EQ(e[2].strategy, Strategy::MSD_Mixed);
  EXPECT_DOUBLE_EQ(e[1].pnl_total, 31.0);
  EXPECT_DOUBLE_EQ(e[0].pnl_total, 1.0 * 7 * 14.0);
}

TEST(Msd, ExponentialInRounds) {
  for (auto mode : {MeasurementMode::Standard, MeasurementMode::AncillaTeleport}) {
    auto p = base(9, mode);
    p.c_cut = 17.0;
    double previous = 0.0;
    for (int n_r = 1; n_r <= 6; ++n_r) {
      p.n_r = n_r;
      const double v = msd_estimate(p)[0].pnl_total;
      if (n_r > 1) EXPECT_DOUBLE_EQ(v / previous, 5.0);
      previous = v;
    }
  }
}

TEST(Msd, LinearInCutCost) {
  auto p = base(11);
  p.n_r = 2;
  p.c_cut = 10.0;
  const double a = msd_estimate(p)[0].pnl_total;
  p.c_cut = 30.0;
  EXPECT_DOUBLE_EQ(msd_estimate(p)[0].pnl_total, 3.0 * a);
}

TEST(Msd, InvocationCounts) {
  EXPECT_EQ(msd_invocations(1), 1);
  EXPECT_EQ(msd_invocations(3), 25);
  EXPECT_EQ(msd_invocations(1, true), 1);
  EXPECT_EQ(msd_invocations(3, true), 31);
  EXPECT_THROW(msd_invocations(0), std::invalid_argument);
}

TEST(Msd, NoTGatesCostNothing) {
  auto p = base(7);
  p.n_T = 0;
  for (const auto& e : msd_estimate(p)) EXPECT_EQ(e.pnl_total, 0.0);
  EXPECT_EQ(gauge_fix_estimate(p).pnl_total, 0.0);
  for (const auto& e : code_switch_estimate(p)) EXPECT_EQ(e.pnl_total, 0.0);
}

TEST(Msd, QubitsPerProcessor) {
  auto p = base(7);
  p.c_cut = 14.0;
  const auto e = msd_estimate(p);
  EXPECT_EQ(e[0].logical_qubits_per_processor, 3);
  EXPECT_EQ(e[1].logical_qubits_per_processor, 5);
  EXPECT_EQ(e[2].logical_qubits_per_processor, 3);
  EXPECT_EQ(e[1].physical_qubits_per_processor, 5 * 61);
}

TEST(Msd, CrossoverAtDistanceTwentyOne) {
  auto p = base(21);
  const double c_cut = default_cut_cost(21);
  EXPECT_GT(c_cut, 0.0);
  int crossover = 0;
  for (int n_r = 1; n_r <= 10 && crossover == 0; ++n_r) {
    p.n_r = n_r;
    const auto e = msd_estimate(p);
    if (e[0].pnl_total > e[1].pnl_total) crossover = n_r;
  }
  ASSERT_GT(crossover, 0);
  for (int n_r = crossover; n_r <= crossover + 3; ++n_r) {
    p.n_r = n_r;
    const auto e = msd_estimate(p);
    EXPECT_GT(e[0].pnl_total, e[1].pnl_total);
  }
}

TEST(Msd, RejectsZeroRounds) {
  auto p = base(7);
  p.n_r = 0;
  EXPECT_THROW(msd_estimate(p), std::invalid_argument);
}

TEST(CodeSwitch, StandardNeverBeatsLocal) {
  for (int d = 5; d <= 25; d += 2) {
    const auto e = code_switch_estimate(base(d));
    EXPECT_EQ(e[0].strategy, Strategy::CodeSwitch_LocalBlock);
    EXPECT_GE(e[1].pnl_total, e[0].pnl_total) << "d=" << d;
    EXPECT_DOUBLE_EQ(e[0].pnl_total, 2.0 * n488(d));
  }
}

TEST(CodeSwitch, TeleportWinsFromCrossover) {
  const auto params = base(7, MeasurementMode::AncillaTeleport);
  const int d_star = code_switch_crossover(params, 5, 25);
  ASSERT_GT(d_star, 0);
  for (int d = d_star; d <= 25; d += 2) {
    const auto e = code_switch_estimate(base(d, MeasurementMode::AncillaTeleport));
    EXPECT_LT(e[1].pnl_total, e[0].pnl_total) << "d=" << d;
  }
  EXPECT_EQ(code_switch_crossover(base(7), 5, 25), 0);
}

TEST(CodeSwitch, TeleportNotAboveSwap) {
  for (int d = 5; d <= 25; d += 2) {
    EXPECT_LE(code_switch_estimate(base(d, MeasurementMode::AncillaTeleport))[1].pnl_total,
              code_switch_estimate(base(d, MeasurementMode::AncillaSwap))[1].pnl_total);
  }
}

TEST(CodeSwitch, NoCutChecksMeansNoDistributedCost) {
  auto p = base(9, MeasurementMode::AncillaSwap);
  p.beta = 0.0;
  EXPECT_EQ(code_switch_estimate(p)[1].pnl_total, 0.0);
}

TEST(CodeSwitch, RejectsSmallDistance) {
  EXPECT_THROW(code_switch_estimate(base(3)), std::invalid_argument);
}

TEST(GaugeFix, CubicScaling) {
  EXPECT_DOUBLE_EQ(gauge_fix_estimate(base(3)).pnl_total, 27.0);
  double previous_gap = 1e9;
  for (int d = 11; d <= 1001; d = 2 * d + 1) {
    const double ratio = gauge_fix_estimate(base(2 * d + 1)).pnl_total / gauge_fix_estimate(base(d)).pnl_total;
    const double gap = std::fabs(ratio - 8.0);
    EXPECT_LT(gap, previous_gap);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 0.02);
}

TEST(GaugeFix, OutgrowsLocalCodeSwitch) {
  double previous = 0.0;
  for (int d = 5; d <= 51; d += 2) {
    const auto p = base(d);
    const double ratio = gauge_fix_estimate(p).pnl_total / code_switch_estimate(p)[0].pnl_total;
    EXPECT_GT(ratio, previous);
    previous = ratio;
  }
}

TEST(DynamicSwap, AlreadyLocal) {
  const auto block = build_code(CodeFamily::Hex488, 7);
  const std::vector<int> a(block.physical_count(), 0);
  const auto e = dynamic_swap_estimate(block, a, 0, 31.0, MoveKind::Teleport);
  EXPECT_EQ(e.moved, 0u);
  EXPECT_EQ(e.estimate.pnl_total, 0.0);
  EXPECT_TRUE(e.beneficial);
}

TEST(DynamicSwap, EqualSplitDistanceSeven) {
  const auto block = build_code(CodeFamily::Hex488, 7);
  const auto a = equal_split(block);
  const auto e = dynamic_swap_estimate(block, a, 1, 31.0, MoveKind::Teleport);
  EXPECT_EQ(e.moved, 15u);
  // Each moved qubit is teleported out and back; one teleport spends 2 PNL operations.
  double counted = 0.0;
  for (std::size_t q = 0; q < e.moved; ++q) {
    for (int leg = 0; leg < 2; ++leg) counted += 2.0;
  }
  EXPECT_DOUBLE_EQ(e.estimate.pnl_total, counted);
  EXPECT_DOUBLE_EQ(e.estimate.pnl_total, 60.0);
  EXPECT_EQ(e.break_even_length, 2);
  EXPECT_FALSE(e.beneficial);
  EXPECT_TRUE(dynamic_swap_estimate(block, a, 2, 31.0, MoveKind::Teleport).beneficial);
}

TEST(DynamicSwap, SwapOverTeleportRatio) {
  for (int d : {3, 5, 7, 9}) {
    const auto block = build_code(CodeFamily::Hex666, d);
    const auto a = equal_split(block);
    const auto s = dynamic_swap_estimate(block, a, 4, 20.0, MoveKind::Swap);
    const auto t = dynamic_swap_estimate(block, a, 4, 20.0, MoveKind::Teleport);
    EXPECT_DOUBLE_EQ(s.estimate.pnl_total / t.estimate.pnl_total, 1.5);
  }
}

TEST(DynamicSwap, RejectsThreeProcessors) {
  const auto block = build_code(CodeFamily::Hex488, 5);
  std::vector<int> a(block.physical_count(), 0);
  a[0] = 1;
  a[1] = 2;
  EXPECT_THROW(dynamic_swap_estimate(block, a, 3, 17.0, MoveKind::Swap), std::invalid_argument);
}

TEST(DynamicSwap, MonotoneInLength) {
  const auto block = build_code(CodeFamily::Hex488, 9);
  const auto a = equal_split(block);
  bool was_beneficial = false;
  for (int L = 0; L <= 10; ++L) {
    const bool now = dynamic_swap_estimate(block, a, L, 31.0, MoveKind::Swap).beneficial;
    EXPECT_TRUE(now || !was_beneficial);
    was_beneficial = now;
  }
}

TEST(Properties, MonotoneInTGatesAndDistance) {
  for (auto mode : {MeasurementMode::Standard, MeasurementMode::AncillaTeleport, MeasurementMode::AncillaSwap}) {
    UniversalityParams p = base(7, mode);
    p.c_cut = 14.0;
    auto totals = [](const UniversalityParams& q) {
      std::vector<double> out;
      for (const auto& e : msd_estimate(q)) out.push_back(e.pnl_total);
      for (const auto& e : code_switch_estimate(q)) out.push_back(e.pnl_total);
      out.push_back(gauge_fix_estimate(q).pnl_total);
      return out;
    };
    auto prev = totals(p);
    for (std::int64_t n_T = 2; n_T <= 5; ++n_T) {
      p.n_T = n_T;
      const auto now = totals(p);
      for (std::size_t i = 0; i < now.size(); ++i) EXPECT_GE(now[i], prev[i]);
      prev = now;
    }
    for (int d = 9; d <= 25; d += 2) {
      p.d = d;
      p.c_cut = 14.0 + d;
      const auto now = totals(p);
      for (std::size_t i = 0; i < now.size(); ++i) EXPECT_GE(now[i], prev[i]);
      prev = now;
    }
  }
}

TEST(Table, CsvShape) {
  auto p = base(7, MeasurementMode::AncillaTeleport);
  p.c_cut = 14.0;
  const auto rows = universality_table("all", {7, 9}, {1, 2}, p);
  const auto csv = universality_csv(rows);
  EXPECT_EQ(csv.rfind("strategy,d,n_r,mode,pnl,logical_per_proc\n", 0), 0u);
  EXPECT_NE(csv.find("MSD_FullyLocal,7,1,teleport,31,5"), std::string::npos);
  EXPECT_NE(csv.find("DynamicSwap,7,1,teleport,60,1"), std::string::npos);
  EXPECT_THROW(universality_table("magic", {7}, {1}, p), std::invalid_argument);
}
