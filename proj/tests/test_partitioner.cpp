#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dlq/partitioner.h"

using namespace dlq;

namespace {

const std::string kCircuitPath = std::string(DLQ_DATA_DIR) + "/paired_groups.qc";

ProcessorNetwork strict(std::vector<std::size_t> caps) { return {std::move(caps), CapacityPolicy::Strict}; }

PartitionOptions with_layout(LayoutPreference layout) {
  PartitionOptions o;
  o.layout = layout;
  return o;
}

bool fits(const PartitionPlan& plan) {
  std::vector<CodeBlock> blocks(plan.qubit_names.size(), build_code(plan.family, plan.d));
  return respects_capacity(blocks, plan.allocation, plan.network) ||
         (plan.network.policy == CapacityPolicy::Strict &&
          respects_capacity(blocks, plan.allocation, {plan.network.capacities, CapacityPolicy::Flexible}));
}

std::string random_circuit(std::mt19937_64& rng, std::size_t qubits, std::size_t gates) {
  std::ostringstream out;
  for (std::size_t g = 0; g < gates; ++g) {
    const auto a = rng() % qubits;
    auto b = rng() % qubits;
    if (rng() % 4 == 0) {
      out << "h q" << a << "\n";
      continue;
    }
    if (a == b) b = (b + 1) % qubits;
    out << "cx q" << a << " q" << b << "\n";
  }
  return out.str();
}

}  // namespace

TEST(Parse, Basics) {
  const auto c = parse_circuit("cx 0 1\ncx 2 3");
  EXPECT_EQ(c.qubits.size(), 4u);
  EXPECT_EQ(c.gates.size(), 2u);
  EXPECT_EQ(c.cnot_count(), 2u);
  const auto chain = parse_circuit("h 0\nt 0\nh 0");
  ASSERT_EQ(chain.gates.size(), 3u);
  EXPECT_EQ(chain.qubits.size(), 1u);
  EXPECT_EQ(chain.gates[1].kind, GateKind::T);
  EXPECT_EQ(chain.t_count(), 1u);
  const auto empty = parse_circuit("");
  EXPECT_TRUE(empty.qubits.empty());
  EXPECT_TRUE(empty.gates.empty());
}

TEST(Parse, CommentsAndBlankLines) {
  const auto c = parse_circuit("# header\n\n  cx a b   # trailing\nmeasure a\n");
  EXPECT_EQ(c.gates.size(), 2u);
  EXPECT_EQ(c.gates[0].line, 3u);
  EXPECT_EQ(c.gates[1].kind, GateKind::Measure);
}

TEST(Parse, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse_circuit(text);
    } catch (const CircuitParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("cx 0 1\nfoo 0"), 2u);
  EXPECT_EQ(line_of("h 0 1"), 1u);
  EXPECT_EQ(line_of("cx 0\n"), 1u);
  EXPECT_EQ(line_of("cx 0 0"), 1u);
  EXPECT_EQ(line_of("qubits a b\ncx a b\n\ncx a c"), 4u);
}

TEST(Parse, BundledCircuit) {
  const auto c = load_circuit(kCircuitPath);
  EXPECT_EQ(c.qubits.size(), 4u);
  EXPECT_EQ(c.cnot_count(), 21u);
  EXPECT_THROW(load_circuit("/nonexistent/file.qc"), std::invalid_argument);
}

TEST(InteractionGraph, Weights) {
  const auto c = load_circuit(kCircuitPath);
  const auto g = build_interaction_graph(c);
  EXPECT_EQ(g.weight(0, 1), 10);
  EXPECT_EQ(g.weight(3, 2), 10);
  EXPECT_EQ(g.weight(1, 2), 1);
  EXPECT_EQ(g.weight(0, 3), 0);
  EXPECT_EQ(g.total_weight(), 21);
  EXPECT_EQ(g.cut_weight({0, 0, 1, 1}), 1);
  EXPECT_EQ(g.cut_weight({0, 1, 0, 1}), 21);
  EXPECT_EQ(g.cut_weight({0, 1, 1, 0}), 20);
  EXPECT_EQ(g.cut_weight({0, 0, 0, 0}), 0);
}

TEST(InteractionGraph, NoCnots) {
  const auto g = build_interaction_graph(parse_circuit("h a\nt b\nmeasure a"));
  EXPECT_TRUE(g.weights.empty());
  EXPECT_EQ(g.vertices, 2u);
}

TEST(InteractionGraph, WeightsSumToCnotCount) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = parse_circuit(random_circuit(rng, 6, 40));
    EXPECT_EQ(build_interaction_graph(c).total_weight(), static_cast<Cost>(c.cnot_count()));
  }
}

TEST(Partition, TwoProcessorsOfTwoBlocks) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7);
  EXPECT_EQ(plan.total_pnl(), 31);
  EXPECT_EQ(evaluate_plan(plan, c).pnl_total, plan.predicted_cost.pnl_total);
  EXPECT_EQ(plan.groups[0], plan.groups[1]);
  EXPECT_EQ(plan.groups[2], plan.groups[3]);
  EXPECT_NE(plan.groups[0], plan.groups[2]);
}

TEST(Partition, FourLocalBlocks) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7,
                              with_layout(LayoutPreference::ForceLocal));
  EXPECT_EQ(plan.total_pnl(), 651);
  EXPECT_EQ(evaluate_plan(plan, c).pnl_total, 651);
}

TEST(Partition, FourProcessorsDistributedPairs) {
  const auto c = load_circuit(kCircuitPath);
  for (auto layout : {LayoutPreference::ForceDistributed, LayoutPreference::Auto}) {
    const auto plan = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7, with_layout(layout));
    EXPECT_EQ(plan.total_pnl(), 591);
    EXPECT_EQ(evaluate_plan(plan, c).pnl_total, plan.predicted_cost.pnl_total);
    EXPECT_TRUE(fits(plan));
  }
}

TEST(Partition, ZeroCutCircuitIsFree) {
  const auto c = parse_circuit("cx a b\ncx c d\ncx a b\nh c");
  const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7);
  EXPECT_EQ(plan.total_pnl(), 0);
  EXPECT_EQ(plan.predicted_cost.pnl_syndrome, 0);
  EXPECT_EQ(plan.predicted_cost.pnl_transversal, 0);
}

TEST(Partition, TGatesCostedThroughCodeSwitching) {
  const auto c = parse_circuit("h 0\nt 0\nh 0");
  const auto plan = partition(c, strict({61}), CodeFamily::Hex488, 7);
  EXPECT_EQ(plan.predicted_cost.pnl_total, 0);
  EXPECT_EQ(plan.t_gate_pnl, 62);
}

TEST(Partition, InfeasibleNamesGroup) {
  const auto c = load_circuit(kCircuitPath);
  try {
    partition(c, strict({61, 61}), CodeFamily::Hex488, 7);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("q"), std::string::npos);
  }
}

TEST(Partition, InvariantUnderRenaming) {
  const auto c = load_circuit(kCircuitPath);
  std::ostringstream renamed;
  renamed << "qubits w x y z\n";
  const std::vector<std::string> names = {"z", "w", "y", "x"};
  for (const auto& g : c.gates) {
    renamed << "cx " << names[g.operands[0]] << " " << names[g.operands[1]] << "\n";
  }
  const auto c2 = parse_circuit(renamed.str());
  for (auto caps : {std::vector<std::size_t>{122, 122}, std::vector<std::size_t>{61, 61, 61, 61}}) {
    EXPECT_EQ(partition(c, strict(caps), CodeFamily::Hex488, 7).total_pnl(),
              partition(c2, strict(caps), CodeFamily::Hex488, 7).total_pnl());
  }
}

TEST(Partition, AutoNeverWorseThanForcedLayouts) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const auto c = parse_circuit(random_circuit(rng, 4, 12));
    const auto net = strict({26, 26, 26, 26});
    const auto best = partition(c, net, CodeFamily::Hex488, 3).total_pnl();
    for (auto layout : {LayoutPreference::ForceLocal, LayoutPreference::ForceDistributed}) {
      try {
        EXPECT_LE(best, partition(c, net, CodeFamily::Hex488, 3, with_layout(layout)).total_pnl());
      } catch (const InfeasibleError&) {
      }
    }
  }
}

TEST(Partition, PredictedCostMatchesReevaluation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const auto c = parse_circuit(random_circuit(rng, 5, 15));
    const auto plan = partition(c, strict({39, 39, 39, 39}), CodeFamily::Hex666, 3);
    EXPECT_EQ(evaluate_plan(plan, c).pnl_total, plan.predicted_cost.pnl_total);
    EXPECT_TRUE(fits(plan));
  }
}

TEST(Partition, DeterministicForSeed) {
  const auto c = load_circuit(kCircuitPath);
  const auto a = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7);
  const auto b = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Refine, ZeroRoundsIsIdentity) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7);
  const auto r = iterative_refine(plan, c, strict({61, 61, 61, 61}), 0);
  EXPECT_EQ(to_json(r.plan).dump(), to_json(plan).dump());
  EXPECT_EQ(r.increase, 0);
  EXPECT_EQ(r.rounds_applied, 0u);
  EXPECT_THROW(iterative_refine(plan, c, strict({61, 61, 61, 61}), -1), std::invalid_argument);
}

TEST(Refine, TwoToFourProcessors) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7);
  const auto r = iterative_refine(plan, c, strict({61, 61, 61, 61}), 3);
  EXPECT_EQ(r.cost_before, 31);
  EXPECT_EQ(r.cost_after, 591);
  EXPECT_EQ(r.increase, 560);
  EXPECT_GE(r.rounds_applied, 1u);
  EXPECT_TRUE(fits(r.plan));
  EXPECT_EQ(evaluate_plan(r.plan, c).pnl_total, r.plan.predicted_cost.pnl_total);
}

TEST(Refine, ToleranceStopsExpensiveRounds) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7);
  const auto r = iterative_refine(plan, c, strict({61, 61, 61, 61}), 3, 1.0);
  EXPECT_TRUE(r.stopped_by_tolerance);
  EXPECT_EQ(r.cost_after, 31);
}

TEST(Refine, NeverViolatesCapacity) {
  const auto c = load_circuit(kCircuitPath);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    PartitionOptions opts;
    opts.seed = seed;
    const auto plan = partition(c, strict({122, 122}), CodeFamily::Hex488, 7, opts);
    const auto r = iterative_refine(plan, c, strict({61, 61, 61, 61}), 2, std::numeric_limits<double>::infinity(), opts);
    EXPECT_TRUE(fits(r.plan)) << "seed " << seed;
  }
}

TEST(Diagnostics, AllLocalPlan) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7,
                              with_layout(LayoutPreference::ForceLocal));
  const auto diag = balance_diagnostic(plan, c);
  EXPECT_EQ(diag.linear_cost_share, 0);
  EXPECT_GT(diag.quadratic_cost_share, 0);
  EXPECT_FALSE(diag.balanced);
}

TEST(Diagnostics, DistributedWithoutCut) {
  const auto c = parse_circuit("cx a b\ncx a b");
  const auto plan = partition(c, strict({61, 61}), CodeFamily::Hex488, 7);
  const auto diag = balance_diagnostic(plan, c);
  EXPECT_EQ(diag.quadratic_cost_share, 0);
  EXPECT_EQ(diag.cut_gate_count, 0u);
}

TEST(Diagnostics, DistributedPairsLayout) {
  const auto c = load_circuit(kCircuitPath);
  const auto plan = partition(c, strict({61, 61, 61, 61}), CodeFamily::Hex488, 7);
  const auto diag = balance_diagnostic(plan, c);
  EXPECT_EQ(diag.linear_cost_share, 560);
  EXPECT_EQ(diag.quadratic_cost_share, 31);
  EXPECT_NEAR(diag.ratio, 560.0 / 31.0, 1e-9);
  EXPECT_FALSE(diag.balanced);
  EXPECT_EQ(diag.cut_gate_count, 1u);
  EXPECT_NEAR(diag.intra_gate_fraction, 20.0 / 21.0, 1e-12);
}

TEST(Serialization, PlanJson) {
  const auto c = load_circuit(kCircuitPath);
  const auto doc = to_json(partition(c, strict({122, 122}), CodeFamily::Hex488, 7));
  for (const char* key : {"groups", "layouts", "allocations", "predicted_cost", "diagnostics"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
}
