#include "qlocal/stabsim.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "qlocal/errors.hpp"
#include "support/dense.hpp"
#include "support/test_util.hpp"

namespace qlocal {
namespace {

AdaptiveCircuit prep_and_measure(bool flip) {
  CircuitBuilder b(1);
  b.add_layer(PrimOp::prep_zero(0));
  if (flip) b.add_layer(PrimOp::clifford1(CliffordGate::X, 0));
  b.add_layer(PrimOp::measure_z(0, 0));
  return b.take();
}

AdaptiveCircuit bell_and_measure() {
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  b.begin_layer();
  b.add(PrimOp::measure_z(0, 0));
  b.add(PrimOp::measure_z(1, 1));
  b.end_layer();
  return b.take();
}

TEST(Stabsim, PrepMeasureIsDeterministicZero) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto result = run(prep_and_measure(false), rng);
    EXPECT_EQ(result.outcomes.lookup(0).value(), 0);
  }
}

TEST(Stabsim, XErrorBeforeMeasurementFlipsOutcome) {
  AdaptiveCircuit c;
  c.n = 1;
  Layer l;
  l.ops.push_back(PrimOp::measure_z(0, 0));
  c.layers.push_back(l);
  ErrorSchedule schedule = ErrorSchedule::all_identity(1, 1);
  schedule.errors[0] = PauliOp::single(1, 0, 'X');
  Rng rng(2);
  auto result = run(c, schedule, rng);
  EXPECT_EQ(result.outcomes.lookup(0).value(), 1);
}

TEST(Stabsim, BellMeasurementsAgreeAndMarginalsAreUniform) {
  Rng rng(3);
  AdaptiveCircuit c = bell_and_measure();
  int ones = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto result = run(c, rng);
    auto a = result.outcomes.lookup(0).value();
    auto b = result.outcomes.lookup(1).value();
    ASSERT_EQ(a, b);
    ones += a;
  }
  double sigma = std::sqrt(0.25 * trials);
  EXPECT_NEAR(ones, trials / 2.0, 3 * sigma);
}

TEST(Stabsim, MagicPrepRejected) {
  AdaptiveCircuit c;
  c.n = 1;
  Layer l;
  l.ops.push_back(PrimOp::prep_magic(0));
  c.layers.push_back(l);
  Rng rng(4);
  EXPECT_THROW(run(c, rng), PreconditionError);
}

TEST(Stabsim, ScheduleLengthValidation) {
  AdaptiveCircuit c = bell_and_measure();
  ErrorSchedule bad = ErrorSchedule::all_identity(2, 1);  // depth 3 needs 4 boundaries
  Rng rng(5);
  EXPECT_THROW(run(c, bad, rng), PreconditionError);
}

TEST(Stabsim, GoldenStabilizerGroups) {
  // Bell pair.
  Rng rng(6);
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto result = run(b.take(), rng);
  auto gens = result.state.canonical_stabilizers();
  ASSERT_EQ(gens.size(), 2u);
  EXPECT_EQ(gens[0].to_text(), "+X0 X1");
  EXPECT_EQ(gens[1].to_text(), "+Z0 Z1");

  // |0> x |+>.
  CircuitBuilder b2(2);
  b2.add_layer(PrimOp::clifford1(CliffordGate::H, 1));
  auto r2 = run(b2.take(), rng);
  auto g2 = r2.state.canonical_stabilizers();
  EXPECT_EQ(g2[0].to_text(), "+X1");
  EXPECT_EQ(g2[1].to_text(), "+Z0");

  // GHZ on 3 qubits.
  CircuitBuilder b3(3);
  b3.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b3.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  b3.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 1, 2));
  auto r3 = run(b3.take(), rng);
  auto g3 = r3.state.canonical_stabilizers();
  ASSERT_EQ(g3.size(), 3u);
  EXPECT_EQ(g3[0].to_text(), "+X0 X1 X2");
  EXPECT_EQ(g3[1].to_text(), "+Z0 Z2");  // reduced row echelon: Z0Z1 * Z1Z2
  EXPECT_EQ(g3[2].to_text(), "+Z1 Z2");
}

TEST(Stabsim, FinalStateMatchesDenseOracleOnRandomCircuits) {
  Rng rng(0xacce);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    AdaptiveCircuit c = testing::random_adaptive_circuit(4, 4, 2, rng);
    ErrorSchedule schedule = ErrorSchedule::all_identity(4, c.depth());
    for (auto& e : schedule.errors) e = testing::random_pauli(4, rng);
    auto branches = run_all_branches(c, schedule);
    auto dense = testing::dense_run_branches(c, schedule.errors);
    // Compare exact marginal distributions on all measured ids.
    auto ids = c.outcome_ids();
    auto dyadic = marginal_distribution(branches, ids);
    auto oracle = testing::dense_marginal(dense, ids);
    double denom = std::pow(2.0, dyadic.log2_den);
    for (const auto& [key, num] : dyadic.weights) {
      double p = static_cast<double>(num) / denom;
      ASSERT_TRUE(oracle.count(key)) << key;
      EXPECT_NEAR(oracle[key], p, 1e-9);
      ++checked;
    }
    // Every canonical stabilizer of every branch must fix the corresponding
    // dense state... spot-check the first branch against a matching dense
    // branch by outcome key.
    if (!branches.empty() && !branches[0].outcomes.ordered.empty()) {
      const auto& br = branches[0];
      std::string key = outcome_key(br.outcomes, ids);
      for (const auto& dbr : dense) {
        std::string dkey;
        for (auto id : ids) {
          std::uint8_t bit = 0;
          for (auto it = dbr.outcomes.rbegin(); it != dbr.outcomes.rend(); ++it) {
            if (it->first == id) {
              bit = it->second;
              break;
            }
          }
          dkey += std::to_string(id) + "=" + std::to_string(int(bit)) + ";";
        }
        if (dkey != key) continue;
        for (const auto& gen : br.state.canonical_stabilizers()) {
          auto m = testing::pauli_matrix(gen);
          testing::CVec applied(dbr.state.size(), testing::Cx(0, 0));
          for (std::size_t r = 0; r < m.size(); ++r) {
            for (std::size_t col = 0; col < m.size(); ++col) {
              if (std::abs(m[r][col]) > 1e-14) applied[r] += m[r][col] * dbr.state[col];
            }
          }
          for (std::size_t i = 0; i < applied.size(); ++i) {
            ASSERT_NEAR(std::abs(applied[i] - dbr.state[i]), 0.0, 1e-8);
          }
        }
        break;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Stabsim, BranchProbabilitiesSumToOneExactly) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    AdaptiveCircuit c = testing::random_adaptive_circuit(4, 5, 4, rng);
    auto branches = run_all_branches(c);
    std::uint64_t total = 0;
    std::uint32_t max_k = 0;
    for (const auto& br : branches) max_k = std::max(max_k, br.log2_inv_prob);
    for (const auto& br : branches) total += 1ull << (max_k - br.log2_inv_prob);
    EXPECT_EQ(total, 1ull << max_k);
  }
}

TEST(Stabsim, BranchDistributionCsvDump) {
  Rng rng(0xc5f);
  AdaptiveCircuit c = bell_and_measure();
  auto branches = run_all_branches(c);
  std::vector<std::uint32_t> ids{0, 1};
  auto dist = marginal_distribution(branches, ids);
  std::string csv = dist.to_csv();
  EXPECT_EQ(csv.substr(0, 41), "outcome_string,numerator,log2_denominator");
  EXPECT_NE(csv.find("0=0;1=0;,1,1"), std::string::npos);
  EXPECT_NE(csv.find("0=1;1=1;,1,1"), std::string::npos);
}

TEST(Stabsim, SampledRunsMatchBranchDistribution) {
  Rng rng(9);
  AdaptiveCircuit c = bell_and_measure();
  auto branches = run_all_branches(c);
  std::vector<std::uint32_t> ids{0, 1};
  auto exact = marginal_distribution(branches, ids);
  std::map<std::string, std::uint64_t> counts;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    auto result = run(c, rng);
    counts[outcome_key(result.outcomes, ids)]++;
  }
  EXPECT_LT(tvd_against_counts(exact, counts, trials), 0.02);
}

TEST(Stabsim, BranchBudgetEnforced) {
  CircuitBuilder b(8);
  b.begin_layer();
  for (std::uint32_t q = 0; q < 8; ++q) b.add(PrimOp::clifford1(CliffordGate::H, q));
  b.end_layer();
  b.begin_layer();
  for (std::uint32_t q = 0; q < 8; ++q) b.add(PrimOp::measure_z(q, q));
  b.end_layer();
  AdaptiveCircuit c = b.take();
  EXPECT_THROW(run_all_branches(c, /*max_branches=*/16), BranchBudgetExceeded);
  EXPECT_EQ(run_all_branches(c, 256).size(), 256u);
}

TEST(CheckBell, FreshBellPairPasses) {
  Rng rng(10);
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto result = run(b.take(), rng);
  EXPECT_TRUE(check_bell(result.state, 0, 1));
}

TEST(CheckBell, ProductZeroStateFails) {
  Tableau t(2);
  // |00>: Z stabilizers only; X0 X1 is not in the group.
  EXPECT_FALSE(check_bell(t, 0, 1));
  EXPECT_TRUE(t.group_contains(PauliOp::from_text(2, "Z0 Z1")));
}

TEST(CheckBell, ZErrorFlipsSignAndFails) {
  Rng rng(11);
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto result = run(b.take(), rng);
  result.state.apply_pauli(PauliOp::single(2, 0, 'Z'));
  EXPECT_FALSE(check_bell(result.state, 0, 1));
  // -X0X1 is a stabilizer, +X0X1 is not.
  PauliOp neg_xx = PauliOp::from_text(2, "X0 X1");
  neg_xx.set_negative(true);
  EXPECT_TRUE(result.state.group_contains(neg_xx));
}

TEST(TableauEquivalence, IdentityAndSwappedBell) {
  Rng rng(12);
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto c = b.take();
  auto t1 = run(c, rng).state;
  auto t2 = run(c, rng).state;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ident{{0, 0}, {1, 1}};
  EXPECT_TRUE(tableau_equivalent_under_relabeling(t1, t2, ident));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> swapped{{0, 1}, {1, 0}};
  EXPECT_TRUE(tableau_equivalent_under_relabeling(t1, t2, swapped));
}

TEST(TableauEquivalence, DistinguishesDifferentStates) {
  Tableau zero2(2);
  Rng rng(13);
  CircuitBuilder b(2);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto bell = run(b.take(), rng).state;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ident{{0, 0}, {1, 1}};
  EXPECT_FALSE(tableau_equivalent_under_relabeling(zero2, bell, ident));
}

TEST(TableauEquivalence, EntangledResidualIsInconclusive) {
  Rng rng(14);
  CircuitBuilder b(3);
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 1, 2));
  auto ghz = run(b.take(), rng).state;
  std::vector<std::uint32_t> subset{0, 1};
  EXPECT_THROW(ghz.reduced_stabilizers(subset), PreconditionError);
}

TEST(Stabsim, RelabeledRandomStateThroughReducedGroups) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    AdaptiveCircuit c = testing::random_adaptive_circuit(4, 3, 0, rng);
    auto t1 = run(c, rng).state;
    // Build the same state on shifted qubits of a 6-qubit register.
    CircuitBuilder b(6);
    for (const auto& layer : c.layers) {
      b.begin_layer();
      for (auto op : layer.ops) {
        op.q0 += 2;
        if (op.arity() == 2) op.q1 += 2;
        b.add(op);
      }
      b.end_layer();
    }
    auto t2 = run(b.take(), rng).state;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> mapping;
    for (std::uint32_t q = 0; q < 4; ++q) mapping.emplace_back(q, q + 2);
    EXPECT_TRUE(tableau_equivalent_under_relabeling(t1, t2, mapping));
  }
}

}  // namespace
}  // namespace qlocal
