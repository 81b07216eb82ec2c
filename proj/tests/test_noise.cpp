#include "qlocal/noise.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "qlocal/errors.hpp"
#include "qlocal/stabsim.hpp"
#include "support/test_util.hpp"

namespace qlocal {
namespace {

TEST(NoiseStrength, RangeValidated) {
  EXPECT_THROW(NoiseStrength(-0.1), PreconditionError);
  EXPECT_THROW(NoiseStrength(1.5), PreconditionError);
  EXPECT_EQ(NoiseStrength(0.25).p, 0.25);
}

TEST(IidSampler, ZeroAndOneStrength) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    EXPECT_TRUE(sample_iid_noise(16, NoiseStrength(0.0), rng).is_identity());
    EXPECT_EQ(sample_iid_noise(16, NoiseStrength(1.0), rng).support_weight(), 16u);
  }
}

TEST(IidSampler, PairInclusionProbabilityMatchesPSquared) {
  Rng rng(0x1d5eed);
  const std::uint32_t n = 100;
  const double p = 0.1;
  const int trials = 100000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    PauliOp e = sample_iid_noise(n, NoiseStrength(p), rng);
    if (e.in_support(3) && e.in_support(17)) ++hits;
  }
  double emp = static_cast<double>(hits) / trials;
  double sigma = std::sqrt(p * p * (1 - p * p) / trials);
  EXPECT_NEAR(emp, p * p, 3 * sigma);
}

TEST(BurstSampler, StaysWithinClaimedStrength) {
  Rng rng(0xb0b);
  const double p = 0.15;
  std::vector<PauliOp> samples;
  for (int t = 0; t < 20000; ++t) samples.push_back(sample_burst_noise(32, NoiseStrength(p), rng));
  Rng rng2(0xb0b2);
  auto report = estimate_ls_bound(samples, NoiseStrength(p), 3, 40, rng2);
  EXPECT_TRUE(report.pass);
}

TEST(LsBound, AllIdentitySamplesPass) {
  std::vector<PauliOp> samples(100, PauliOp::identity(10));
  Rng rng(5);
  auto report = estimate_ls_bound(samples, NoiseStrength(0.5), 2, 10, rng);
  EXPECT_TRUE(report.pass);
}

TEST(LsBound, IidSamplesPassAtTheirOwnStrength) {
  // The i.i.d. sampler saturates the defining inequality with equality, so a
  // one-sided 3-sigma gate over a hundred subsets would trip on noise alone;
  // the check at equality uses the wider 4-sigma tolerance knob.
  Rng rng(0x900d);
  std::vector<PauliOp> samples;
  for (int t = 0; t < 10000; ++t) samples.push_back(sample_iid_noise(48, NoiseStrength(0.05), rng));
  Rng rng2(0x900e);
  auto report = estimate_ls_bound(samples, NoiseStrength(0.05), 3, 50, rng2, 4.0);
  EXPECT_TRUE(report.pass);
}

TEST(LsBound, UndersoldStrengthFailsAtSizeOne) {
  Rng rng(0xbad);
  std::vector<PauliOp> samples;
  for (int t = 0; t < 10000; ++t) samples.push_back(sample_iid_noise(48, NoiseStrength(0.2), rng));
  Rng rng2(0xbad2);
  auto report = estimate_ls_bound(samples, NoiseStrength(0.05), 2, 30, rng2);
  EXPECT_FALSE(report.pass);
  bool size_one_failed = false;
  for (const auto& row : report.rows) {
    if (row.subset_size == 1 && !row.pass) size_one_failed = true;
  }
  EXPECT_TRUE(size_one_failed);
}

TEST(LsBound, EmptySamplesRejected) {
  std::vector<PauliOp> none;
  Rng rng(6);
  EXPECT_THROW(estimate_ls_bound(none, NoiseStrength(0.1), 2, 10, rng), PreconditionError);
}

TEST(LsBound, CsvHasFixedColumnOrder) {
  std::vector<PauliOp> samples(10, PauliOp::identity(4));
  Rng rng(7);
  auto report = estimate_ls_bound(samples, NoiseStrength(0.1), 2, 3, rng);
  EXPECT_EQ(report.to_csv().substr(0, 57), "trial_block,subset_size,subset,empirical_prob,bound,pass\n");
}

TEST(StrengthRules, ClosedFormValues) {
  EXPECT_NEAR(strength_product_dependent(NoiseStrength(0.01), NoiseStrength(0.01)).p, 0.2, 1e-15);
  EXPECT_EQ(strength_product_dependent(NoiseStrength(0), NoiseStrength(0)).p, 0.0);
  EXPECT_EQ(strength_product_dependent(NoiseStrength(0.25), NoiseStrength(0.01)).p, 1.0);

  EXPECT_EQ(strength_clifford(NoiseStrength(0)).p, 0.0);
  EXPECT_NEAR(strength_clifford(NoiseStrength(0.02)).p, 0.2, 1e-15);
  EXPECT_EQ(strength_clifford(NoiseStrength(0.5)).p, 1.0);

  EXPECT_NEAR(strength_product_disjoint(NoiseStrength(0.01), NoiseStrength(0.01)).p, 0.1, 1e-15);
  EXPECT_EQ(strength_product_disjoint(NoiseStrength(0), NoiseStrength(0)).p, 0.0);
  EXPECT_NEAR(strength_product_disjoint(NoiseStrength(0.04), NoiseStrength(0.01)).p, 0.2, 1e-15);

  EXPECT_EQ(strength_adaptive(NoiseStrength(0), 3).p, 0.0);
  EXPECT_NEAR(strength_adaptive(NoiseStrength(std::pow(2.0, -16)), 1).p, 0.25, 1e-15);
  EXPECT_NEAR(strength_adaptive(NoiseStrength(std::pow(2.0, -32)), 2).p, 0.25, 1e-15);

  EXPECT_EQ(strength_entanglement_swap(NoiseStrength(0), 2).p, 0.0);
  EXPECT_NEAR(strength_entanglement_swap(NoiseStrength(std::pow(2.0, -33)), 2).p, 0.25, 1e-15);

  EXPECT_EQ(strength_teleport(NoiseStrength(0)).p, 0.0);
  EXPECT_NEAR(strength_teleport(NoiseStrength(std::pow(2.0, -17))).p, 1.0, 1e-12);
  EXPECT_NEAR(strength_teleport(NoiseStrength(std::pow(2.0, -25))).p, 0.5, 1e-15);
}

TEST(StrengthRules, SwapChainMatchesRepeatedSqrtOracle) {
  // k=3: p' = 4 * (2p)^(1/16); 1/16 computed by four exact square roots.
  double p = 0.001;
  double oracle = 2.0 * p;
  for (int i = 0; i < 4; ++i) oracle = std::sqrt(oracle);
  oracle *= 4.0;
  double got = strength_entanglement_swap(NoiseStrength(p), 3).p;
  EXPECT_NEAR(got, std::min(1.0, oracle), 1e-12);
}

TEST(StrengthRules, MonotoneZeroAndClamped) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    double p = rng.next_unit();
    double q = rng.next_unit();
    if (p > q) std::swap(p, q);
    EXPECT_LE(strength_clifford(NoiseStrength(p)).p, strength_clifford(NoiseStrength(q)).p);
    EXPECT_LE(strength_adaptive(NoiseStrength(p), 2).p, strength_adaptive(NoiseStrength(q), 2).p);
    EXPECT_LE(strength_entanglement_swap(NoiseStrength(p), 4).p,
              strength_entanglement_swap(NoiseStrength(q), 4).p);
    EXPECT_LE(strength_teleport(NoiseStrength(p)).p, strength_teleport(NoiseStrength(q)).p);
    EXPECT_LE(strength_teleport(NoiseStrength(q)).p, 1.0);
  }
}

LinearControl teleport_control() {
  // One output qubit; correction X^(z1) Z^(z2) from two measured qubits.
  LinearControl ctrl(1, 2);
  ctrl.A.set(0, 0, true);
  ctrl.B.set(0, 1, true);
  return ctrl;
}

TEST(CommuteThroughAdaptive, IdentityAndInvisibleZ) {
  LinearControl ctrl = teleport_control();
  PauliOp e = PauliOp::identity(3);
  EXPECT_TRUE(commute_through_adaptive(e, ctrl).is_identity());
  // Z on measured qubits is invisible: e2 = 0.
  e = multiply_unsigned(PauliOp::single(3, 1, 'Z'), PauliOp::single(3, 2, 'Z'));
  EXPECT_TRUE(commute_through_adaptive(e, ctrl).is_identity());
  // f1 passes straight through.
  e = PauliOp::single(3, 0, 'Z');
  EXPECT_EQ(commute_through_adaptive(e, ctrl).to_text(), "+Z0");
}

TEST(CommuteThroughAdaptive, TeleportXOnMeasuredQubit) {
  LinearControl ctrl = teleport_control();
  PauliOp e = PauliOp::single(3, 1, 'X');  // X on the first measured qubit
  PauliOp f = commute_through_adaptive(e, ctrl);
  EXPECT_EQ(f.to_text(), "+X0");
  e = PauliOp::single(3, 2, 'X');
  f = commute_through_adaptive(e, ctrl);
  EXPECT_EQ(f.to_text(), "+Z0");
}

TEST(CommuteThroughAdaptive, DimensionMismatchThrows) {
  LinearControl ctrl = teleport_control();
  EXPECT_THROW(commute_through_adaptive(PauliOp::identity(2), ctrl), PreconditionError);
}

// Commutation-exactness oracle: the error-before and derived-error-after noisy
// implementations of the measure-and-correct circuit induce identical joint
// distributions over (outcomes, output state), once the error-before
// outcomes are relabeled by the X-part of E on the measured qubits (an X
// error on a measured qubit IS a bit-flip of its result) and the measured
// registers themselves are discarded from the state. Verified on a maximally
// entangled (reference-coupled) input, which certifies channel equality, for
// every Pauli error.
void check_adaptive_commutation_exact(const LinearControl& ctrl) {
  const std::uint32_t n = ctrl.n1 + ctrl.n2;
  const std::uint32_t total = 2 * n;  // circuit qubits 0..n-1, references n..2n-1

  CircuitBuilder builder(total);
  builder.begin_layer();
  for (std::uint32_t q = 0; q < n; ++q) builder.add(PrimOp::clifford1(CliffordGate::H, n + q));
  builder.end_layer();
  builder.begin_layer();
  for (std::uint32_t q = 0; q < n; ++q) builder.add(PrimOp::clifford2(CliffordGate::CNOT, n + q, q));
  builder.end_layer();
  builder.begin_layer();
  std::vector<std::uint32_t> meas_ids;
  for (std::uint32_t q = 0; q < ctrl.n2; ++q) {
    auto id = builder.fresh_outcome_id();
    builder.add(PrimOp::measure_z(ctrl.n1 + q, id));
    meas_ids.push_back(id);
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::uint32_t r = 0; r < ctrl.n1; ++r) {
    std::vector<std::uint32_t> parity;
    for (std::uint32_t cidx = 0; cidx < ctrl.n2; ++cidx) {
      if (ctrl.A.get(r, cidx)) parity.push_back(meas_ids[cidx]);
    }
    if (!parity.empty()) builder.add(PrimOp::ctrl_pauli(PauliAxis::X, r, parity));
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::uint32_t r = 0; r < ctrl.n1; ++r) {
    std::vector<std::uint32_t> parity;
    for (std::uint32_t cidx = 0; cidx < ctrl.n2; ++cidx) {
      if (ctrl.B.get(r, cidx)) parity.push_back(meas_ids[cidx]);
    }
    if (!parity.empty()) builder.add(PrimOp::ctrl_pauli(PauliAxis::Z, r, parity));
  }
  builder.end_layer();
  AdaptiveCircuit circuit = builder.take();
  const std::size_t depth = circuit.depth();

  std::size_t checked = 0;
  const std::size_t patterns = 1ull << (2 * n);
  for (std::size_t code = 0; code < patterns; ++code) {
    PauliOp e = PauliOp::identity(total);
    for (std::uint32_t q = 0; q < n; ++q) {
      e.set_x(q, (code >> (2 * q)) & 1);
      e.set_z(q, (code >> (2 * q + 1)) & 1);
    }
    PauliOp e_small = PauliOp::identity(n);
    for (std::uint32_t q = 0; q < n; ++q) {
      e_small.set_x(q, e.x(q));
      e_small.set_z(q, e.z(q));
    }
    PauliOp f_small = commute_through_adaptive(e_small, ctrl);
    PauliOp f = PauliOp::identity(total);
    for (std::uint32_t q = 0; q < ctrl.n1; ++q) {
      f.set_x(q, f_small.x(q));
      f.set_z(q, f_small.z(q));
    }

    ErrorSchedule before = ErrorSchedule::all_identity(total, depth);
    before.errors[2] = e;  // after the entangling layers, before measurement
    ErrorSchedule after = ErrorSchedule::all_identity(total, depth);
    after.errors[depth] = f;  // after the whole circuit

    // Kept registers: the n1 output qubits plus every reference qubit.
    std::vector<std::uint32_t> kept;
    for (std::uint32_t q = 0; q < ctrl.n1; ++q) kept.push_back(q);
    for (std::uint32_t q = 0; q < n; ++q) kept.push_back(n + q);

    auto collect = [&](const std::vector<Branch>& branches, bool relabel) {
      std::map<std::string, std::uint64_t> dist;
      std::uint32_t max_k = 0;
      for (const auto& br : branches) max_k = std::max(max_k, br.log2_inv_prob);
      for (const auto& br : branches) {
        std::string key;
        for (std::uint32_t c = 0; c < ctrl.n2; ++c) {
          std::uint8_t bit = br.outcomes.lookup(meas_ids[c]).value();
          if (relabel && e.x(ctrl.n1 + c)) bit ^= 1;
          key += std::to_string(int(bit));
        }
        key += "|";
        for (const auto& gen : br.state.reduced_stabilizers(kept)) key += gen.to_text() + "\n";
        dist[key] += 1ull << (max_k - br.log2_inv_prob);
      }
      return dist;
    };

    auto b1 = run_all_branches(circuit, before);
    auto b2 = run_all_branches(circuit, after);
    ASSERT_EQ(collect(b1, /*relabel=*/true), collect(b2, /*relabel=*/false))
        << "E = " << e_small.to_text();
    ++checked;
  }
  EXPECT_EQ(checked, patterns);
}

TEST(CommuteThroughAdaptive, TeleportControlExactForAll64Errors) {
  check_adaptive_commutation_exact(teleport_control());
}

TEST(CommuteThroughAdaptive, TwoByTwoControlExactForAll256Errors) {
  LinearControl ctrl(2, 2);
  ctrl.A.set(0, 0, true);
  ctrl.A.set(1, 1, true);
  ctrl.B.set(0, 1, true);
  ctrl.B.set(1, 0, true);
  check_adaptive_commutation_exact(ctrl);
}

LinearControl control_from_code(std::uint32_t n1, std::uint32_t n2, std::uint32_t code) {
  LinearControl ctrl(n1, n2);
  std::uint32_t bit = 0;
  for (std::uint32_t r = 0; r < n1; ++r) {
    for (std::uint32_t c = 0; c < n2; ++c) {
      ctrl.A.set(r, c, (code >> bit++) & 1);
      ctrl.B.set(r, c, (code >> bit++) & 1);
    }
  }
  return ctrl;
}

TEST(CommuteThroughAdaptive, ExactForAllSmallControls) {
  // Every (A, B) on the smallest shapes, each against every Pauli error.
  for (std::uint32_t code = 0; code < 4; ++code) {
    check_adaptive_commutation_exact(control_from_code(1, 1, code));
  }
  for (std::uint32_t code = 0; code < 16; ++code) {
    check_adaptive_commutation_exact(control_from_code(1, 2, code));
    check_adaptive_commutation_exact(control_from_code(2, 1, code));
  }
}

TEST(CommuteThroughAdaptive, ExactForSampledTwoByTwoControls) {
  Rng rng(0x22c);
  for (int trial = 0; trial < 20; ++trial) {
    check_adaptive_commutation_exact(control_from_code(2, 2, rng.uniform_u32(256)));
  }
}

TEST(CommuteThroughAdaptive, EmpiricalStrengthWithinAdaptiveBound) {
  // w = 1 teleport-style control, one-sided check of the adaptive strength rule.
  LinearControl ctrl(4, 8);
  for (std::uint32_t r = 0; r < 4; ++r) {
    ctrl.A.set(r, 2 * r, true);
    ctrl.B.set(r, 2 * r + 1, true);
  }
  EXPECT_EQ(ctrl.uniform_row_weight(), 1u);
  const double p = 0.01;
  Rng rng(0xab);
  std::vector<PauliOp> effs;
  for (int t = 0; t < 20000; ++t) {
    PauliOp e = sample_iid_noise(12, NoiseStrength(p), rng);
    effs.push_back(commute_through_adaptive(e, ctrl));
  }
  double bound = strength_adaptive(NoiseStrength(p), 1).p;
  Rng rng2(0xac);
  auto report = estimate_ls_bound(effs, NoiseStrength(bound), 2, 40, rng2);
  EXPECT_TRUE(report.pass);
}

TEST(StrengthComposition, OrderOfDependentAndCliffordRules) {
  Rng rng(0xcafe);
  // Sample E, F; apply (ii) then (iii) and (iii) then (ii); both orders must
  // bound the empirical strength of the conjugated product.
  const double p = 0.02;
  auto layer = testing::random_gate_layer(16, rng);
  std::vector<PauliOp> way1, way2;
  for (int t = 0; t < 20000; ++t) {
    PauliOp e = sample_iid_noise(16, NoiseStrength(p), rng);
    PauliOp f = sample_iid_noise(16, NoiseStrength(p), rng);
    way1.push_back(conjugate_by_layer(multiply_unsigned(e, f), layer));
    way2.push_back(multiply_unsigned(conjugate_by_layer(e, layer), conjugate_by_layer(f, layer)));
  }
  double b1 = strength_clifford(strength_product_dependent(NoiseStrength(p), NoiseStrength(p))).p;
  double b2 =
      strength_product_dependent(strength_clifford(NoiseStrength(p)), strength_clifford(NoiseStrength(p))).p;
  Rng ra(1), rb(2);
  EXPECT_TRUE(estimate_ls_bound(way1, NoiseStrength(b1), 2, 30, ra).pass);
  EXPECT_TRUE(estimate_ls_bound(way2, NoiseStrength(b2), 2, 30, rb).pass);
}

TEST(RobustnessProfile, InvariantsEnforced) {
  EXPECT_THROW(RobustnessProfile(0.0, 1.0, 1.0, 1, 1), PreconditionError);
  EXPECT_THROW(RobustnessProfile(0.5, -1.0, 1.0, 1, 1), PreconditionError);
  EXPECT_THROW(RobustnessProfile(0.5, 1.0, 1.0, 2, 3), PreconditionError);
  RobustnessProfile prof(1.0 / 5004.0, 5004.0, 1.0, 2, 1);
  EXPECT_NEAR(prof.eval(1e-5), 5004e-5, 1e-12);
}

TEST(ParallelRepetition, SingleProfileIsItsOwnBound) {
  RobustnessProfile prof(0.5, 3.0, 1.0, 1, 1);
  std::vector<RobustnessProfile> profiles{prof};
  EXPECT_NEAR(parallel_repetition_bound(profiles, NoiseStrength(0.1), false).p, 0.3, 1e-12);
}

TEST(ParallelRepetition, BellBusFamilyValue) {
  std::vector<RobustnessProfile> profiles(50, RobustnessProfile(1.0 / 5004.0, 5004.0, 1.0, 2, 1));
  double with_r_tilde = parallel_repetition_bound(profiles, NoiseStrength(1e-5), true).p;
  EXPECT_NEAR(with_r_tilde, 0.05004, 1e-12);
  double with_r = parallel_repetition_bound(profiles, NoiseStrength(1e-5), false).p;
  EXPECT_NEAR(with_r, std::sqrt(0.05004), 1e-12);
}

TEST(ParallelRepetition, SquareRootForRTwo) {
  std::vector<RobustnessProfile> profiles(3, RobustnessProfile(1.0, 1.0, 1.0, 2, 2));
  EXPECT_NEAR(parallel_repetition_bound(profiles, NoiseStrength(0.0001), false).p, 0.01, 1e-12);
}

TEST(ParallelRepetition, ThresholdExceededNamesProfile) {
  std::vector<RobustnessProfile> profiles{RobustnessProfile(0.5, 1.0, 1.0, 1, 1),
                                          RobustnessProfile(0.001, 1.0, 1.0, 1, 1)};
  try {
    parallel_repetition_bound(profiles, NoiseStrength(0.01), false);
    FAIL() << "expected ThresholdExceeded";
  } catch (const ThresholdExceeded& ex) {
    EXPECT_EQ(ex.stage, 1);
  }
}

}  // namespace
}  // namespace qlocal
