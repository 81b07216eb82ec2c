#include "qlocal/circuit.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "qlocal/circuit_json.hpp"
#include "qlocal/errors.hpp"
#include "qlocal/rng.hpp"
#include "support/dense.hpp"
#include "support/test_util.hpp"

namespace qlocal {
namespace {

AdaptiveCircuit bell_circuit() {
  CircuitBuilder b(2);
  b.begin_layer();
  b.add(PrimOp::prep_zero(0));
  b.add(PrimOp::prep_zero(1));
  b.end_layer();
  b.add_layer(PrimOp::clifford1(CliffordGate::H, 0));
  b.add_layer(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  return b.take();
}

TEST(CircuitValidate, EmptyCircuitIsValid) {
  AdaptiveCircuit c;
  c.n = 4;
  EXPECT_TRUE(is_valid(c));
  EXPECT_EQ(c.depth(), 0u);
}

TEST(CircuitValidate, OverlappingSupportsReported) {
  AdaptiveCircuit c;
  c.n = 2;
  Layer layer;
  layer.ops.push_back(PrimOp::clifford1(CliffordGate::H, 0));
  layer.ops.push_back(PrimOp::clifford1(CliffordGate::X, 0));
  c.layers.push_back(layer);
  auto diags = validate(c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].layer, 0);
  EXPECT_EQ(diags[0].op, 1);
}

TEST(CircuitValidate, FutureOutcomeReferenceIsCausalityViolation) {
  AdaptiveCircuit c;
  c.n = 2;
  Layer l0, l1;
  l0.ops.push_back(PrimOp::ctrl_pauli(PauliAxis::X, 0, {7}));
  l1.ops.push_back(PrimOp::measure_z(1, 7));
  c.layers.push_back(l0);
  c.layers.push_back(l1);
  auto diags = validate(c);
  ASSERT_FALSE(diags.empty());
  EXPECT_NE(diags[0].message.find("outcome 7"), std::string::npos);
}

TEST(CircuitValidate, SameLayerOutcomeReferenceIsAlsoRejected) {
  AdaptiveCircuit c;
  c.n = 2;
  Layer l;
  l.ops.push_back(PrimOp::measure_z(1, 3));
  l.ops.push_back(PrimOp::ctrl_pauli(PauliAxis::Z, 0, {3}));
  c.layers.push_back(l);
  EXPECT_FALSE(is_valid(c));
}

TEST(CircuitValidate, DuplicateOutcomeIdsRejected) {
  AdaptiveCircuit c;
  c.n = 2;
  Layer l0, l1;
  l0.ops.push_back(PrimOp::measure_z(0, 1));
  l1.ops.push_back(PrimOp::measure_z(1, 1));
  c.layers.push_back(l0);
  c.layers.push_back(l1);
  EXPECT_FALSE(is_valid(c));
}

TEST(CircuitDepth, CountsLayers) {
  EXPECT_EQ(bell_circuit().depth(), 3u);
}

TEST(LayerPairing, TwoQubitOpKeepsItsPair) {
  Layer l;
  l.ops.push_back(PrimOp::clifford2(CliffordGate::CNOT, 0, 1));
  auto lp = extract_layer_pairing(l, 2);
  ASSERT_EQ(lp.pairs.size(), 1u);
  EXPECT_EQ(lp.pairs[0].a, 0u);
  EXPECT_EQ(lp.pairs[0].b, 1u);
  EXPECT_EQ(lp.pairs[0].ops.size(), 1u);
}

TEST(LayerPairing, SinglesMergeAscendingAndIdlesFill) {
  Layer l;
  l.ops.push_back(PrimOp::clifford1(CliffordGate::H, 0));
  l.ops.push_back(PrimOp::clifford1(CliffordGate::H, 3));
  auto lp = extract_layer_pairing(l, 4);
  ASSERT_EQ(lp.pairs.size(), 2u);
  EXPECT_EQ(lp.pairs[0].a, 0u);
  EXPECT_EQ(lp.pairs[0].b, 3u);
  EXPECT_EQ(lp.pairs[0].ops.size(), 2u);
  EXPECT_EQ(lp.pairs[1].a, 1u);
  EXPECT_EQ(lp.pairs[1].b, 2u);
  EXPECT_TRUE(lp.pairs[1].ops.empty());
}

TEST(LayerPairing, FullyIdleLayerPairsAscending) {
  Layer l;
  auto lp = extract_layer_pairing(l, 4);
  ASSERT_EQ(lp.pairs.size(), 2u);
  EXPECT_EQ(lp.pairs[0].a, 0u);
  EXPECT_EQ(lp.pairs[0].b, 1u);
  EXPECT_EQ(lp.pairs[1].a, 2u);
  EXPECT_EQ(lp.pairs[1].b, 3u);
}

TEST(LayerPairing, OddQubitCountRejected) {
  Layer l;
  EXPECT_THROW(extract_layer_pairing(l, 3), PreconditionError);
}

TEST(LayerPairing, EveryQubitAppearsExactlyOnce) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    AdaptiveCircuit c = testing::random_adaptive_circuit(8, 4, 3, rng);
    for (const auto& layer : c.layers) {
      auto lp = extract_layer_pairing(layer, 8);
      std::vector<int> seen(8, 0);
      for (const auto& p : lp.pairs) {
        seen[p.a]++;
        seen[p.b]++;
      }
      for (int count : seen) EXPECT_EQ(count, 1);
    }
  }
}

// Tensor reconstruction: re-applying each pair's ops yields the same unitary
// as the original layer (unitary layers only).
TEST(LayerPairing, TensorReconstructionMatchesLayerUnitary) {
  Rng rng(123);
  for (int trial = 0; trial < 40; ++trial) {
    Layer l;
    std::vector<bool> used(4, false);
    for (std::uint32_t q = 0; q < 4; ++q) {
      if (used[q] || rng.next_bit()) continue;
      if (q + 1 < 4 && !used[q + 1] && rng.next_bit()) {
        l.ops.push_back(PrimOp::clifford2(testing::random_2q_gate(q, q + 1, rng).gate, q, q + 1));
        used[q] = used[q + 1] = true;
      } else {
        l.ops.push_back(PrimOp::clifford1(testing::random_1q_gate(q, rng).gate, q));
        used[q] = true;
      }
    }
    auto lp = extract_layer_pairing(l, 4);
    auto u_layer = testing::cmat_identity(16);
    for (const auto& op : l.ops) {
      GateInstance g{op.gate, op.q0, op.q1};
      u_layer = testing::cmat_mul(testing::gate_matrix_n(g, 4), u_layer);
    }
    auto u_pairs = testing::cmat_identity(16);
    for (const auto& p : lp.pairs) {
      for (const auto& op : p.ops) {
        GateInstance g{op.gate, op.q0, op.q1};
        u_pairs = testing::cmat_mul(testing::gate_matrix_n(g, 4), u_pairs);
      }
    }
    EXPECT_TRUE(testing::cmat_close(u_layer, u_pairs));
  }
}

TEST(CircuitJson, RoundTripIsByteIdentical) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    AdaptiveCircuit c = testing::random_adaptive_circuit(6, 5, 4, rng);
    std::string once = serialize_circuit(c);
    AdaptiveCircuit parsed = parse_circuit(once);
    EXPECT_EQ(parsed, c);
    EXPECT_EQ(serialize_circuit(parsed), once);
  }
}

TEST(CircuitJson, OpaqueControlRoundTrips) {
  AdaptiveCircuit c;
  c.n = 2;
  Layer l0, l1;
  l0.ops.push_back(PrimOp::measure_z(0, 0));
  l1.ops.push_back(PrimOp::ctrl_opaque(1, "majority-vote(v1)"));
  c.layers.push_back(l0);
  c.layers.push_back(l1);
  EXPECT_TRUE(is_valid(c));
  AdaptiveCircuit parsed = parse_circuit(serialize_circuit(c));
  EXPECT_EQ(parsed, c);
}

TEST(CircuitJson, MalformedDocumentsThrowParseError) {
  EXPECT_THROW(parse_circuit("{"), ParseError);
  EXPECT_THROW(parse_circuit("{\"version\":\"nope\",\"n\":2,\"layers\":[]}"), ParseError);
  EXPECT_THROW(parse_circuit("{\"version\":\"qlocal-circuit-v1\",\"n\":2}"), ParseError);
}

TEST(CircuitJson, GoldenFilesParseAndReserializeExactly) {
  namespace fs = std::filesystem;
  fs::path dir(QLOCAL_GOLDEN_DIR);
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    AdaptiveCircuit c = parse_circuit(text);
    EXPECT_TRUE(is_valid(c)) << entry.path();
    EXPECT_EQ(serialize_circuit(c), text) << entry.path();
  }
  EXPECT_EQ(seen, 3);
}

TEST(CircuitJson, MagicPrepIsRepresentable) {
  AdaptiveCircuit c;
  c.n = 1;
  Layer l;
  l.ops.push_back(PrimOp::prep_magic(0));
  c.layers.push_back(l);
  EXPECT_TRUE(is_valid(c));
  EXPECT_TRUE(c.contains_magic());
  EXPECT_EQ(parse_circuit(serialize_circuit(c)), c);
}

}  // namespace
}  // namespace qlocal
