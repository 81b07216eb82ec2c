#include <benchmark/benchmark.h>

#include "qlocal/ftarch.hpp"
#include "qlocal/localize.hpp"
#include "qlocal/noise.hpp"
#include "qlocal/pauli.hpp"
#include "qlocal/routing.hpp"
#include "qlocal/rng.hpp"
#include "qlocal/stabsim.hpp"
#include "support/test_util.hpp"

namespace {

using namespace qlocal;

void BM_Route3D(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Rng rng(0xbe7c);
  Pairing pairing = testing::random_full_floor_pairing(L, rng);
  for (auto _ : state) {
    auto paths = route_3d(L, pairing);
    benchmark::DoNotOptimize(paths);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairing.size()));
}
BENCHMARK(BM_Route3D)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_AssignFloors(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Rng rng(0xf100);
  Pairing pairing = testing::random_full_floor_pairing(L, rng);
  for (auto _ : state) {
    auto floors = assign_floors(L, pairing);
    benchmark::DoNotOptimize(floors);
  }
}
BENCHMARK(BM_AssignFloors)->Arg(8)->Arg(16)->Arg(32);

void BM_PauliMultiply(benchmark::State& state) {
  const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
  Rng rng(0x777);
  PauliOp a = testing::random_pauli(n, rng);
  PauliOp b = testing::random_pauli(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(multiply(a, b));
  }
}
BENCHMARK(BM_PauliMultiply)->Arg(64)->Arg(1024)->Arg(16384);

void BM_TableauRunLocalizedGadget(benchmark::State& state) {
  const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
  CircuitBuilder b(n);
  b.begin_layer();
  for (std::uint32_t q = 0; q + 1 < n; q += 2) b.add(PrimOp::clifford2(CliffordGate::CNOT, q, q + 1));
  b.end_layer();
  LocalizedCircuit lc = localize_ideal(b.take(), LocalizeMode::TwoD);
  Rng rng(3);
  for (auto _ : state) {
    auto result = run(lc.circuit, rng);
    benchmark::DoNotOptimize(result.outcomes);
  }
  state.counters["localized_qubits"] = static_cast<double>(lc.stats.n_total);
}
BENCHMARK(BM_TableauRunLocalizedGadget)->Arg(2)->Arg(4)->Arg(8);

void BM_SurrogateSample(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  Rng rng(0x99);
  Pairing pairing = testing::random_full_floor_pairing(L, rng);
  FTPlan plan = plan_ft_entangle_3d(L, pairing);
  Rng sampler(0x9a);
  for (auto _ : state) {
    benchmark::DoNotOptimize(surrogate_failure_sample(plan, NoiseStrength(1e-5), sampler));
  }
}
BENCHMARK(BM_SurrogateSample)->Arg(2)->Arg(4)->Arg(8);

void BM_CanonicalStabilizers(benchmark::State& state) {
  const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
  Rng rng(0xabc);
  CircuitBuilder b(n);
  for (int layer = 0; layer < 4; ++layer) {
    auto gates = testing::random_gate_layer(n, rng);
    b.begin_layer();
    for (const auto& g : gates) {
      if (is_two_qubit(g.gate)) {
        b.add(PrimOp::clifford2(g.gate, g.q0, g.q1));
      } else {
        b.add(PrimOp::clifford1(g.gate, g.q0));
      }
    }
    b.end_layer();
  }
  auto t = run(b.take(), rng).state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.canonical_stabilizers());
  }
}
BENCHMARK(BM_CanonicalStabilizers)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
