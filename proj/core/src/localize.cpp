#include "qlocal/localize.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

QubitLayout::QubitLayout(GridGraph graph, std::vector<Vertex> routed)
    : graph_(std::move(graph)), routed_(std::move(routed)) {
  std::vector<bool> seen(graph_.vertex_count(), false);
  for (const auto& v : routed_) {
    std::size_t idx = graph_.index_of(v);
    if (seen[idx]) throw PreconditionError(fmt::format("routed vertex {} repeats", to_string(v)));
    seen[idx] = true;
  }
}

std::uint32_t QubitLayout::total_qubits() const {
  return data_count() * 2 + static_cast<std::uint32_t>(graph_.edge_count()) * 2;
}

std::uint32_t QubitLayout::data_qubit(std::uint32_t j) const {
  QLOCAL_ASSERT(j < data_count());
  return j;
}

std::uint32_t QubitLayout::partner_qubit(std::uint32_t j) const {
  QLOCAL_ASSERT(j < data_count());
  return data_count() + j;
}

std::uint32_t QubitLayout::edge_qubit(std::size_t edge_index, int end) const {
  QLOCAL_ASSERT(edge_index < graph_.edge_count() && (end == 0 || end == 1));
  return 2 * data_count() + static_cast<std::uint32_t>(2 * edge_index) + end;
}

std::uint32_t QubitLayout::edge_qubit_at(std::size_t edge_index, const Vertex& v) const {
  const Edge& e = graph_.edges()[edge_index];
  if (v == e.a) return edge_qubit(edge_index, 0);
  QLOCAL_ASSERT(v == e.b);
  return edge_qubit(edge_index, 1);
}

Vertex QubitLayout::position_of(std::uint32_t qubit) const {
  const std::uint32_t n = data_count();
  if (qubit < n) return routed_[qubit];
  if (qubit < 2 * n) return routed_[qubit - n];
  std::uint32_t rest = qubit - 2 * n;
  const Edge& e = graph_.edges()[rest / 2];
  return rest % 2 == 0 ? e.a : e.b;
}

std::string QubitLayout::role_of(std::uint32_t qubit) const {
  const std::uint32_t n = data_count();
  if (qubit < n) return fmt::format("Q{}", qubit);
  if (qubit < 2 * n) return fmt::format("P{}", qubit - n);
  std::uint32_t rest = qubit - 2 * n;
  return fmt::format("R[e{}@{}]", rest / 2, to_string(position_of(qubit)));
}

namespace {

struct RoutedPair {
  std::uint32_t i;  // receiving side
  std::uint32_t j;  // sending side
  RoutePath path;   // oriented from routed[i] to routed[j]
};

// Routes the index pairing on the layout's grid; 2D grids use the in-floor
// L-shape construction directly, 3D grids embed the pairing into a completed
// bottom-floor pairing.
std::vector<RoutedPair> route_pairs(const QubitLayout& layout, const IndexPairing& pairing) {
  const auto& routed = layout.routed();
  Pairing vertex_pairing;
  for (auto [i, j] : pairing) {
    QLOCAL_ASSERT(i < routed.size() && j < routed.size() && i != j);
    vertex_pairing.pairs.emplace_back(routed[i], routed[j]);
  }
  std::vector<RoutePath> paths;
  if (layout.graph().spec().is_2d()) {
    paths = route_2d(layout.graph().spec().lx, vertex_pairing);
  } else {
    for (auto& sp : route_3d_subset(layout.graph().spec().lx, vertex_pairing)) {
      paths.push_back(sp.concatenated());
    }
  }
  std::vector<RoutedPair> out;
  out.reserve(pairing.size());
  for (std::size_t r = 0; r < pairing.size(); ++r) {
    RoutedPair rp{pairing[r].first, pairing[r].second, std::move(paths[r])};
    QLOCAL_ASSERT(rp.path.vertices.size() >= 2);
    if (rp.path.vertices.front() != routed[rp.i]) {
      std::reverse(rp.path.vertices.begin(), rp.path.vertices.end());
    }
    QLOCAL_ASSERT(rp.path.vertices.front() == routed[rp.i] && rp.path.vertices.back() == routed[rp.j]);
    out.push_back(std::move(rp));
  }
  return out;
}

// Outcome-id pair of one compiled Bell measurement: `z_parity` is the
// measured first (control/H) qubit, `x_parity` the second. The X^a Z^b
// correction on the far register takes a from x_parity ids and b from
// z_parity ids.
struct BellOutcome {
  std::uint32_t z_parity;
  std::uint32_t x_parity;
};

struct PendingBellMeasure {
  std::uint32_t u;
  std::uint32_t v;
  BellOutcome outcome;
};

BellOutcome stage_bell_measure(CircuitBuilder& builder, std::vector<PendingBellMeasure>& staged,
                               std::uint32_t u, std::uint32_t v) {
  BellOutcome o{builder.fresh_outcome_id(), builder.fresh_outcome_id()};
  staged.push_back({u, v, o});
  return o;
}

void flush_bell_measures(CircuitBuilder& builder, std::vector<PendingBellMeasure>& staged) {
  if (staged.empty()) return;
  builder.begin_layer();
  for (const auto& m : staged) builder.add(PrimOp::clifford2(CliffordGate::CNOT, m.u, m.v));
  builder.end_layer();
  builder.begin_layer();
  for (const auto& m : staged) builder.add(PrimOp::clifford1(CliffordGate::H, m.u));
  builder.end_layer();
  builder.begin_layer();
  for (const auto& m : staged) {
    builder.add(PrimOp::measure_z(m.u, m.outcome.z_parity));
    builder.add(PrimOp::measure_z(m.v, m.outcome.x_parity));
  }
  builder.end_layer();
  staged.clear();
}

struct PairEnds {
  std::uint32_t start_reg;  // edge register at routed[i]
  std::uint32_t end_reg;    // edge register at routed[j]
};

// Algorithm steps shared by q_entangle / q_pair / q_pair_inverse: fresh Bell
// pairs on every edge, entanglement swapping along each path, one X- and one
// Z-correction layer. Leaves the long-range pair on the path-end edge
// registers and reports them.
std::vector<PairEnds> emit_entangle_core(CircuitBuilder& builder, const QubitLayout& layout,
                                         const std::vector<RoutedPair>& pairs) {
  const auto& graph = layout.graph();
  builder.begin_layer();
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    builder.add(PrimOp::prep_zero(layout.edge_qubit(e, 0)));
    builder.add(PrimOp::prep_zero(layout.edge_qubit(e, 1)));
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    builder.add(PrimOp::clifford1(CliffordGate::H, layout.edge_qubit(e, 0)));
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    builder.add(PrimOp::clifford2(CliffordGate::CNOT, layout.edge_qubit(e, 0), layout.edge_qubit(e, 1)));
  }
  builder.end_layer();

  std::vector<PairEnds> ends;
  std::vector<std::vector<std::uint32_t>> x_parities(pairs.size()), z_parities(pairs.size());
  std::vector<PendingBellMeasure> staged;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto& verts = pairs[r].path.vertices;
    std::size_t first_edge = graph.edge_index(verts[0], verts[1]);
    std::size_t last_edge = graph.edge_index(verts[verts.size() - 2], verts.back());
    ends.push_back({layout.edge_qubit_at(first_edge, verts[0]), layout.edge_qubit_at(last_edge, verts.back())});
    for (std::size_t m = 1; m + 1 < verts.size(); ++m) {
      std::size_t e_in = graph.edge_index(verts[m - 1], verts[m]);
      std::size_t e_out = graph.edge_index(verts[m], verts[m + 1]);
      auto o = stage_bell_measure(builder, staged, layout.edge_qubit_at(e_in, verts[m]),
                                  layout.edge_qubit_at(e_out, verts[m]));
      z_parities[r].push_back(o.z_parity);
      x_parities[r].push_back(o.x_parity);
    }
  }
  flush_bell_measures(builder, staged);
  builder.begin_layer();
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    if (!x_parities[r].empty()) builder.add(PrimOp::ctrl_pauli(PauliAxis::X, ends[r].end_reg, x_parities[r]));
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    if (!z_parities[r].empty()) builder.add(PrimOp::ctrl_pauli(PauliAxis::Z, ends[r].end_reg, z_parities[r]));
  }
  builder.end_layer();
  return ends;
}

void emit_swap_onto_partners(CircuitBuilder& builder, const QubitLayout& layout,
                             const std::vector<RoutedPair>& pairs, const std::vector<PairEnds>& ends) {
  builder.begin_layer();
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    builder.add(PrimOp::clifford2(CliffordGate::Swap, layout.partner_qubit(pairs[r].i), ends[r].start_reg));
    builder.add(PrimOp::clifford2(CliffordGate::Swap, layout.partner_qubit(pairs[r].j), ends[r].end_reg));
  }
  builder.end_layer();
}

// Teleportation step shared by q_pair (Q_j -> P_i through the pair on
// (P_i, P_j)) and q_pair_inverse (P_i -> far register).
void emit_teleport(CircuitBuilder& builder, const std::vector<std::uint32_t>& sources,
                   const std::vector<std::uint32_t>& bell_near, const std::vector<std::uint32_t>& bell_far) {
  std::vector<PendingBellMeasure> staged;
  std::vector<BellOutcome> outcomes;
  for (std::size_t r = 0; r < sources.size(); ++r) {
    outcomes.push_back(stage_bell_measure(builder, staged, sources[r], bell_near[r]));
  }
  flush_bell_measures(builder, staged);
  builder.begin_layer();
  for (std::size_t r = 0; r < sources.size(); ++r) {
    builder.add(PrimOp::ctrl_pauli(PauliAxis::X, bell_far[r], {outcomes[r].x_parity}));
  }
  builder.end_layer();
  builder.begin_layer();
  for (std::size_t r = 0; r < sources.size(); ++r) {
    builder.add(PrimOp::ctrl_pauli(PauliAxis::Z, bell_far[r], {outcomes[r].z_parity}));
  }
  builder.end_layer();
}

void emit_q_pair(CircuitBuilder& builder, const QubitLayout& layout, const std::vector<RoutedPair>& pairs) {
  auto ends = emit_entangle_core(builder, layout, pairs);
  emit_swap_onto_partners(builder, layout, pairs, ends);
  std::vector<std::uint32_t> sources, near, far;
  for (const auto& rp : pairs) {
    sources.push_back(layout.data_qubit(rp.j));
    near.push_back(layout.partner_qubit(rp.j));
    far.push_back(layout.partner_qubit(rp.i));
  }
  emit_teleport(builder, sources, near, far);
}

void emit_q_pair_inverse(CircuitBuilder& builder, const QubitLayout& layout,
                         const std::vector<RoutedPair>& pairs) {
  auto ends = emit_entangle_core(builder, layout, pairs);
  std::vector<std::uint32_t> sources, near, far;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    sources.push_back(layout.partner_qubit(pairs[r].i));
    near.push_back(ends[r].start_reg);
    far.push_back(ends[r].end_reg);
  }
  emit_teleport(builder, sources, near, far);
  builder.begin_layer();
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    builder.add(PrimOp::clifford2(CliffordGate::Swap, ends[r].end_reg, layout.data_qubit(pairs[r].j)));
  }
  builder.end_layer();
}

}  // namespace

AdaptiveCircuit q_entangle(const QubitLayout& layout, const IndexPairing& pairing) {
  CircuitBuilder builder(layout.total_qubits());
  auto pairs = route_pairs(layout, pairing);
  auto ends = emit_entangle_core(builder, layout, pairs);
  emit_swap_onto_partners(builder, layout, pairs, ends);
  return builder.take();
}

AdaptiveCircuit q_pair(const QubitLayout& layout, const IndexPairing& pairing) {
  CircuitBuilder builder(layout.total_qubits());
  emit_q_pair(builder, layout, route_pairs(layout, pairing));
  return builder.take();
}

AdaptiveCircuit q_pair_inverse(const QubitLayout& layout, const IndexPairing& pairing) {
  CircuitBuilder builder(layout.total_qubits());
  emit_q_pair_inverse(builder, layout, route_pairs(layout, pairing));
  return builder.take();
}

LocalizedCircuit localize_ideal(const AdaptiveCircuit& circuit, LocalizeMode mode) {
  auto diagnostics = validate(circuit);
  if (!diagnostics.empty()) {
    throw PreconditionError(fmt::format("localize_ideal: invalid circuit: layer {} op {}: {}",
                                        diagnostics[0].layer, diagnostics[0].op, diagnostics[0].message));
  }
  const std::uint32_t n_source = circuit.n;
  const std::uint32_t n = n_source + (n_source % 2);

  GridSpec spec = mode == LocalizeMode::TwoD
                      ? GridSpec(static_cast<int>(n), static_cast<int>(n), 1)
                      : [&] {
                          int s = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
                          while (static_cast<std::uint32_t>(s) * s < n) ++s;
                          return GridSpec(s, s, 4 * s);
                        }();
  GridGraph graph = build_grid(spec);
  std::vector<Vertex> routed;
  routed.reserve(n);
  if (mode == LocalizeMode::TwoD) {
    for (std::uint32_t i = 0; i < n; ++i) routed.push_back(Vertex{static_cast<int>(i), static_cast<int>(i), 0});
  } else {
    for (int x = 0; x < spec.lx && routed.size() < n; ++x) {
      for (int y = 0; y < spec.ly && routed.size() < n; ++y) routed.push_back(Vertex{x, y, 0});
    }
  }
  QubitLayout layout(std::move(graph), std::move(routed));

  CircuitBuilder builder(layout.total_qubits());
  std::uint32_t max_id = 0;
  for (auto id : circuit.outcome_ids()) max_id = std::max(max_id, id + 1);
  builder.reserve_outcome_ids(max_id);

  std::vector<LayerProvenance> provenance;
  LocalizeStats stats;
  stats.n_source = n_source;
  stats.n_padded = n;
  stats.n_total = layout.total_qubits();
  stats.source_depth = circuit.depth();

  AdaptiveCircuit out;
  for (std::uint32_t t = 0; t < circuit.layers.size(); ++t) {
    LayerPairing lp = extract_layer_pairing(circuit.layers[t], n);
    IndexPairing pairing;
    for (const auto& p : lp.pairs) pairing.emplace_back(p.a, p.b);
    auto pairs = route_pairs(layout, pairing);
    for (const auto& rp : pairs) stats.max_path_length = std::max(stats.max_path_length, rp.path.length());
    if (mode == LocalizeMode::ThreeD) {
      for (const auto& rp : pairs) {
        for (const auto& v : rp.path.vertices) stats.floors_used = std::max(stats.floors_used, v.z + 1);
      }
    }

    auto record_stage = [&](std::size_t first_layer, const char* stage) {
      for (std::size_t l = first_layer; l < builder.layer_count(); ++l) {
        provenance.push_back({l, t, stage});
      }
    };

    std::size_t mark = builder.layer_count();
    emit_q_pair(builder, layout, pairs);
    record_stage(mark, "pair");

    mark = builder.layer_count();
    builder.begin_layer();
    for (const auto& p : lp.pairs) {
      for (PrimOp op : p.ops) {
        auto remap = [&](std::uint32_t q) {
          QLOCAL_ASSERT(q == p.a || q == p.b);
          return q == p.a ? layout.data_qubit(p.a) : layout.partner_qubit(p.a);
        };
        op.q0 = remap(op.q0);
        if (op.arity() == 2) op.q1 = remap(op.q1);
        builder.add(std::move(op));
      }
    }
    builder.end_layer();
    record_stage(mark, "op");

    mark = builder.layer_count();
    emit_q_pair_inverse(builder, layout, pairs);
    record_stage(mark, "unpair");
  }

  out = builder.take();
  stats.depth = out.depth();
  return LocalizedCircuit{std::move(out), std::move(layout), std::move(provenance), stats};
}

std::vector<Diagnostic> locality_check(const LocalizedCircuit& lc) {
  std::vector<Diagnostic> out;
  for (std::size_t t = 0; t < lc.circuit.layers.size(); ++t) {
    const auto& ops = lc.circuit.layers[t].ops;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const PrimOp& op = ops[k];
      if (op.arity() != 2) continue;
      Vertex a = lc.layout.position_of(op.q0);
      Vertex b = lc.layout.position_of(op.q1);
      int dist = manhattan(a, b);
      if (dist > 1) {
        out.push_back(Diagnostic{static_cast<int>(t), static_cast<int>(k),
                                 fmt::format("op {} on {} and {} spans distance {}", op_kind_name(op.kind),
                                             lc.layout.role_of(op.q0), lc.layout.role_of(op.q1), dist)});
      }
    }
  }
  return out;
}

}  // namespace qlocal
