#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlocal/gates.hpp"

namespace qlocal {

enum class OpKind : std::uint8_t {
  PrepZero,
  PrepMagic,
  Clifford1,
  Clifford2,
  MeasureZ,
  CtrlPauli,
  CtrlOpaque,
};

std::string op_kind_name(OpKind k);

enum class PauliAxis : std::uint8_t { X, Z };

/// One primitive operation of an adaptive circuit layer.
///
/// CtrlPauli applies X or Z to its target controlled on the parity of the
/// listed measurement outcomes; this is the linear-control tier, the only one
/// the generated gadgets and the error-commutation calculus use. CtrlOpaque
/// is a pass-through record for arbitrary efficiently-computable controls; it
/// round-trips through serialization but is rejected by the simulator.
struct PrimOp {
  OpKind kind = OpKind::PrepZero;
  std::uint32_t q0 = 0;
  std::uint32_t q1 = 0;                    // Clifford2 only
  CliffordGate gate = CliffordGate::I;     // Clifford1 / Clifford2
  std::uint32_t outcome_id = 0;            // MeasureZ
  PauliAxis axis = PauliAxis::X;           // CtrlPauli
  std::vector<std::uint32_t> parity_of;    // CtrlPauli
  std::string descriptor;                  // CtrlOpaque

  std::uint8_t arity() const { return kind == OpKind::Clifford2 ? 2 : 1; }

  static PrimOp prep_zero(std::uint32_t q);
  static PrimOp prep_magic(std::uint32_t q);
  static PrimOp clifford1(CliffordGate g, std::uint32_t q);
  static PrimOp clifford2(CliffordGate g, std::uint32_t a, std::uint32_t b);
  static PrimOp measure_z(std::uint32_t q, std::uint32_t outcome_id);
  static PrimOp ctrl_pauli(PauliAxis axis, std::uint32_t q, std::vector<std::uint32_t> parity_of);
  static PrimOp ctrl_opaque(std::uint32_t q, std::string descriptor);

  friend bool operator==(const PrimOp&, const PrimOp&) = default;
};

struct Layer {
  std::vector<PrimOp> ops;
  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Diagnostic {
  int layer = -1;
  int op = -1;
  std::string message;
};

/// Layered adaptive circuit over a fixed qubit register [0, n). Immutable by
/// convention once validated.
struct AdaptiveCircuit {
  std::uint32_t n = 0;
  std::vector<Layer> layers;

  std::size_t depth() const { return layers.size(); }
  bool contains_magic() const;
  std::size_t measurement_count() const;
  std::vector<std::uint32_t> outcome_ids() const;

  friend bool operator==(const AdaptiveCircuit&, const AdaptiveCircuit&) = default;
};

/// Checks every structural invariant (target ranges, per-layer support
/// disjointness, outcome uniqueness and causality, gate arities). Returns all
/// violations; an empty result means the circuit is valid.
std::vector<Diagnostic> validate(const AdaptiveCircuit& circuit);

bool is_valid(const AdaptiveCircuit& circuit);

/// A pairing of all n qubits of one layer, together with the ops assigned to
/// each pair (zero, one, or two PrimOps re-targeted at pair members).
struct LayerPairing {
  struct PairOps {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::vector<PrimOp> ops;  // original targets; supports are subsets of {a,b}
  };
  std::vector<PairOps> pairs;
};

/// Decomposes one layer into a pairing of [n] with a two-qubit operation per
/// pair: two-qubit ops keep their pair, single-qubit ops are merged in
/// ascending qubit order, leftover idle qubits are paired ascending with
/// identity ops. Requires n even.
LayerPairing extract_layer_pairing(const Layer& layer, std::uint32_t n);

/// Incremental construction helper used by the gadget generators.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::uint32_t n) { circuit_.n = n; }

  std::uint32_t fresh_outcome_id() { return next_outcome_id_++; }
  void reserve_outcome_ids(std::uint32_t first_free) {
    if (first_free > next_outcome_id_) next_outcome_id_ = first_free;
  }

  void begin_layer() { pending_.emplace(); }
  void add(PrimOp op);
  void end_layer();
  /// Appends a whole single-op layer.
  void add_layer(PrimOp op);

  std::uint32_t num_qubits() const { return circuit_.n; }
  std::size_t layer_count() const { return circuit_.layers.size(); }
  AdaptiveCircuit take();

 private:
  AdaptiveCircuit circuit_;
  std::optional<Layer> pending_;
  std::uint32_t next_outcome_id_ = 0;
};

}  // namespace qlocal
