#include "qlocal/circuit.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

std::string op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::PrepZero: return "prep_zero";
    case OpKind::PrepMagic: return "prep_magic";
    case OpKind::Clifford1: return "clifford1";
    case OpKind::Clifford2: return "clifford2";
    case OpKind::MeasureZ: return "measure_z";
    case OpKind::CtrlPauli: return "ctrl_pauli";
    case OpKind::CtrlOpaque: return "ctrl_opaque";
  }
  return "?";
}

PrimOp PrimOp::prep_zero(std::uint32_t q) {
  PrimOp op;
  op.kind = OpKind::PrepZero;
  op.q0 = q;
  return op;
}

PrimOp PrimOp::prep_magic(std::uint32_t q) {
  PrimOp op;
  op.kind = OpKind::PrepMagic;
  op.q0 = q;
  return op;
}

PrimOp PrimOp::clifford1(CliffordGate g, std::uint32_t q) {
  QLOCAL_ASSERT(!is_two_qubit(g));
  PrimOp op;
  op.kind = OpKind::Clifford1;
  op.q0 = q;
  op.gate = g;
  return op;
}

PrimOp PrimOp::clifford2(CliffordGate g, std::uint32_t a, std::uint32_t b) {
  QLOCAL_ASSERT(is_two_qubit(g));
  PrimOp op;
  op.kind = OpKind::Clifford2;
  op.q0 = a;
  op.q1 = b;
  op.gate = g;
  return op;
}

PrimOp PrimOp::measure_z(std::uint32_t q, std::uint32_t outcome_id) {
  PrimOp op;
  op.kind = OpKind::MeasureZ;
  op.q0 = q;
  op.outcome_id = outcome_id;
  return op;
}

PrimOp PrimOp::ctrl_pauli(PauliAxis axis, std::uint32_t q, std::vector<std::uint32_t> parity_of) {
  PrimOp op;
  op.kind = OpKind::CtrlPauli;
  op.q0 = q;
  op.axis = axis;
  op.parity_of = std::move(parity_of);
  return op;
}

PrimOp PrimOp::ctrl_opaque(std::uint32_t q, std::string descriptor) {
  PrimOp op;
  op.kind = OpKind::CtrlOpaque;
  op.q0 = q;
  op.descriptor = std::move(descriptor);
  return op;
}

bool AdaptiveCircuit::contains_magic() const {
  for (const auto& layer : layers) {
    for (const auto& op : layer.ops) {
      if (op.kind == OpKind::PrepMagic) return true;
    }
  }
  return false;
}

std::size_t AdaptiveCircuit::measurement_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) {
    for (const auto& op : layer.ops) {
      if (op.kind == OpKind::MeasureZ) ++count;
    }
  }
  return count;
}

std::vector<std::uint32_t> AdaptiveCircuit::outcome_ids() const {
  std::vector<std::uint32_t> ids;
  for (const auto& layer : layers) {
    for (const auto& op : layer.ops) {
      if (op.kind == OpKind::MeasureZ) ids.push_back(op.outcome_id);
    }
  }
  return ids;
}

std::vector<Diagnostic> validate(const AdaptiveCircuit& circuit) {
  std::vector<Diagnostic> out;
  std::unordered_set<std::uint32_t> defined_outcomes;
  auto report = [&](int layer, int op, std::string msg) {
    out.push_back(Diagnostic{layer, op, std::move(msg)});
  };

  for (std::size_t t = 0; t < circuit.layers.size(); ++t) {
    const Layer& layer = circuit.layers[t];
    std::unordered_set<std::uint32_t> touched;
    std::unordered_set<std::uint32_t> new_outcomes;
    for (std::size_t k = 0; k < layer.ops.size(); ++k) {
      const PrimOp& op = layer.ops[k];
      int ti = static_cast<int>(t), ki = static_cast<int>(k);
      auto touch = [&](std::uint32_t q) {
        if (q >= circuit.n) {
          report(ti, ki, fmt::format("target {} out of range (n={})", q, circuit.n));
          return;
        }
        if (!touched.insert(q).second) {
          report(ti, ki, fmt::format("qubit {} used twice within layer {}", q, t));
        }
      };
      touch(op.q0);
      switch (op.kind) {
        case OpKind::Clifford1:
          if (is_two_qubit(op.gate)) report(ti, ki, "two-qubit gate in a clifford1 op");
          break;
        case OpKind::Clifford2:
          touch(op.q1);
          if (!is_two_qubit(op.gate)) report(ti, ki, "one-qubit gate in a clifford2 op");
          if (op.q0 == op.q1) report(ti, ki, "clifford2 targets must differ");
          break;
        case OpKind::MeasureZ:
          if (defined_outcomes.count(op.outcome_id) || new_outcomes.count(op.outcome_id)) {
            report(ti, ki, fmt::format("outcome id {} already defined", op.outcome_id));
          }
          new_outcomes.insert(op.outcome_id);
          break;
        case OpKind::CtrlPauli:
          if (op.parity_of.empty()) {
            report(ti, ki, "ctrl_pauli with empty parity set");
          }
          for (auto id : op.parity_of) {
            if (!defined_outcomes.count(id)) {
              report(ti, ki, fmt::format("ctrl_pauli references outcome {} not produced by an earlier layer", id));
            }
          }
          break;
        default:
          break;
      }
    }
    defined_outcomes.insert(new_outcomes.begin(), new_outcomes.end());
  }
  return out;
}

bool is_valid(const AdaptiveCircuit& circuit) { return validate(circuit).empty(); }

LayerPairing extract_layer_pairing(const Layer& layer, std::uint32_t n) {
  if (n % 2 != 0) {
    throw PreconditionError(fmt::format("extract_layer_pairing requires even n, got {}", n));
  }
  LayerPairing result;
  std::vector<bool> paired(n, false);
  std::vector<const PrimOp*> single_op_of(n, nullptr);
  std::vector<std::uint32_t> singles;

  for (const auto& op : layer.ops) {
    QLOCAL_ASSERT(op.q0 < n && (op.arity() == 1 || op.q1 < n));
    if (op.arity() == 2) {
      QLOCAL_ASSERT(!paired[op.q0] && !paired[op.q1]);
      paired[op.q0] = paired[op.q1] = true;
      result.pairs.push_back({op.q0, op.q1, {op}});
    } else {
      QLOCAL_ASSERT(single_op_of[op.q0] == nullptr && !paired[op.q0]);
      single_op_of[op.q0] = &op;
    }
  }
  for (std::uint32_t q = 0; q < n; ++q) {
    if (single_op_of[q] != nullptr) singles.push_back(q);
  }
  // Merge single-qubit ops pairwise by ascending index; a leftover single
  // merges with the lowest idle qubit.
  std::size_t i = 0;
  for (; i + 1 < singles.size(); i += 2) {
    std::uint32_t a = singles[i], b = singles[i + 1];
    paired[a] = paired[b] = true;
    result.pairs.push_back({a, b, {*single_op_of[a], *single_op_of[b]}});
  }
  if (i < singles.size()) {
    std::uint32_t a = singles[i];
    paired[a] = true;
    std::uint32_t idle = n;
    for (std::uint32_t q = 0; q < n; ++q) {
      if (!paired[q]) {
        idle = q;
        break;
      }
    }
    QLOCAL_ASSERT(idle < n);
    paired[idle] = true;
    result.pairs.push_back({a, idle, {*single_op_of[a]}});
  }
  // Remaining idle qubits, ascending, with identity ops.
  std::vector<std::uint32_t> idle;
  for (std::uint32_t q = 0; q < n; ++q) {
    if (!paired[q]) idle.push_back(q);
  }
  QLOCAL_ASSERT(idle.size() % 2 == 0);
  for (std::size_t k = 0; k + 1 < idle.size(); k += 2) {
    result.pairs.push_back({idle[k], idle[k + 1], {}});
  }
  return result;
}

void CircuitBuilder::add(PrimOp op) {
  QLOCAL_ASSERT(pending_.has_value());
  if (op.kind == OpKind::MeasureZ && op.outcome_id >= next_outcome_id_) {
    next_outcome_id_ = op.outcome_id + 1;
  }
  pending_->ops.push_back(std::move(op));
}

void CircuitBuilder::end_layer() {
  QLOCAL_ASSERT(pending_.has_value());
  if (!pending_->ops.empty()) {
    circuit_.layers.push_back(std::move(*pending_));
  }
  pending_.reset();
}

void CircuitBuilder::add_layer(PrimOp op) {
  begin_layer();
  add(std::move(op));
  end_layer();
}

AdaptiveCircuit CircuitBuilder::take() {
  QLOCAL_ASSERT(!pending_.has_value());
  return std::move(circuit_);
}

}  // namespace qlocal
