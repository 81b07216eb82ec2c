#include "qlocal/circuit_json.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace {

using nlohmann::json;

json op_to_json(const PrimOp& op) {
  json j;
  j["kind"] = op_kind_name(op.kind);
  j["targets"] = op.arity() == 2 ? json::array({op.q0, op.q1}) : json::array({op.q0});
  switch (op.kind) {
    case OpKind::Clifford1:
    case OpKind::Clifford2:
      j["params"] = {{"gate", std::string(gate_name(op.gate))}};
      break;
    case OpKind::MeasureZ:
      j["outcome_id"] = op.outcome_id;
      break;
    case OpKind::CtrlPauli:
      j["params"] = {{"axis", op.axis == PauliAxis::X ? "X" : "Z"}};
      j["parity_of"] = op.parity_of;
      break;
    case OpKind::CtrlOpaque:
      j["params"] = {{"descriptor", op.descriptor}};
      break;
    default:
      break;
  }
  return j;
}

CliffordGate gate_from_name(const std::string& name) {
  for (auto g : {CliffordGate::I, CliffordGate::X, CliffordGate::Y, CliffordGate::Z, CliffordGate::H,
                 CliffordGate::S, CliffordGate::Sdg, CliffordGate::CNOT, CliffordGate::CZ,
                 CliffordGate::Swap}) {
    if (gate_name(g) == name) return g;
  }
  throw ParseError(fmt::format("unknown Clifford gate '{}'", name));
}

PrimOp op_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("targets")) {
    throw ParseError("op must be an object with 'kind' and 'targets'");
  }
  std::string kind = j.at("kind").get<std::string>();
  std::vector<std::uint32_t> targets = j.at("targets").get<std::vector<std::uint32_t>>();
  auto expect_targets = [&](std::size_t k) {
    if (targets.size() != k) {
      throw ParseError(fmt::format("op '{}' expects {} target(s), got {}", kind, k, targets.size()));
    }
  };
  if (kind == "prep_zero") {
    expect_targets(1);
    return PrimOp::prep_zero(targets[0]);
  }
  if (kind == "prep_magic") {
    expect_targets(1);
    return PrimOp::prep_magic(targets[0]);
  }
  if (kind == "clifford1") {
    expect_targets(1);
    auto g = gate_from_name(j.at("params").at("gate").get<std::string>());
    if (is_two_qubit(g)) throw ParseError("clifford1 with a two-qubit gate");
    return PrimOp::clifford1(g, targets[0]);
  }
  if (kind == "clifford2") {
    expect_targets(2);
    auto g = gate_from_name(j.at("params").at("gate").get<std::string>());
    if (!is_two_qubit(g)) throw ParseError("clifford2 with a one-qubit gate");
    return PrimOp::clifford2(g, targets[0], targets[1]);
  }
  if (kind == "measure_z") {
    expect_targets(1);
    return PrimOp::measure_z(targets[0], j.at("outcome_id").get<std::uint32_t>());
  }
  if (kind == "ctrl_pauli") {
    expect_targets(1);
    std::string axis = j.at("params").at("axis").get<std::string>();
    if (axis != "X" && axis != "Z") throw ParseError(fmt::format("bad ctrl_pauli axis '{}'", axis));
    return PrimOp::ctrl_pauli(axis == "X" ? PauliAxis::X : PauliAxis::Z, targets[0],
                              j.at("parity_of").get<std::vector<std::uint32_t>>());
  }
  if (kind == "ctrl_opaque") {
    expect_targets(1);
    return PrimOp::ctrl_opaque(targets[0], j.at("params").at("descriptor").get<std::string>());
  }
  throw ParseError(fmt::format("unknown op kind '{}'", kind));
}

}  // namespace

std::string serialize_circuit(const AdaptiveCircuit& circuit) {
  json j;
  j["version"] = kCircuitFormatVersion;
  j["n"] = circuit.n;
  j["layers"] = json::array();
  for (const auto& layer : circuit.layers) {
    json jl;
    jl["ops"] = json::array();
    for (const auto& op : layer.ops) jl["ops"].push_back(op_to_json(op));
    j["layers"].push_back(std::move(jl));
  }
  return j.dump(2) + "\n";
}

AdaptiveCircuit parse_circuit(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("circuit JSON parse failure: {}", e.what()));
  }
  try {
    if (!j.is_object()) throw ParseError("circuit document must be a JSON object");
    if (j.at("version").get<std::string>() != kCircuitFormatVersion) {
      throw ParseError(fmt::format("unsupported circuit format version '{}'",
                                   j.at("version").get<std::string>()));
    }
    AdaptiveCircuit circuit;
    circuit.n = j.at("n").get<std::uint32_t>();
    for (const auto& jl : j.at("layers")) {
      Layer layer;
      for (const auto& jop : jl.at("ops")) layer.ops.push_back(op_from_json(jop));
      circuit.layers.push_back(std::move(layer));
    }
    return circuit;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("circuit JSON structure error: {}", e.what()));
  }
}

}  // namespace qlocal
