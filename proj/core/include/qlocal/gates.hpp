#pragma once

#include <cstdint>
#include <string_view>

namespace qlocal {

/// The declared finite Clifford generating set. Arbitrary one- and two-qubit
/// Cliffords must be pre-decomposed into these by the caller.
enum class CliffordGate : std::uint8_t {
  I,
  X,
  Y,
  Z,
  H,
  S,
  Sdg,
  CNOT,
  CZ,
  Swap,
};

constexpr bool is_two_qubit(CliffordGate g) {
  return g == CliffordGate::CNOT || g == CliffordGate::CZ || g == CliffordGate::Swap;
}

constexpr std::string_view gate_name(CliffordGate g) {
  switch (g) {
    case CliffordGate::I: return "I";
    case CliffordGate::X: return "X";
    case CliffordGate::Y: return "Y";
    case CliffordGate::Z: return "Z";
    case CliffordGate::H: return "H";
    case CliffordGate::S: return "S";
    case CliffordGate::Sdg: return "Sdg";
    case CliffordGate::CNOT: return "CNOT";
    case CliffordGate::CZ: return "CZ";
    case CliffordGate::Swap: return "SWAP";
  }
  return "?";
}

/// A gate instance with its targets; `q1` is ignored for one-qubit gates.
struct GateInstance {
  CliffordGate gate;
  std::uint32_t q0;
  std::uint32_t q1 = 0;
};

}  // namespace qlocal
