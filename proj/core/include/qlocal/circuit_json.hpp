#pragma once

#include <string>

#include "qlocal/circuit.hpp"

namespace qlocal {

inline constexpr const char* kCircuitFormatVersion = "qlocal-circuit-v1";

/// Canonical JSON interchange form (sorted keys, two-space indent, trailing
/// newline). serialize(parse(serialize(c))) is byte-identical to
/// serialize(c).
std::string serialize_circuit(const AdaptiveCircuit& circuit);

/// Throws ParseError on malformed documents.
AdaptiveCircuit parse_circuit(const std::string& json_text);

}  // namespace qlocal
