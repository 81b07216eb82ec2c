#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlocal/circuit.hpp"
#include "qlocal/grid.hpp"
#include "qlocal/routing.hpp"

namespace qlocal {

/// Register layout of a localized circuit: a data qubit Q_j and a partner
/// P_j at every routed vertex, plus a register at each end of every grid
/// edge. Total qubit count is 2n + 2|E|.
class QubitLayout {
 public:
  QubitLayout(GridGraph graph, std::vector<Vertex> routed);

  const GridGraph& graph() const { return graph_; }
  const std::vector<Vertex>& routed() const { return routed_; }

  std::uint32_t data_count() const { return static_cast<std::uint32_t>(routed_.size()); }
  std::uint32_t total_qubits() const;

  std::uint32_t data_qubit(std::uint32_t j) const;
  std::uint32_t partner_qubit(std::uint32_t j) const;
  std::uint32_t edge_qubit(std::size_t edge_index, int end) const;  // end 0 = smaller endpoint
  /// The edge register sitting at endpoint `v` of the given edge.
  std::uint32_t edge_qubit_at(std::size_t edge_index, const Vertex& v) const;

  Vertex position_of(std::uint32_t qubit) const;
  std::string role_of(std::uint32_t qubit) const;

 private:
  GridGraph graph_;
  std::vector<Vertex> routed_;
};

/// Pairing of data-qubit indices (each index in [0, n) exactly once across
/// all pairs that appear).
using IndexPairing = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// Pairwise entanglement generation: Bell pairs on all edge registers,
/// simultaneous Bell measurements along each routed path, one parity-
/// controlled correction per path, and transfer of the resulting pairs onto
/// the partner registers (P_i, P_j). Constant quantum depth.
AdaptiveCircuit q_entangle(const QubitLayout& layout, const IndexPairing& pairing);

/// Qubit pairing: q_entangle followed by teleportation of each Q_j into
/// P_i through the generated Bell pair.
AdaptiveCircuit q_pair(const QubitLayout& layout, const IndexPairing& pairing);

/// Inverse subsystem transfer, mapping each P_i back to Q_j via freshly
/// generated entanglement and reverse teleportation.
AdaptiveCircuit q_pair_inverse(const QubitLayout& layout, const IndexPairing& pairing);

enum class LocalizeMode { TwoD, ThreeD };

struct LocalizeStats {
  std::uint32_t n_source = 0;
  std::uint32_t n_padded = 0;
  std::uint64_t n_total = 0;
  std::size_t source_depth = 0;
  std::size_t depth = 0;
  std::size_t max_path_length = 0;
  int floors_used = 0;  // 0 in 2D mode
};

struct LayerProvenance {
  std::size_t localized_layer = 0;
  std::uint32_t source_layer = 0;
  std::string stage;  // "pair", "op" or "unpair"
};

struct LocalizedCircuit {
  AdaptiveCircuit circuit;
  QubitLayout layout;
  std::vector<LayerProvenance> provenance;
  LocalizeStats stats;
};

/// The per-layer sandwich transform: each source layer t becomes
/// q_pair_inverse o (tensor of the layer's pair ops) o q_pair on a grid
/// sized from n. 2D uses the (n, n, 1) grid with the diagonal routed set;
/// 3D uses (s, s, 4s) with s = ceil(sqrt(n)) and the lexicographically first
/// n bottom-floor vertices. Odd n is padded with one idle qubit.
LocalizedCircuit localize_ideal(const AdaptiveCircuit& circuit, LocalizeMode mode);

/// Verifies geometric locality: every multi-qubit op acts on registers at one
/// vertex or across one grid edge.
std::vector<Diagnostic> locality_check(const LocalizedCircuit& lc);

}  // namespace qlocal
