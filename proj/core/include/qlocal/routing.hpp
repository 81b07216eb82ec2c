#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qlocal/grid.hpp"

namespace qlocal {

/// Pairwise-disjoint ordered vertex pairs covering the routed set.
struct Pairing {
  std::vector<std::pair<Vertex, Vertex>> pairs;

  std::size_t size() const { return pairs.size(); }
  /// Throws PreconditionError if any vertex appears twice.
  void check_disjoint() const;
};

/// A walk along grid edges; consecutive vertices are adjacent and no edge
/// repeats. An empty vertex list is the empty path (length 0).
struct RoutePath {
  std::vector<Vertex> vertices;
  std::size_t length() const { return vertices.size() <= 1 ? 0 : vertices.size() - 1; }
  bool empty() const { return vertices.size() <= 1; }
};

/// A 3D route split into at most four straight axis-aligned segments:
/// vertical rise, two in-floor legs, vertical descent. Empty segments are
/// permitted; adjacent nonempty segments are orthogonal.
struct SegmentedPath {
  enum Part : std::size_t { Up = 0, Mid1 = 1, Mid2 = 2, Down = 3 };
  std::array<RoutePath, 4> segments;
  int floor = 1;  // 1-indexed floor assigned to the mid legs

  RoutePath concatenated() const;
  std::size_t length() const;
  std::size_t nonempty_segment_count() const;
  std::optional<Axis> segment_axis(std::size_t part) const;
};

/// Floor index per pair, 1-indexed to mirror [4L]; z-coordinate is floor-1.
struct FloorAssignment {
  std::vector<int> floors;
  int max_floor() const;
};

/// True iff for every two distinct pairs both the X-coordinate sets and the
/// Y-coordinate sets are disjoint.
bool check_condition_2d(const Pairing& pairing);

/// L-shaped 2D routing on the z = `z_floor` slice of an L x L grid: each pair
/// is connected by a run along X from the smaller-X endpoint followed by a
/// run along Y. Requires check_condition_2d. Path length equals the Manhattan
/// distance. Throws PreconditionError naming the offending pair indices when
/// the condition fails.
std::vector<RoutePath> route_2d(int L, const Pairing& pairing, int z_floor = 0);

/// The same L-shaped construction keeping the two straight legs separate.
std::vector<SegmentedPath> route_2d_segmented(int L, const Pairing& pairing, int z_floor = 0);

/// Greedy floor assignment: each pair gets the minimal floor whose filled
/// column and row sets avoid the pair's coordinates. Never fails on a
/// disjoint bottom-floor pairing with L >= 2; an exhausted scan indicates an
/// implementation bug and throws InternalError.
FloorAssignment assign_floors(int L, const Pairing& pairing);

/// Edge-disjoint 3D routing of a full pairing of the bottom floor of the
/// (L, L, 4L) grid; requires L even and the pairing to cover Z_L^2 x {0}.
/// Every path has length at most 10L.
std::vector<SegmentedPath> route_3d(int L, const Pairing& pairing);

namespace detail {
/// Core of route_3d without the evenness/coverage contract: routes any
/// disjoint pairing of bottom-floor vertices (used for routing restricted
/// subsets, where ceil(sqrt(n)) may be odd).
std::vector<SegmentedPath> route_3d_any(int L, const Pairing& pairing);
}  // namespace detail

struct DisjointReport {
  bool ok = true;
  // First conflict when !ok:
  Vertex edge_a{};
  Vertex edge_b{};
  std::size_t path_i = 0;
  std::size_t path_j = 0;
};

DisjointReport verify_edge_disjoint(std::span<const RoutePath> paths);
DisjointReport verify_edge_disjoint(std::span<const SegmentedPath> paths);

/// Completes a partial pairing of `routed_set` to a (near-)full pairing by
/// pairing the leftover vertices in lexicographic order; when the leftover
/// count is odd the lexicographically last vertex stays unrouted. The input
/// pairs come first in the result.
Pairing complete_pairing(std::span<const Vertex> routed_set, const Pairing& partial);

/// Routes a pairing of an even-size subset S' of the bottom floor by
/// embedding it into a completed pairing of the full floor and discarding the
/// dummy paths.
std::vector<SegmentedPath> route_3d_subset(int L, const Pairing& sub_pairing);

}  // namespace qlocal
