#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qlocal {

enum class Axis : std::uint8_t { X, Y, Z };

constexpr char axis_name(Axis a) { return a == Axis::X ? 'X' : (a == Axis::Y ? 'Y' : 'Z'); }

/// Dimensions of a path-product grid graph. `lz == 1` encodes a 2D grid.
/// `scale_denominator` carries the 1/m rescaling of embedded fine lattices
/// symbolically; all coordinates remain integers.
struct GridSpec {
  int lx = 1;
  int ly = 1;
  int lz = 1;
  int scale_denominator = 1;

  GridSpec() = default;
  GridSpec(int lx_, int ly_, int lz_, int scale = 1);

  bool is_2d() const { return lz == 1; }
  std::int64_t vertex_count() const {
    return static_cast<std::int64_t>(lx) * ly * lz;
  }
  /// Unit-step edge count of the product graph, in closed form.
  std::int64_t edge_count() const {
    auto x = static_cast<std::int64_t>(lx), y = static_cast<std::int64_t>(ly),
         z = static_cast<std::int64_t>(lz);
    return (x - 1) * y * z + x * (y - 1) * z + x * y * (z - 1);
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Lattice site, 0-indexed on each axis (z fixed at 0 for 2D grids).
struct Vertex {
  int x = 0;
  int y = 0;
  int z = 0;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

std::string to_string(const Vertex& v);

/// Endpoints differ by exactly one unit step along `axis`.
struct Edge {
  Vertex a;  // lexicographically smaller endpoint
  Vertex b;
  Axis axis;
  friend bool operator==(const Edge&, const Edge&) = default;
};

int manhattan(const Vertex& u, const Vertex& v);

/// A grid graph with deterministic vertex and edge orderings (both
/// lexicographic by coordinates). Immutable after construction; safe to read
/// concurrently.
class GridGraph {
 public:
  explicit GridGraph(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t vertex_count() const { return static_cast<std::size_t>(spec_.vertex_count()); }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(const Vertex& v) const;
  std::size_t index_of(const Vertex& v) const;
  Vertex vertex_at(std::size_t index) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_index(const Vertex& u, const Vertex& v) const;
  std::optional<std::size_t> find_edge(const Vertex& u, const Vertex& v) const;

  std::vector<Vertex> neighbors(const Vertex& v) const;

  /// Shortest-path (L1) distance; throws PreconditionError if a vertex is
  /// outside this graph.
  int manhattan_distance(const Vertex& u, const Vertex& v) const;

 private:
  GridSpec spec_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_lookup_;
  std::uint64_t vertex_key(const Vertex& v) const;
};

GridGraph build_grid(const GridSpec& spec);

}  // namespace qlocal
