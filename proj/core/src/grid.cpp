#include "qlocal/grid.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace detail {
void assert_fail(const char* expr, const char* file, int line) {
  throw InternalError(fmt::format("internal assertion failed: {} ({}:{})", expr, file, line));
}
}  // namespace detail

GridSpec::GridSpec(int lx_, int ly_, int lz_, int scale) : lx(lx_), ly(ly_), lz(lz_), scale_denominator(scale) {
  if (lx < 1 || ly < 1 || lz < 1) {
    throw PreconditionError(fmt::format("grid dimensions must be >= 1, got ({},{},{})", lx, ly, lz));
  }
  if (scale_denominator < 1) {
    throw PreconditionError(fmt::format("scale denominator must be >= 1, got {}", scale_denominator));
  }
}

std::string to_string(const Vertex& v) { return fmt::format("({},{},{})", v.x, v.y, v.z); }

int manhattan(const Vertex& u, const Vertex& v) {
  return std::abs(u.x - v.x) + std::abs(u.y - v.y) + std::abs(u.z - v.z);
}

GridGraph::GridGraph(GridSpec spec) : spec_(spec) {
  QLOCAL_ASSERT(spec_.vertex_count() < (1ll << 32));  // edge keys pack two vertex indices
  edges_.reserve(static_cast<std::size_t>(spec_.edge_count()));
  // Lexicographic by (a, axis); matches the vertex ordering.
  for (int x = 0; x < spec_.lx; ++x) {
    for (int y = 0; y < spec_.ly; ++y) {
      for (int z = 0; z < spec_.lz; ++z) {
        Vertex a{x, y, z};
        if (x + 1 < spec_.lx) edges_.push_back({a, {x + 1, y, z}, Axis::X});
        if (y + 1 < spec_.ly) edges_.push_back({a, {x, y + 1, z}, Axis::Y});
        if (z + 1 < spec_.lz) edges_.push_back({a, {x, y, z + 1}, Axis::Z});
      }
    }
  }
  edge_lookup_.reserve(edges_.size() * 2);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    edge_lookup_.emplace((vertex_key(edges_[i].a) << 32) | vertex_key(edges_[i].b), i);
  }
}

bool GridGraph::contains(const Vertex& v) const {
  return v.x >= 0 && v.x < spec_.lx && v.y >= 0 && v.y < spec_.ly && v.z >= 0 && v.z < spec_.lz;
}

std::uint64_t GridGraph::vertex_key(const Vertex& v) const {
  return static_cast<std::uint64_t>(index_of(v));
}

std::size_t GridGraph::index_of(const Vertex& v) const {
  if (!contains(v)) {
    throw PreconditionError(fmt::format("vertex {} outside {}x{}x{} grid", to_string(v), spec_.lx, spec_.ly, spec_.lz));
  }
  return (static_cast<std::size_t>(v.x) * spec_.ly + v.y) * spec_.lz + v.z;
}

Vertex GridGraph::vertex_at(std::size_t index) const {
  QLOCAL_ASSERT(index < vertex_count());
  int z = static_cast<int>(index % spec_.lz);
  index /= spec_.lz;
  int y = static_cast<int>(index % spec_.ly);
  int x = static_cast<int>(index / spec_.ly);
  return Vertex{x, y, z};
}

std::optional<std::size_t> GridGraph::find_edge(const Vertex& u, const Vertex& v) const {
  if (!contains(u) || !contains(v)) return std::nullopt;
  const Vertex& a = u < v ? u : v;
  const Vertex& b = u < v ? v : u;
  auto it = edge_lookup_.find((vertex_key(a) << 32) | vertex_key(b));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t GridGraph::edge_index(const Vertex& u, const Vertex& v) const {
  auto idx = find_edge(u, v);
  if (!idx) {
    throw PreconditionError(fmt::format("no grid edge between {} and {}", to_string(u), to_string(v)));
  }
  return *idx;
}

std::vector<Vertex> GridGraph::neighbors(const Vertex& v) const {
  QLOCAL_ASSERT(contains(v));
  std::vector<Vertex> out;
  out.reserve(6);
  const int dx[] = {-1, 1, 0, 0, 0, 0};
  const int dy[] = {0, 0, -1, 1, 0, 0};
  const int dz[] = {0, 0, 0, 0, -1, 1};
  for (int k = 0; k < 6; ++k) {
    Vertex w{v.x + dx[k], v.y + dy[k], v.z + dz[k]};
    if (contains(w)) out.push_back(w);
  }
  return out;
}

int GridGraph::manhattan_distance(const Vertex& u, const Vertex& v) const {
  if (!contains(u) || !contains(v)) {
    throw PreconditionError(fmt::format("manhattan_distance: {} or {} outside {}x{}x{} grid", to_string(u),
                                        to_string(v), spec_.lx, spec_.ly, spec_.lz));
  }
  return manhattan(u, v);
}

GridGraph build_grid(const GridSpec& spec) { return GridGraph(spec); }

}  // namespace qlocal
