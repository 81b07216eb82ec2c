#include "qlocal/routing.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace {

std::uint64_t vertex_key(const Vertex& v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)) << 42) ^
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.y)) << 21) ^
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.z));
}

std::pair<std::uint64_t, std::uint64_t> edge_key(const Vertex& u, const Vertex& v) {
  const Vertex& a = u < v ? u : v;
  const Vertex& b = u < v ? v : u;
  return {vertex_key(a), vertex_key(b)};
}

RoutePath straight_path(Vertex from, Vertex to) {
  RoutePath path;
  if (from == to) return path;
  int dx = (to.x > from.x) - (to.x < from.x);
  int dy = (to.y > from.y) - (to.y < from.y);
  int dz = (to.z > from.z) - (to.z < from.z);
  QLOCAL_ASSERT((dx != 0) + (dy != 0) + (dz != 0) == 1);
  path.vertices.push_back(from);
  Vertex cur = from;
  while (cur != to) {
    cur = Vertex{cur.x + dx, cur.y + dy, cur.z + dz};
    path.vertices.push_back(cur);
  }
  return path;
}

// Returns the first offending pair indices if the 2D condition fails.
std::optional<std::pair<std::size_t, std::size_t>> find_condition_2d_violation(const Pairing& pairing) {
  const auto& pairs = pairing.pairs;
  // A coordinate value may be used by at most one pair (values repeated
  // within a single pair are fine).
  std::unordered_map<int, std::size_t> x_owner, y_owner;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    for (int xv : {pairs[r].first.x, pairs[r].second.x}) {
      auto [it, fresh] = x_owner.emplace(xv, r);
      if (!fresh && it->second != r) return std::make_pair(it->second, r);
    }
    for (int yv : {pairs[r].first.y, pairs[r].second.y}) {
      auto [it, fresh] = y_owner.emplace(yv, r);
      if (!fresh && it->second != r) return std::make_pair(it->second, r);
    }
  }
  return std::nullopt;
}

void check_in_floor(int L, const Pairing& pairing, int z_floor) {
  for (std::size_t r = 0; r < pairing.pairs.size(); ++r) {
    for (const Vertex* v : {&pairing.pairs[r].first, &pairing.pairs[r].second}) {
      if (v->x < 0 || v->x >= L || v->y < 0 || v->y >= L || v->z != z_floor) {
        throw PreconditionError(fmt::format("pair {}: vertex {} outside floor z={} of the {}x{} grid", r,
                                            to_string(*v), z_floor, L, L));
      }
    }
  }
}

}  // namespace

void Pairing::check_disjoint() const {
  std::set<Vertex> seen;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    for (const Vertex* v : {&pairs[r].first, &pairs[r].second}) {
      if (!seen.insert(*v).second) {
        throw PreconditionError(fmt::format("pairing is not disjoint: vertex {} repeats (pair {})",
                                            to_string(*v), r));
      }
    }
  }
}

RoutePath SegmentedPath::concatenated() const {
  RoutePath out;
  for (const auto& seg : segments) {
    if (seg.vertices.empty()) continue;
    if (out.vertices.empty()) {
      out.vertices = seg.vertices;
    } else {
      QLOCAL_ASSERT(out.vertices.back() == seg.vertices.front());
      out.vertices.insert(out.vertices.end(), seg.vertices.begin() + 1, seg.vertices.end());
    }
  }
  return out;
}

std::size_t SegmentedPath::length() const {
  std::size_t total = 0;
  for (const auto& seg : segments) total += seg.length();
  return total;
}

std::size_t SegmentedPath::nonempty_segment_count() const {
  std::size_t count = 0;
  for (const auto& seg : segments) count += seg.empty() ? 0 : 1;
  return count;
}

std::optional<Axis> SegmentedPath::segment_axis(std::size_t part) const {
  const RoutePath& seg = segments[part];
  if (seg.empty()) return std::nullopt;
  const Vertex& a = seg.vertices[0];
  const Vertex& b = seg.vertices[1];
  if (a.x != b.x) return Axis::X;
  if (a.y != b.y) return Axis::Y;
  return Axis::Z;
}

int FloorAssignment::max_floor() const {
  int best = 0;
  for (int z : floors) best = std::max(best, z);
  return best;
}

bool check_condition_2d(const Pairing& pairing) {
  return !find_condition_2d_violation(pairing).has_value();
}

std::vector<SegmentedPath> route_2d_segmented(int L, const Pairing& pairing, int z_floor) {
  pairing.check_disjoint();
  check_in_floor(L, pairing, z_floor);
  if (auto violation = find_condition_2d_violation(pairing)) {
    throw PreconditionError(fmt::format(
        "2D routing condition violated: pairs {} and {} share an X or Y coordinate", violation->first,
        violation->second));
  }
  std::vector<SegmentedPath> out;
  out.reserve(pairing.size());
  for (const auto& [a, b] : pairing.pairs) {
    // Reorder so the smaller-X endpoint starts the path; ties keep the
    // original order. The path runs along X at the start's Y, then along Y.
    Vertex start = a, end = b;
    if (end.x < start.x) std::swap(start, end);
    SegmentedPath sp;
    sp.floor = z_floor + 1;
    Vertex corner{end.x, start.y, z_floor};
    sp.segments[SegmentedPath::Mid1] = straight_path(start, corner);
    sp.segments[SegmentedPath::Mid2] = straight_path(corner, end);
    out.push_back(std::move(sp));
  }
  return out;
}

std::vector<RoutePath> route_2d(int L, const Pairing& pairing, int z_floor) {
  std::vector<RoutePath> out;
  for (auto& sp : route_2d_segmented(L, pairing, z_floor)) {
    out.push_back(sp.concatenated());
  }
  return out;
}

FloorAssignment assign_floors(int L, const Pairing& pairing) {
  if (L < 2) throw PreconditionError(fmt::format("assign_floors requires L >= 2, got {}", L));
  pairing.check_disjoint();
  check_in_floor(L, pairing, 0);
  const int num_floors = 4 * L;
  std::vector<std::vector<bool>> filled_cols(num_floors + 1, std::vector<bool>(L, false));
  std::vector<std::vector<bool>> filled_rows(num_floors + 1, std::vector<bool>(L, false));
  FloorAssignment result;
  result.floors.reserve(pairing.size());
  for (const auto& [a, b] : pairing.pairs) {
    int chosen = 0;
    for (int z = 1; z <= num_floors; ++z) {
      if (!filled_cols[z][a.x] && !filled_cols[z][b.x] && !filled_rows[z][a.y] && !filled_rows[z][b.y]) {
        chosen = z;
        break;
      }
    }
    QLOCAL_ASSERT(chosen != 0);  // cannot happen: |W| <= 4L-4 counting argument
    filled_cols[chosen][a.x] = filled_cols[chosen][b.x] = true;
    filled_rows[chosen][a.y] = filled_rows[chosen][b.y] = true;
    result.floors.push_back(chosen);
  }
  return result;
}

namespace detail {

std::vector<SegmentedPath> route_3d_any(int L, const Pairing& pairing) {
  FloorAssignment floors = assign_floors(L, pairing);
  // Group pairs per floor and reuse the 2D construction inside each floor.
  std::vector<SegmentedPath> out(pairing.size());
  std::unordered_map<int, std::vector<std::size_t>> by_floor;
  for (std::size_t r = 0; r < pairing.size(); ++r) by_floor[floors.floors[r]].push_back(r);
  for (const auto& [floor, members] : by_floor) {
    const int z = floor - 1;
    Pairing lifted;
    for (auto r : members) {
      const auto& [a, b] = pairing.pairs[r];
      lifted.pairs.emplace_back(Vertex{a.x, a.y, z}, Vertex{b.x, b.y, z});
    }
    auto mids = route_2d_segmented(L, lifted, z);
    for (std::size_t k = 0; k < members.size(); ++k) {
      std::size_t r = members[k];
      const auto& [a, b] = pairing.pairs[r];
      SegmentedPath sp;
      sp.floor = floor;
      sp.segments[SegmentedPath::Up] = straight_path(a, Vertex{a.x, a.y, z});
      sp.segments[SegmentedPath::Down] = straight_path(Vertex{b.x, b.y, z}, b);
      // The in-floor legs run between the lifted endpoints; mid legs start
      // from whichever endpoint has the smaller X, so reattach them in
      // traversal order from a to b.
      SegmentedPath& mid = mids[k];
      RoutePath leg1 = std::move(mid.segments[SegmentedPath::Mid1]);
      RoutePath leg2 = std::move(mid.segments[SegmentedPath::Mid2]);
      Vertex lifted_a{a.x, a.y, z};
      bool forward = true;
      if (!leg1.empty()) {
        forward = leg1.vertices.front() == lifted_a;
      } else if (!leg2.empty()) {
        forward = leg2.vertices.front() == lifted_a;
      }
      if (!forward) {
        // Reverse the whole mid path: swap leg order and orientations.
        std::reverse(leg1.vertices.begin(), leg1.vertices.end());
        std::reverse(leg2.vertices.begin(), leg2.vertices.end());
        std::swap(leg1, leg2);
      }
      sp.segments[SegmentedPath::Mid1] = std::move(leg1);
      sp.segments[SegmentedPath::Mid2] = std::move(leg2);
      out[r] = std::move(sp);
    }
  }
  return out;
}

}  // namespace detail

std::vector<SegmentedPath> route_3d(int L, const Pairing& pairing) {
  if (L < 2 || L % 2 != 0) {
    throw PreconditionError(fmt::format("route_3d requires even L >= 2, got {}", L));
  }
  if (pairing.size() * 2 != static_cast<std::size_t>(L) * L) {
    throw PreconditionError(fmt::format("route_3d requires a full pairing of the bottom floor ({} vertices), got {} pairs",
                                        L * L, pairing.size()));
  }
  return detail::route_3d_any(L, pairing);
}

namespace {

DisjointReport verify_edges(const std::vector<std::pair<RoutePath, std::size_t>>& paths) {
  DisjointReport report;
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::size_t>> seen;
  seen.reserve(1024);
  for (const auto& [path, index] : paths) {
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      auto [ka, kb] = edge_key(path.vertices[i], path.vertices[i + 1]);
      std::uint64_t key = ka * 0x9e3779b97f4a7c15ull ^ kb;
      auto [it, fresh] = seen.emplace(key, std::make_pair(kb, index));
      if (!fresh) {
        report.ok = false;
        const Vertex& u = path.vertices[i];
        const Vertex& v = path.vertices[i + 1];
        report.edge_a = u < v ? u : v;
        report.edge_b = u < v ? v : u;
        report.path_i = it->second.second;
        report.path_j = index;
        return report;
      }
    }
  }
  return report;
}

}  // namespace

DisjointReport verify_edge_disjoint(std::span<const RoutePath> paths) {
  std::vector<std::pair<RoutePath, std::size_t>> indexed;
  indexed.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) indexed.emplace_back(paths[i], i);
  return verify_edges(indexed);
}

DisjointReport verify_edge_disjoint(std::span<const SegmentedPath> paths) {
  std::vector<std::pair<RoutePath, std::size_t>> indexed;
  indexed.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) indexed.emplace_back(paths[i].concatenated(), i);
  return verify_edges(indexed);
}

Pairing complete_pairing(std::span<const Vertex> routed_set, const Pairing& partial) {
  partial.check_disjoint();
  std::set<Vertex> remaining(routed_set.begin(), routed_set.end());
  for (const auto& [a, b] : partial.pairs) {
    if (remaining.erase(a) == 0 || remaining.erase(b) == 0) {
      throw PreconditionError("complete_pairing: partial pairing uses a vertex outside the routed set");
    }
  }
  Pairing full = partial;
  std::vector<Vertex> leftovers(remaining.begin(), remaining.end());
  for (std::size_t i = 0; i + 1 < leftovers.size(); i += 2) {
    full.pairs.emplace_back(leftovers[i], leftovers[i + 1]);
  }
  return full;
}

std::vector<SegmentedPath> route_3d_subset(int L, const Pairing& sub_pairing) {
  if (sub_pairing.pairs.empty()) return {};
  std::vector<Vertex> floor_vertices;
  floor_vertices.reserve(static_cast<std::size_t>(L) * L);
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) floor_vertices.push_back(Vertex{x, y, 0});
  }
  Pairing full = complete_pairing(floor_vertices, sub_pairing);
  auto all = detail::route_3d_any(L, full);
  all.resize(sub_pairing.size());
  return all;
}

}  // namespace qlocal
