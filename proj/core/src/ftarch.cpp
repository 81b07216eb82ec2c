#include "qlocal/ftarch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace {

constexpr double kBusP0 = 1.0 / 5004.0;
constexpr double kBusCoeff = 5004.0;

// Compares a*b (each < 2^128) against 2^e, exactly, via 256-bit schoolbook
// accumulation. Returns -1, 0, +1.
int cmp_mul_pow2(unsigned __int128 a, unsigned __int128 b, std::uint32_t e) {
  auto lo64 = [](unsigned __int128 v) { return static_cast<std::uint64_t>(v); };
  auto hi64 = [](unsigned __int128 v) { return static_cast<std::uint64_t>(v >> 64); };
  std::uint64_t a0 = lo64(a), a1 = hi64(a), b0 = lo64(b), b1 = hi64(b);
  std::uint64_t limbs[4] = {0, 0, 0, 0};
  auto add_at = [&](int idx, unsigned __int128 v) {
    while (v != 0 && idx < 4) {
      unsigned __int128 sum = static_cast<unsigned __int128>(limbs[idx]) + lo64(v);
      limbs[idx] = lo64(sum);
      v = (v >> 64) + (sum >> 64);
      ++idx;
    }
    QLOCAL_ASSERT(v == 0);
  };
  add_at(0, static_cast<unsigned __int128>(a0) * b0);
  add_at(1, static_cast<unsigned __int128>(a0) * b1);
  add_at(1, static_cast<unsigned __int128>(a1) * b0);
  add_at(2, static_cast<unsigned __int128>(a1) * b1);
  std::uint64_t pow_limbs[4] = {0, 0, 0, 0};
  if (e < 256) pow_limbs[e >> 6] = 1ull << (e & 63);
  // e >= 256 exceeds any 256-bit product unless the product is also huge;
  // 2^e > product always then.
  if (e >= 256) return -1;
  for (int i = 3; i >= 0; --i) {
    if (limbs[i] != pow_limbs[i]) return limbs[i] < pow_limbs[i] ? -1 : 1;
  }
  return 0;
}

PauliOp random_nonidentity_pauli(std::uint32_t n, std::span<const std::uint32_t> qubits, Rng& rng) {
  PauliOp p = PauliOp::identity(n);
  std::uint32_t code = 0;
  std::uint32_t limit = 1;
  for (std::size_t i = 0; i < qubits.size(); ++i) limit *= 4;
  code = 1 + rng.uniform_u32(limit - 1);  // uniform over non-identity patterns
  for (auto q : qubits) {
    std::uint32_t w = code & 3;
    code >>= 2;
    p.set_x(q, w == 1 || w == 3);
    p.set_z(q, w == 2 || w == 3);
  }
  return p;
}

}  // namespace

std::string bus_case_name(BusCase c) {
  switch (c) {
    case BusCase::R2: return "R2";
    case BusCase::Odd: return "ODD";
    case BusCase::Even: return "EVEN";
  }
  return "?";
}

std::string color_name(Color c) {
  switch (c) {
    case Color::Red: return "red";
    case Color::Green: return "green";
    case Color::Blue: return "blue";
  }
  return "?";
}

Color color_of_axis(Axis a) {
  switch (a) {
    case Axis::X: return Color::Red;
    case Axis::Y: return Color::Green;
    case Axis::Z: return Color::Blue;
  }
  return Color::Red;
}

bool bus_condition_holds(std::uint32_t delta, std::uint64_t R) {
  if (R <= 1) return true;
  if (R < (1ull << 32)) {
    // Exact: 2^delta >= R^8 via R^4 * R^4 against 2^delta.
    unsigned __int128 r4 = static_cast<unsigned __int128>(R * R) * (R * R);
    return cmp_mul_pow2(r4, r4, delta) <= 0;
  }
  std::uint32_t bw = std::bit_width(R);
  if (delta >= 8u * bw) return true;
  if ((R & (R - 1)) == 0) return delta >= 8u * (bw - 1);
  if (delta <= 8u * (bw - 1)) return false;
  return static_cast<long double>(delta) >= 8.0L * std::log2(static_cast<long double>(R));
}

BusSpec bus_profile(std::uint32_t delta, std::uint64_t R) {
  if (R < 2) throw PreconditionError(fmt::format("bus length R must be >= 2, got {}", R));
  if (delta < 1) throw PreconditionError("bus cross-section Delta must be >= 1");
  BusSpec spec;
  spec.delta = delta;
  spec.R = R;
  if (R == 2) {
    spec.kase = BusCase::R2;
    spec.profile = RobustnessProfile(1.0, 2.0, 1.0, 2, 1);
    return spec;
  }
  if (!bus_condition_holds(delta, R)) {
    std::uint32_t needed = static_cast<std::uint32_t>(
        std::ceil(8.0L * std::log2(static_cast<long double>(R))));
    while (!bus_condition_holds(needed, R)) ++needed;
    throw PreconditionError(
        fmt::format("bus condition violated: Delta={} < 8*log2(R={}); minimal admissible Delta is {}", delta,
                    R, needed));
  }
  spec.kase = (R % 2 == 1) ? BusCase::Odd : BusCase::Even;
  if (spec.kase == BusCase::Even) {
    // The even case routes through the odd-R' = R-1 protocol; its
    // requirement 4*log2(R') <= floor((Delta+1)/2) follows from the Delta
    // condition.
    QLOCAL_ASSERT(bus_condition_holds((delta + 1) / 2 * 2, R - 1));
  }
  spec.profile = RobustnessProfile(kBusP0, kBusCoeff, 1.0, 2, 1);
  return spec;
}

CubeAssignment cube_assignment(int L, int m) {
  if (L < 2) throw PreconditionError(fmt::format("cube assignment requires L >= 2, got {}", L));
  if (m < 1) throw PreconditionError("cube assignment requires m >= 1");
  return CubeAssignment{L, m};
}

double NoiseMonomial::eval(double p) const {
  if (p > p0) {
    throw ThresholdExceeded(fmt::format("p={} exceeds monomial threshold p0={}", p, p0), -1);
  }
  if (p == 0.0) return 0.0;
  return std::min(1.0, coeff_a * std::pow(p, exp_b));
}

std::vector<RobustnessProfile> FTPlan::bus_profiles() const {
  std::vector<RobustnessProfile> out;
  for (const auto& path : paths) {
    for (const auto& bus : path.buses) out.push_back(bus.spec.profile);
  }
  return out;
}

double FTPlan::min_bus_threshold() const {
  double p0 = 1.0;
  for (const auto& path : paths) {
    for (const auto& bus : path.buses) p0 = std::min(p0, bus.spec.profile.p0);
  }
  return p0;
}

int ft_scale_factor(int L) {
  QLOCAL_ASSERT(L >= 2);
  return 82 * static_cast<int>(std::bit_width(static_cast<unsigned>(L - 1)));
}

namespace {

MCondition check_m_condition(int L, int m) {
  MCondition c;
  c.lhs = static_cast<double>(m);
  double arg = 10.0 * static_cast<double>(m) * static_cast<double>(L);
  c.rhs_log2 = 8.0 * std::log2(arg);
  c.rhs_ln = 8.0 * std::log(arg);
  c.ok_log2 = c.lhs >= c.rhs_log2;
  c.ok_ln = c.lhs >= c.rhs_ln;
  return c;
}

FineQubit fine_at(const Vertex& v, int m, Color color) {
  return FineQubit{static_cast<std::int64_t>(v.x) * m, static_cast<std::int64_t>(v.y) * m,
                   static_cast<std::int64_t>(v.z) * m, color};
}

FineQubit step_back(FineQubit q, Axis axis, int direction) {
  // one fine-lattice step opposite the traversal direction
  switch (axis) {
    case Axis::X: q.x -= direction; break;
    case Axis::Y: q.y -= direction; break;
    case Axis::Z: q.z -= direction; break;
  }
  return q;
}

int traversal_direction(const RoutePath& seg, Axis axis) {
  const Vertex& a = seg.vertices.front();
  const Vertex& b = seg.vertices.back();
  switch (axis) {
    case Axis::X: return b.x > a.x ? 1 : -1;
    case Axis::Y: return b.y > a.y ? 1 : -1;
    case Axis::Z: return b.z > a.z ? 1 : -1;
  }
  return 1;
}

PositionedBus make_bus(const RoutePath& seg, Axis axis, int m) {
  PositionedBus bus;
  bus.axis = axis;
  bus.color = color_of_axis(axis);
  bus.seg_start = seg.vertices.front();
  bus.seg_end = seg.vertices.back();
  bus.spec = bus_profile(static_cast<std::uint32_t>(m),
                         static_cast<std::uint64_t>(m) * seg.length());
  int dir = traversal_direction(seg, axis);
  // The half-open cubes cover fine sites [m*min, m*max) along the axis, so
  // the traversal-side boundary site is one fine step inside when traversing
  // against the anchor direction.
  FineQubit s = fine_at(bus.seg_start, m, bus.color);
  FineQubit t = fine_at(bus.seg_end, m, bus.color);
  if (dir < 0) {
    s = step_back(s, axis, -dir);  // start vertex site lies outside the block
  } else {
    t = step_back(t, axis, dir);
  }
  bus.s_qubit = s;
  bus.t_qubit = t;
  return bus;
}

NoiseStage swap_stage(const NoiseMonomial& in, std::uint32_t k) {
  NoiseMonomial out;
  double exponent = 1.0 / (8.0 * (k - 1));
  out.coeff_a = 4.0 * std::pow(2.0 * in.coeff_a, exponent);
  out.exp_b = in.exp_b * exponent;
  out.p0 = in.p0;
  return NoiseStage{fmt::format("entanglement_swap(k={})", k), out};
}

NoiseStage teleport_stage(const NoiseMonomial& in) {
  NoiseMonomial out;
  out.coeff_a = std::pow(2.0, 17.0 / 8.0) * std::pow(in.coeff_a, 1.0 / 8.0);
  out.exp_b = in.exp_b / 8.0;
  out.p0 = in.p0;
  return NoiseStage{"teleport", out};
}

std::vector<NoiseStage> compose_plan_stages(const std::vector<PathPlan>& paths, std::uint32_t swap_k) {
  double worst_coeff = 0.0;
  double p0 = 1.0;
  for (const auto& path : paths) {
    for (const auto& bus : path.buses) {
      worst_coeff = std::max(worst_coeff, bus.spec.profile.coeff_a);
      p0 = std::min(p0, bus.spec.profile.p0);
    }
  }
  if (worst_coeff == 0.0) worst_coeff = kBusCoeff;  // empty plan: report the generic bus profile
  std::vector<NoiseStage> stages;
  NoiseMonomial bus{worst_coeff, 1.0, p0};
  stages.push_back({"bus", bus});
  // Parallel repetition with r~ = 1 (Bell outputs) keeps the monomial.
  stages.push_back({"parallel_repetition(r~=1)", bus});
  stages.push_back(swap_stage(bus, swap_k));
  return stages;
}

FTPlan plan_from_segments(FtMode mode, int L, int m, const std::vector<SegmentedPath>& routed) {
  FTPlan plan;
  plan.mode = mode;
  plan.L = L;
  plan.m = m;
  plan.m_condition = check_m_condition(L, m);
  if (!plan.m_condition.ok_ln) {
    throw PreconditionError(fmt::format(
        "aggregate bus condition m >= 8 ln(10mL) fails: m={} < {}", m, plan.m_condition.rhs_ln));
  }
  std::uint64_t lm = static_cast<std::uint64_t>(L) * m;
  plan.lattice_qubits = mode == FtMode::ThreeD ? 12ull * lm * lm * lm
                                               : 2ull * lm * lm * static_cast<std::uint64_t>(m);
  for (std::size_t r = 0; r < routed.size(); ++r) {
    const SegmentedPath& sp = routed[r];
    PathPlan path;
    path.pair_index = r;
    for (std::size_t part = 0; part < sp.segments.size(); ++part) {
      if (sp.segments[part].empty()) continue;
      Axis axis = *sp.segment_axis(part);
      path.buses.push_back(make_bus(sp.segments[part], axis, m));
    }
    QLOCAL_ASSERT(!path.buses.empty());
    for (std::size_t b = 0; b + 1 < path.buses.size(); ++b) {
      path.stitches.push_back({path.buses[b].t_qubit, path.buses[b + 1].s_qubit});
    }
    path.out_a = path.buses.front().s_qubit;
    path.out_b = path.buses.back().t_qubit;
    plan.paths.push_back(std::move(path));
  }
  plan.stages = compose_plan_stages(plan.paths, mode == FtMode::ThreeD ? 4 : 2);
  plan.bell_noise = plan.stages.back().monomial;
  return plan;
}

}  // namespace

namespace detail {

FTPlan plan_ft_3d_any(int L, const Pairing& pairing) {
  int m = ft_scale_factor(L);
  auto routed = pairing.size() * 2 == static_cast<std::size_t>(L) * L && L % 2 == 0
                    ? route_3d(L, pairing)
                    : route_3d_subset(L, pairing);
  return plan_from_segments(FtMode::ThreeD, L, m, routed);
}

}  // namespace detail

FTPlan plan_ft_entangle_3d(int L, const Pairing& pairing) {
  if (L < 2 || L % 2 != 0) {
    throw PreconditionError(fmt::format("plan_ft_entangle_3d requires even L >= 2, got {}", L));
  }
  if (pairing.size() * 2 != static_cast<std::size_t>(L) * L) {
    throw PreconditionError("plan_ft_entangle_3d requires a full pairing of the bottom floor");
  }
  return detail::plan_ft_3d_any(L, pairing);
}

FTPlan plan_ft_entangle_quasi2d(int L, const Pairing& pairing) {
  if (L < 2) throw PreconditionError(fmt::format("plan_ft_entangle_quasi2d requires L >= 2, got {}", L));
  for (const auto& [a, b] : pairing.pairs) {
    if (a.x != a.y || b.x != b.y || a.z != 0 || b.z != 0) {
      throw PreconditionError("quasi-2D pairing must pair diagonal sites (i,i,0)");
    }
  }
  int m = ft_scale_factor(L);
  auto routed = route_2d_segmented(L, pairing);
  return plan_from_segments(FtMode::Quasi2D, L, m, routed);
}

std::uint64_t ft_total_qubits(FtMode mode, std::uint32_t n_padded, int L, int m) {
  std::uint64_t lm = static_cast<std::uint64_t>(L) * m;
  std::uint64_t lattice = mode == FtMode::ThreeD ? 12ull * lm * lm * lm
                                                 : 2ull * lm * lm * static_cast<std::uint64_t>(m);
  return 2ull * n_padded + lattice;
}

FTLocalizedPlan ft_localize(const AdaptiveCircuit& circuit, FtMode mode) {
  auto diagnostics = validate(circuit);
  if (!diagnostics.empty()) {
    throw PreconditionError(fmt::format("ft_localize: invalid circuit: layer {} op {}: {}",
                                        diagnostics[0].layer, diagnostics[0].op, diagnostics[0].message));
  }
  FTLocalizedPlan plan;
  plan.mode = mode;
  plan.n_source = circuit.n;
  plan.n_padded = circuit.n + (circuit.n % 2);
  if (plan.n_padded < 2) plan.n_padded = 2;
  if (mode == FtMode::Quasi2D) {
    plan.L = static_cast<int>(plan.n_padded);
  } else {
    int s = 2;
    while (static_cast<std::uint32_t>(s) * s < plan.n_padded) ++s;
    plan.L = s;
  }
  plan.m = ft_scale_factor(plan.L);
  plan.qubit_total = ft_total_qubits(mode, plan.n_padded, plan.L, plan.m);
  plan.source_depth = circuit.depth();
  // Depth accounting per gadget layer: bus block (prep unitary depth 10 +
  // measurement + correction = 12), stitch Bell measurement + corrections
  // (5), teleport (5); forward and inverse transfers plus the pair op layer.
  plan.depth_constant = 2 * (12 + 5 + 5) + 1;
  plan.depth = static_cast<std::uint64_t>(plan.depth_constant) * circuit.depth();

  std::vector<Vertex> routed;
  if (mode == FtMode::Quasi2D) {
    for (std::uint32_t i = 0; i < plan.n_padded; ++i) {
      routed.push_back(Vertex{static_cast<int>(i), static_cast<int>(i), 0});
    }
  } else {
    for (int x = 0; x < plan.L && routed.size() < plan.n_padded; ++x) {
      for (int y = 0; y < plan.L && routed.size() < plan.n_padded; ++y) routed.push_back(Vertex{x, y, 0});
    }
  }

  for (const auto& layer : circuit.layers) {
    LayerPairing lp = extract_layer_pairing(layer, plan.n_padded);
    Pairing pairing;
    for (const auto& p : lp.pairs) pairing.pairs.emplace_back(routed[p.a], routed[p.b]);
    plan.layer_plans.push_back(mode == FtMode::Quasi2D ? plan_ft_entangle_quasi2d(plan.L, pairing)
                                                       : detail::plan_ft_3d_any(plan.L, pairing));
  }

  // Compose the end-to-end noise map; with no layers, report the generic
  // pipeline for this geometry.
  std::vector<NoiseStage> stages;
  if (!plan.layer_plans.empty()) {
    stages = plan.layer_plans.front().stages;
    for (const auto& lp : plan.layer_plans) {
      if (lp.stages.front().monomial.coeff_a > stages.front().monomial.coeff_a) stages = lp.stages;
    }
  } else {
    NoiseMonomial bus{kBusCoeff, 1.0, kBusP0};
    stages.push_back({"bus", bus});
    stages.push_back({"parallel_repetition(r~=1)", bus});
    stages.push_back(swap_stage(bus, mode == FtMode::ThreeD ? 4 : 2));
  }
  stages.push_back(teleport_stage(stages.back().monomial));
  plan.stages = std::move(stages);
  plan.effective_noise = plan.stages.back().monomial;
  return plan;
}

PauliOp reduce_mod_bell(const PauliOp& two_qubit) {
  QLOCAL_ASSERT(two_qubit.num_qubits() == 2);
  auto encode = [](const PauliOp& p) {
    return (p.x(0) ? 1u : 0u) | (p.z(0) ? 2u : 0u) | (p.x(1) ? 4u : 0u) | (p.z(1) ? 8u : 0u);
  };
  auto weight = [](std::uint32_t code) {
    return ((code & 3) != 0 ? 1u : 0u) + ((code >> 2) != 0 ? 1u : 0u);
  };
  const std::uint32_t stab[4] = {0u, 0b0101u, 0b1111u, 0b1010u};  // II, XX, YY, ZZ
  std::uint32_t best = encode(two_qubit) ^ stab[0];
  for (std::uint32_t s = 1; s < 4; ++s) {
    std::uint32_t cand = encode(two_qubit) ^ stab[s];
    if (weight(cand) < weight(best) || (weight(cand) == weight(best) && cand < best)) best = cand;
  }
  PauliOp out = PauliOp::identity(2);
  out.set_x(0, best & 1);
  out.set_z(0, best & 2);
  out.set_x(1, best & 4);
  out.set_z(1, best & 8);
  return out;
}

// Exact Pauli-frame transform of a deposited chain error through the stitch
// stage: conjugate by the Bell-measurement basis rotation, then commute
// through the parity-controlled correction on the far output.
PauliOp propagate_swap_chain(const PauliOp& chain_error, std::uint32_t k) {
  QLOCAL_ASSERT(chain_error.num_qubits() == 2 * k);
  if (k == 1) return reduce_mod_bell(chain_error);
  PauliOp e = chain_error;
  for (std::uint32_t alpha = 0; alpha + 1 < k; ++alpha) {
    e.conjugate({CliffordGate::CNOT, 2 * alpha + 1, 2 * alpha + 2});
  }
  for (std::uint32_t alpha = 0; alpha + 1 < k; ++alpha) {
    e.conjugate({CliffordGate::H, 2 * alpha + 1});
  }
  // Relabel to (A1 = {S_0, T_{k-1}} | A2 = measured qubits ascending).
  std::vector<std::uint32_t> perm(2 * k);
  perm[0] = 0;
  perm[2 * k - 1] = 1;
  for (std::uint32_t c = 1; c + 1 < 2 * k; ++c) perm[c] = 2 + (c - 1);
  PauliOp relabeled = permute(e, perm);
  LinearControl ctrl(2, 2 * (k - 1));
  for (std::uint32_t alpha = 0; alpha + 1 < k; ++alpha) {
    ctrl.A.set(1, (2 * alpha + 2) - 1, true);  // X correction <- measured S_{alpha+1}
    ctrl.B.set(1, (2 * alpha + 1) - 1, true);  // Z correction <- measured T_alpha
  }
  PauliOp f = commute_through_adaptive(relabeled, ctrl);
  return reduce_mod_bell(f);
}

PauliOp surrogate_failure_sample(const FTPlan& plan, NoiseStrength p, Rng& rng, PauliOp* bus_deposits) {
  if (p.p > plan.min_bus_threshold()) {
    throw ThresholdExceeded(fmt::format("surrogate sampling at p={} above bus threshold {}", p.p,
                                        plan.min_bus_threshold()),
                            0);
  }
  std::uint32_t total_buses = 0;
  for (const auto& path : plan.paths) total_buses += static_cast<std::uint32_t>(path.buses.size());
  if (bus_deposits != nullptr) *bus_deposits = PauliOp::identity(2 * total_buses);
  PauliOp out = PauliOp::identity(plan.output_qubit_count());
  std::uint32_t bus_base = 0;
  for (std::size_t r = 0; r < plan.paths.size(); ++r) {
    const auto& path = plan.paths[r];
    const std::uint32_t k = static_cast<std::uint32_t>(path.buses.size());
    PauliOp chain = PauliOp::identity(2 * k);
    bool any = false;
    for (std::uint32_t j = 0; j < k; ++j) {
      double fail = path.buses[j].spec.profile.eval(p.p);
      if (rng.bernoulli(fail)) {
        std::uint32_t qs[2] = {2 * j, 2 * j + 1};
        PauliOp deposit = random_nonidentity_pauli(2 * k, qs, rng);
        chain = multiply_unsigned(chain, deposit);
        any = true;
        if (bus_deposits != nullptr) {
          PauliOp local = PauliOp::identity(2);
          local.set_x(0, deposit.x(2 * j));
          local.set_z(0, deposit.z(2 * j));
          local.set_x(1, deposit.x(2 * j + 1));
          local.set_z(1, deposit.z(2 * j + 1));
          PauliOp reduced = reduce_mod_bell(local);
          bus_deposits->set_x(bus_base + 2 * j, reduced.x(0));
          bus_deposits->set_z(bus_base + 2 * j, reduced.z(0));
          bus_deposits->set_x(bus_base + 2 * j + 1, reduced.x(1));
          bus_deposits->set_z(bus_base + 2 * j + 1, reduced.z(1));
        }
      }
    }
    bus_base += 2 * k;
    if (!any) continue;
    PauliOp eff = propagate_swap_chain(chain, k);
    out.set_x(static_cast<std::uint32_t>(2 * r), eff.x(0));
    out.set_z(static_cast<std::uint32_t>(2 * r), eff.z(0));
    out.set_x(static_cast<std::uint32_t>(2 * r + 1), eff.x(1));
    out.set_z(static_cast<std::uint32_t>(2 * r + 1), eff.z(1));
  }
  return out;
}

PauliOp surrogate_sample_profiles(std::span<const RobustnessProfile> profiles, NoiseStrength p, Rng& rng) {
  std::uint32_t total = 0;
  for (const auto& prof : profiles) total += prof.r;
  PauliOp out = PauliOp::identity(total);
  std::uint32_t base = 0;
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    const auto& prof = profiles[j];
    if (p.p > prof.p0) {
      throw ThresholdExceeded(fmt::format("profile {} threshold exceeded", j), static_cast<int>(j));
    }
    if (rng.bernoulli(prof.eval(p.p))) {
      std::vector<std::uint32_t> qs;
      for (std::uint32_t q = 0; q < prof.r; ++q) qs.push_back(base + q);
      PauliOp deposit = random_nonidentity_pauli(total, qs, rng);
      if (prof.r == 2 && prof.r_tilde == 1) {
        PauliOp local = PauliOp::identity(2);
        local.set_x(0, deposit.x(base));
        local.set_z(0, deposit.z(base));
        local.set_x(1, deposit.x(base + 1));
        local.set_z(1, deposit.z(base + 1));
        PauliOp reduced = reduce_mod_bell(local);
        deposit = PauliOp::identity(total);
        deposit.set_x(base, reduced.x(0));
        deposit.set_z(base, reduced.z(0));
        deposit.set_x(base + 1, reduced.x(1));
        deposit.set_z(base + 1, reduced.z(1));
      }
      out = multiply_unsigned(out, deposit);
    }
    base += prof.r;
  }
  return out;
}

}  // namespace qlocal
