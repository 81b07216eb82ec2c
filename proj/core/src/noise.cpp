#include "qlocal/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void put_random_nonidentity(PauliOp& p, std::uint32_t q, Rng& rng) {
  switch (rng.uniform_u32(3)) {
    case 0: p.set_x(q, true); break;
    case 1: p.set_z(q, true); break;
    default:
      p.set_x(q, true);
      p.set_z(q, true);
      break;
  }
}

}  // namespace

NoiseStrength::NoiseStrength(double value) : p(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw PreconditionError(fmt::format("noise strength must be in [0,1], got {}", value));
  }
}

ErrorSchedule ErrorSchedule::all_identity(std::uint32_t n, std::size_t depth) {
  ErrorSchedule s;
  s.errors.assign(depth + 1, PauliOp::identity(n));
  return s;
}

BitMatrix::BitMatrix(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64), words_(static_cast<std::size_t>(rows) * words_per_row_, 0) {}

bool BitMatrix::get(std::uint32_t r, std::uint32_t c) const {
  QLOCAL_ASSERT(r < rows_ && c < cols_);
  return (words_[static_cast<std::size_t>(r) * words_per_row_ + (c >> 6)] >> (c & 63)) & 1ull;
}

void BitMatrix::set(std::uint32_t r, std::uint32_t c, bool v) {
  QLOCAL_ASSERT(r < rows_ && c < cols_);
  auto& w = words_[static_cast<std::size_t>(r) * words_per_row_ + (c >> 6)];
  if (v)
    w |= 1ull << (c & 63);
  else
    w &= ~(1ull << (c & 63));
}

std::uint32_t BitMatrix::row_weight(std::uint32_t r) const {
  QLOCAL_ASSERT(r < rows_);
  std::uint32_t total = 0;
  for (std::uint32_t w = 0; w < words_per_row_; ++w) {
    total += static_cast<std::uint32_t>(std::popcount(words_[static_cast<std::size_t>(r) * words_per_row_ + w]));
  }
  return total;
}

std::uint32_t BitMatrix::col_weight(std::uint32_t c) const {
  std::uint32_t total = 0;
  for (std::uint32_t r = 0; r < rows_; ++r) total += get(r, c) ? 1 : 0;
  return total;
}

std::vector<std::uint64_t> BitMatrix::mul_vec(std::span<const std::uint64_t> v) const {
  QLOCAL_ASSERT(v.size() >= words_per_row_);
  std::vector<std::uint64_t> out((rows_ + 63) / 64, 0);
  for (std::uint32_t r = 0; r < rows_; ++r) {
    int parity = 0;
    for (std::uint32_t w = 0; w < words_per_row_; ++w) {
      parity ^= std::popcount(words_[static_cast<std::size_t>(r) * words_per_row_ + w] & v[w]) & 1;
    }
    if (parity) out[r >> 6] |= 1ull << (r & 63);
  }
  return out;
}

LinearControl::LinearControl(std::uint32_t n1_, std::uint32_t n2_)
    : n1(n1_), n2(n2_), A(n1_, n2_), B(n1_, n2_) {}

std::uint32_t LinearControl::uniform_row_weight() const {
  std::uint32_t w = 0;
  for (const BitMatrix* m : {&A, &B}) {
    for (std::uint32_t r = 0; r < m->rows(); ++r) {
      std::uint32_t rw = m->row_weight(r);
      if (rw == 0) continue;
      if (w == 0)
        w = rw;
      else if (rw != w)
        return 0;
    }
    for (std::uint32_t c = 0; c < m->cols(); ++c) {
      if (m->col_weight(c) > 1) return 0;
    }
  }
  return w;
}

PauliOp sample_iid_noise(std::uint32_t n, NoiseStrength p, Rng& rng) {
  PauliOp e = PauliOp::identity(n);
  for (std::uint32_t q = 0; q < n; ++q) {
    if (rng.bernoulli(p.p)) put_random_nonidentity(e, q, rng);
  }
  return e;
}

PauliOp sample_burst_noise(std::uint32_t n, NoiseStrength p, Rng& rng) {
  PauliOp e = PauliOp::identity(n);
  double burst_prob = p.p * p.p;
  for (std::uint32_t q = 0; q + 1 < n; q += 2) {
    if (rng.bernoulli(burst_prob)) {
      put_random_nonidentity(e, q, rng);
      put_random_nonidentity(e, q + 1, rng);
    }
  }
  if (n % 2 == 1 && rng.bernoulli(burst_prob)) put_random_nonidentity(e, n - 1, rng);
  return e;
}

std::string LsBoundReport::to_csv() const {
  std::string out = "trial_block,subset_size,subset,empirical_prob,bound,pass\n";
  for (const auto& row : rows) {
    std::string subset;
    for (std::size_t i = 0; i < row.subset.size(); ++i) {
      if (i) subset += '|';
      subset += fmt::format("{}", row.subset[i]);
    }
    out += fmt::format("0,{},{},{:.12g},{:.12g},{}\n", row.subset_size, subset, row.empirical, row.bound,
                       row.pass ? 1 : 0);
  }
  return out;
}

LsBoundReport estimate_ls_bound(std::span<const PauliOp> samples, NoiseStrength p,
                                std::uint32_t max_subset, std::uint32_t subsets_per_size, Rng& rng,
                                double sigma_multiplier) {
  if (samples.empty()) throw PreconditionError("estimate_ls_bound: empty sample list");
  if (max_subset > 4) throw PreconditionError("estimate_ls_bound: max_subset must be <= 4");
  const std::uint32_t n = samples[0].num_qubits();
  LsBoundReport report;
  for (std::uint32_t size = 1; size <= std::min(max_subset, n); ++size) {
    for (std::uint32_t s = 0; s < subsets_per_size; ++s) {
      std::vector<std::uint32_t> subset;
      while (subset.size() < size) {
        std::uint32_t q = rng.uniform_u32(n);
        if (std::find(subset.begin(), subset.end(), q) == subset.end()) subset.push_back(q);
      }
      std::sort(subset.begin(), subset.end());
      std::size_t hits = 0;
      for (const auto& e : samples) {
        bool all = true;
        for (auto q : subset) {
          if (!e.in_support(q)) {
            all = false;
            break;
          }
        }
        if (all) ++hits;
      }
      LsBoundRow row;
      row.subset_size = size;
      row.subset = std::move(subset);
      row.empirical = static_cast<double>(hits) / static_cast<double>(samples.size());
      row.bound = std::pow(p.p, static_cast<double>(size));
      double b = clamp01(row.bound);
      row.tolerance = sigma_multiplier * std::sqrt(b * (1.0 - b) / static_cast<double>(samples.size()));
      row.pass = row.empirical <= b + row.tolerance;
      report.pass = report.pass && row.pass;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

NoiseStrength strength_product_dependent(NoiseStrength p, NoiseStrength q) {
  return NoiseStrength(clamp01(2.0 * std::max(std::sqrt(p.p), std::sqrt(q.p))));
}

NoiseStrength strength_clifford(NoiseStrength p) { return NoiseStrength(clamp01(std::sqrt(2.0 * p.p))); }

NoiseStrength strength_product_disjoint(NoiseStrength p, NoiseStrength q) {
  return NoiseStrength(clamp01(std::max(std::sqrt(p.p), std::sqrt(q.p))));
}

NoiseStrength strength_adaptive(NoiseStrength p, std::uint32_t w) {
  if (w == 0) throw PreconditionError("strength_adaptive: row weight w must be positive");
  if (p.p == 0.0) return NoiseStrength(0.0);
  return NoiseStrength(clamp01(4.0 * std::pow(p.p, 1.0 / (4.0 * w))));
}

NoiseStrength strength_entanglement_swap(NoiseStrength p, std::uint32_t k) {
  if (k < 2) throw PreconditionError("strength_entanglement_swap: chain length k must be >= 2");
  if (p.p == 0.0) return NoiseStrength(0.0);
  double base = std::sqrt(2.0 * p.p);
  return NoiseStrength(clamp01(4.0 * std::pow(base, 1.0 / (4.0 * (k - 1)))));
}

NoiseStrength strength_teleport(NoiseStrength p) {
  if (p.p == 0.0) return NoiseStrength(0.0);
  return NoiseStrength(clamp01(std::pow(2.0, 17.0 / 8.0) * std::pow(p.p, 1.0 / 8.0)));
}

PauliOp commute_through_adaptive(const PauliOp& e, const LinearControl& ctrl) {
  const std::uint32_t n = ctrl.n1 + ctrl.n2;
  if (e.num_qubits() != n) {
    throw PreconditionError(
        fmt::format("commute_through_adaptive: error acts on {} qubits, control expects {}", e.num_qubits(), n));
  }
  // Split e = (e1, e2), f = (f1, f2) across the A1 | A2 boundary.
  std::vector<std::uint64_t> e2((ctrl.n2 + 63) / 64, 0);
  for (std::uint32_t q = 0; q < ctrl.n2; ++q) {
    if (e.x(ctrl.n1 + q)) e2[q >> 6] |= 1ull << (q & 63);
  }
  auto ae2 = ctrl.A.mul_vec(e2);
  auto be2 = ctrl.B.mul_vec(e2);
  PauliOp f = PauliOp::identity(ctrl.n1);
  for (std::uint32_t q = 0; q < ctrl.n1; ++q) {
    bool ax = (ae2[q >> 6] >> (q & 63)) & 1ull;
    bool bz = (be2[q >> 6] >> (q & 63)) & 1ull;
    f.set_x(q, e.x(q) ^ ax);
    f.set_z(q, e.z(q) ^ bz);
  }
  return f;
}

RobustnessProfile::RobustnessProfile(double p0_, double a, double b, std::uint32_t r_, std::uint32_t r_tilde_)
    : p0(p0_), coeff_a(a), exp_b(b), r(r_), r_tilde(r_tilde_) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw PreconditionError(fmt::format("profile threshold p0 must be in (0,1], got {}", p0));
  if (!(coeff_a > 0.0) || !(exp_b > 0.0)) {
    throw PreconditionError("profile strength map must have a > 0 and b > 0");
  }
  if (r_tilde < 1 || r_tilde > r) {
    throw PreconditionError(fmt::format("profile needs 1 <= r_tilde <= r, got r_tilde={} r={}", r_tilde, r));
  }
}

double RobustnessProfile::eval(double p) const {
  QLOCAL_ASSERT(p >= 0.0 && p <= p0);
  if (p == 0.0) return 0.0;
  return std::min(1.0, coeff_a * std::pow(p, exp_b));
}

NoiseStrength parallel_repetition_bound(std::span<const RobustnessProfile> profiles, NoiseStrength p,
                                        bool use_r_tilde) {
  if (profiles.empty()) throw PreconditionError("parallel_repetition_bound: no profiles");
  double worst_f = 0.0;
  std::uint32_t r = 1;
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    const auto& prof = profiles[j];
    if (p.p > prof.p0) {
      throw ThresholdExceeded(
          fmt::format("p={} exceeds threshold p0={} of profile {}", p.p, prof.p0, j), static_cast<int>(j));
    }
    worst_f = std::max(worst_f, prof.eval(p.p));
    r = std::max(r, use_r_tilde ? prof.r_tilde : prof.r);
  }
  if (worst_f == 0.0) return NoiseStrength(0.0);
  return NoiseStrength(clamp01(std::pow(worst_f, 1.0 / static_cast<double>(r))));
}

}  // namespace qlocal
