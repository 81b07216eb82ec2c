#include "qlocal/stabsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <unordered_map>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

using detail::g_word;

std::optional<std::uint8_t> OutcomeRecord::lookup(std::uint32_t id) const {
  for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
    if (it->first == id) return it->second;
  }
  return std::nullopt;
}

std::uint8_t OutcomeRecord::parity_of(std::span<const std::uint32_t> ids) const {
  std::uint8_t parity = 0;
  for (auto id : ids) {
    auto bit = lookup(id);
    if (!bit) throw PreconditionError(fmt::format("parity references undefined outcome id {}", id));
    parity ^= *bit;
  }
  return parity;
}

Tableau::Tableau(std::uint32_t n)
    : n_(n), words_((n + 63) / 64), x_((2ull * n + 1) * words_, 0), z_((2ull * n + 1) * words_, 0),
      sign_(2ull * n + 1, 0) {
  for (std::uint32_t i = 0; i < n_; ++i) {
    set_xbit(i, i, true);        // destabilizer X_i
    set_zbit(n_ + i, i, true);   // stabilizer Z_i
  }
}

void Tableau::set_xbit(std::uint32_t row, std::uint32_t q, bool v) {
  auto& w = x_[row * words_ + (q >> 6)];
  if (v)
    w |= 1ull << (q & 63);
  else
    w &= ~(1ull << (q & 63));
}

void Tableau::set_zbit(std::uint32_t row, std::uint32_t q, bool v) {
  auto& w = z_[row * words_ + (q >> 6)];
  if (v)
    w |= 1ull << (q & 63);
  else
    w &= ~(1ull << (q & 63));
}

void Tableau::rowsum(std::uint32_t h, std::uint32_t i) {
  int phase = 2 * sign_[h] + 2 * sign_[i];
  for (std::uint32_t w = 0; w < words_; ++w) {
    phase += g_word(x_[i * words_ + w], z_[i * words_ + w], x_[h * words_ + w], z_[h * words_ + w]);
  }
  phase = ((phase % 4) + 4) % 4;
  QLOCAL_ASSERT(phase == 0 || phase == 2);
  sign_[h] = phase == 2 ? 1 : 0;
  for (std::uint32_t w = 0; w < words_; ++w) {
    x_[h * words_ + w] ^= x_[i * words_ + w];
    z_[h * words_ + w] ^= z_[i * words_ + w];
  }
}

void Tableau::apply_gate(const GateInstance& g) {
  QLOCAL_ASSERT(g.q0 < n_ && (!is_two_qubit(g.gate) || (g.q1 < n_ && g.q1 != g.q0)));
  const std::uint32_t rows = 2 * n_;
  switch (g.gate) {
    case CliffordGate::I:
      break;
    case CliffordGate::X:
      for (std::uint32_t i = 0; i < rows; ++i) sign_[i] ^= zbit(i, g.q0);
      break;
    case CliffordGate::Y:
      for (std::uint32_t i = 0; i < rows; ++i) sign_[i] ^= xbit(i, g.q0) ^ zbit(i, g.q0);
      break;
    case CliffordGate::Z:
      for (std::uint32_t i = 0; i < rows; ++i) sign_[i] ^= xbit(i, g.q0);
      break;
    case CliffordGate::H:
      for (std::uint32_t i = 0; i < rows; ++i) {
        bool xa = xbit(i, g.q0), za = zbit(i, g.q0);
        sign_[i] ^= xa && za;
        set_xbit(i, g.q0, za);
        set_zbit(i, g.q0, xa);
      }
      break;
    case CliffordGate::S:
      for (std::uint32_t i = 0; i < rows; ++i) {
        bool xa = xbit(i, g.q0), za = zbit(i, g.q0);
        sign_[i] ^= xa && za;
        set_zbit(i, g.q0, xa ^ za);
      }
      break;
    case CliffordGate::Sdg:
      for (std::uint32_t i = 0; i < rows; ++i) {
        bool xa = xbit(i, g.q0), za = zbit(i, g.q0);
        sign_[i] ^= xa && !za;
        set_zbit(i, g.q0, xa ^ za);
      }
      break;
    case CliffordGate::CNOT:
      for (std::uint32_t i = 0; i < rows; ++i) {
        bool xa = xbit(i, g.q0), za = zbit(i, g.q0);
        bool xb = xbit(i, g.q1), zb = zbit(i, g.q1);
        sign_[i] ^= xa && zb && (xb == za);
        set_xbit(i, g.q1, xb ^ xa);
        set_zbit(i, g.q0, za ^ zb);
      }
      break;
    case CliffordGate::CZ:
      apply_gate({CliffordGate::H, g.q1});
      apply_gate({CliffordGate::CNOT, g.q0, g.q1});
      apply_gate({CliffordGate::H, g.q1});
      break;
    case CliffordGate::Swap:
      for (std::uint32_t i = 0; i < rows; ++i) {
        bool xa = xbit(i, g.q0), za = zbit(i, g.q0);
        bool xb = xbit(i, g.q1), zb = zbit(i, g.q1);
        set_xbit(i, g.q0, xb);
        set_zbit(i, g.q0, zb);
        set_xbit(i, g.q1, xa);
        set_zbit(i, g.q1, za);
      }
      break;
  }
}

void Tableau::apply_pauli(const PauliOp& p) {
  QLOCAL_ASSERT(p.num_qubits() == n_);
  auto px = p.x_words();
  auto pz = p.z_words();
  for (std::uint32_t i = 0; i < 2 * n_; ++i) {
    int parity = 0;
    for (std::uint32_t w = 0; w < words_; ++w) {
      parity ^= std::popcount((x_[i * words_ + w] & pz[w]) ^ (z_[i * words_ + w] & px[w])) & 1;
    }
    sign_[i] ^= parity;
  }
}

int Tableau::peek_z(std::uint32_t q) const {
  for (std::uint32_t p = n_; p < 2 * n_; ++p) {
    if (xbit(p, q)) return -1;
  }
  // Deterministic: accumulate the stabilizer combination indicated by the
  // destabilizer X bits into the scratch row.
  Tableau& self = const_cast<Tableau&>(*this);
  const std::uint32_t scratch = 2 * n_;
  std::fill(self.x_.begin() + scratch * words_, self.x_.begin() + (scratch + 1) * words_, 0);
  std::fill(self.z_.begin() + scratch * words_, self.z_.begin() + (scratch + 1) * words_, 0);
  self.sign_[scratch] = 0;
  for (std::uint32_t i = 0; i < n_; ++i) {
    if (xbit(i, q)) self.rowsum(scratch, n_ + i);
  }
  return sign_[scratch];
}

Tableau::MeasResult Tableau::measure_z(std::uint32_t q, Rng* rng, int forced) {
  QLOCAL_ASSERT(q < n_);
  std::uint32_t p = 2 * n_;
  for (std::uint32_t i = n_; i < 2 * n_; ++i) {
    if (xbit(i, q)) {
      p = i;
      break;
    }
  }
  if (p < 2 * n_) {
    // Random outcome.
    std::uint8_t outcome;
    if (forced >= 0) {
      outcome = static_cast<std::uint8_t>(forced);
    } else {
      QLOCAL_ASSERT(rng != nullptr);
      outcome = rng->next_bit() ? 1 : 0;
    }
    for (std::uint32_t i = 0; i < 2 * n_; ++i) {
      // Row p - n is overwritten below; it may anticommute with row p, so
      // never rowsum into it.
      if (i != p && i != p - n_ && xbit(i, q)) rowsum(i, p);
    }
    // Destabilizer p-n := old stabilizer p; stabilizer p := +/- Z_q.
    std::copy(x_.begin() + p * words_, x_.begin() + (p + 1) * words_, x_.begin() + (p - n_) * words_);
    std::copy(z_.begin() + p * words_, z_.begin() + (p + 1) * words_, z_.begin() + (p - n_) * words_);
    sign_[p - n_] = sign_[p];
    std::fill(x_.begin() + p * words_, x_.begin() + (p + 1) * words_, 0);
    std::fill(z_.begin() + p * words_, z_.begin() + (p + 1) * words_, 0);
    set_zbit(p, q, true);
    sign_[p] = outcome;
    return {true, outcome};
  }
  int det = peek_z(q);
  QLOCAL_ASSERT(det >= 0);
  return {false, static_cast<std::uint8_t>(det)};
}

Tableau::MeasResult Tableau::reset_z(std::uint32_t q, Rng* rng, int forced) {
  MeasResult m = measure_z(q, rng, forced);
  if (m.outcome) apply_gate({CliffordGate::X, q});
  return m;
}

PauliOp Tableau::row_pauli(std::uint32_t row) const {
  PauliOp p = PauliOp::identity(n_);
  for (std::uint32_t w = 0; w < words_; ++w) {
    p.x_words()[w] = x_[row * words_ + w];
    p.z_words()[w] = z_[row * words_ + w];
  }
  p.set_negative(sign_[row] != 0);
  return p;
}

namespace {

// In-place reduced row echelon form over x-plane columns and then z-plane
// columns of the symplectic matrix; yields the unique canonical generating
// set of the group, propagating signs exactly. After the x-pass the rows
// below the pivot region are pure-Z, so z-pass eliminations never disturb
// x bits.
void canonicalize(std::vector<PauliOp>& rows) {
  if (rows.empty()) return;
  const std::uint32_t n = rows[0].num_qubits();
  std::size_t pivot = 0;
  auto eliminate = [&](std::uint32_t q, bool x_plane) {
    std::size_t found = rows.size();
    for (std::size_t i = pivot; i < rows.size(); ++i) {
      if (x_plane ? rows[i].x(q) : rows[i].z(q)) {
        found = i;
        break;
      }
    }
    if (found == rows.size()) return;
    std::swap(rows[pivot], rows[found]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == pivot) continue;
      if (x_plane ? rows[i].x(q) : rows[i].z(q)) {
        int residual = 0;
        rows[i] = multiply(rows[i], rows[pivot], &residual);
        QLOCAL_ASSERT(residual == 0);
      }
    }
    ++pivot;
  };
  for (std::uint32_t q = 0; q < n; ++q) eliminate(q, true);
  for (std::uint32_t q = 0; q < n; ++q) eliminate(q, false);
}

}  // namespace

std::vector<PauliOp> Tableau::canonical_stabilizers() const {
  std::vector<PauliOp> rows;
  rows.reserve(n_);
  for (std::uint32_t i = n_; i < 2 * n_; ++i) rows.push_back(row_pauli(i));
  canonicalize(rows);
  return rows;
}

namespace {

// Reduces `target` against a canonical generating set; membership (with
// exact sign) iff the residue is the positive identity and no i-factor was
// picked up along the way.
bool reduce_membership(const std::vector<PauliOp>& rows, PauliOp d) {
  const std::uint32_t n = d.num_qubits();
  int residual_total = 0;
  for (const auto& row : rows) {
    std::uint32_t lead = n;
    bool lead_x = false;
    for (std::uint32_t q = 0; q < n; ++q) {
      if (row.x(q)) {
        lead = q;
        lead_x = true;
        break;
      }
      if (row.z(q)) {
        lead = q;
        lead_x = false;
        break;
      }
    }
    if (lead == n) continue;
    if (lead_x ? d.x(lead) : d.z(lead)) {
      int residual = 0;
      d = multiply(d, row, &residual);
      residual_total += residual;
    }
  }
  return d.is_identity() && !d.negative() && residual_total % 2 == 0;
}

}  // namespace

bool CanonicalGroup::contains(const PauliOp& target) const {
  return reduce_membership(rows_, target);
}

bool Tableau::group_contains(const PauliOp& target) const {
  QLOCAL_ASSERT(target.num_qubits() == n_);
  return reduce_membership(canonical_stabilizers(), target);
}

std::vector<PauliOp> Tableau::reduced_stabilizers(std::span<const std::uint32_t> subset) const {
  std::vector<bool> inside(n_, false);
  for (auto q : subset) {
    QLOCAL_ASSERT(q < n_);
    inside[q] = true;
  }
  std::vector<PauliOp> rows;
  rows.reserve(n_);
  for (std::uint32_t i = n_; i < 2 * n_; ++i) rows.push_back(row_pauli(i));

  // Eliminate on outside columns (x then z per outside qubit).
  std::size_t pivot = 0;
  for (std::uint32_t q = 0; q < n_; ++q) {
    if (inside[q]) continue;
    for (bool x_plane : {true, false}) {
      std::size_t found = rows.size();
      for (std::size_t i = pivot; i < rows.size(); ++i) {
        if (x_plane ? rows[i].x(q) : rows[i].z(q)) {
          found = i;
          break;
        }
      }
      if (found == rows.size()) continue;
      std::swap(rows[pivot], rows[found]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == pivot) continue;
        if (x_plane ? rows[i].x(q) : rows[i].z(q)) {
          int residual = 0;
          rows[i] = multiply(rows[i], rows[pivot], &residual);
          QLOCAL_ASSERT(residual == 0);
        }
      }
      ++pivot;
    }
  }
  // Rows past the pivot region act trivially outside the subset.
  std::vector<PauliOp> local;
  for (std::size_t i = pivot; i < rows.size(); ++i) {
    for (std::uint32_t q = 0; q < n_; ++q) {
      QLOCAL_ASSERT(inside[q] || (!rows[i].x(q) && !rows[i].z(q)));
    }
    PauliOp small = PauliOp::identity(static_cast<std::uint32_t>(subset.size()));
    small.set_negative(rows[i].negative());
    for (std::size_t k = 0; k < subset.size(); ++k) {
      small.set_x(static_cast<std::uint32_t>(k), rows[i].x(subset[k]));
      small.set_z(static_cast<std::uint32_t>(k), rows[i].z(subset[k]));
    }
    local.push_back(std::move(small));
  }
  if (local.size() != subset.size()) {
    throw PreconditionError(
        fmt::format("reduced_stabilizers: subset is entangled with its complement (local rank {} < {})",
                    local.size(), subset.size()));
  }
  canonicalize(local);
  return local;
}

bool check_bell(const CanonicalGroup& group, std::uint32_t n, std::uint32_t q1, std::uint32_t q2) {
  PauliOp xx = PauliOp::identity(n);
  xx.set_x(q1, true);
  xx.set_x(q2, true);
  PauliOp zz = PauliOp::identity(n);
  zz.set_z(q1, true);
  zz.set_z(q2, true);
  return group.contains(xx) && group.contains(zz);
}

bool check_bell(const Tableau& t, std::uint32_t q1, std::uint32_t q2) {
  return check_bell(CanonicalGroup(t), t.num_qubits(), q1, q2);
}

bool tableau_equivalent_under_relabeling(const Tableau& t1, const Tableau& t2,
                                         std::span<const std::pair<std::uint32_t, std::uint32_t>> mapping) {
  std::vector<std::uint32_t> sub1, sub2;
  for (auto [a, b] : mapping) {
    sub1.push_back(a);
    sub2.push_back(b);
  }
  auto g1 = t1.reduced_stabilizers(sub1);
  auto g2 = t2.reduced_stabilizers(sub2);
  // Both are re-indexed to mapping order, so direct comparison is the
  // relabeled comparison.
  return g1 == g2;
}

namespace {

class Executor {
 public:
  Executor(const AdaptiveCircuit& circuit, const ErrorSchedule& schedule)
      : circuit_(circuit), schedule_(schedule) {
    if (circuit.contains_magic()) {
      throw PreconditionError("circuit contains magic-state preparation; stabilizer simulation is Clifford-only");
    }
    if (schedule.errors.size() != circuit.depth() + 1) {
      throw PreconditionError(fmt::format("error schedule has {} boundaries, circuit depth {} needs {}",
                                          schedule.errors.size(), circuit.depth(), circuit.depth() + 1));
    }
    for (const auto& e : schedule.errors) {
      if (e.num_qubits() != circuit.n) {
        throw PreconditionError("error schedule qubit count mismatch");
      }
    }
  }

  // Applies ops; on a measurement-like random event with no forced value,
  // consults rng.
  static void apply_op(Tableau& t, const PrimOp& op, OutcomeRecord& record, Rng* rng) {
    switch (op.kind) {
      case OpKind::PrepZero:
        t.reset_z(op.q0, rng);
        break;
      case OpKind::PrepMagic:
        throw PreconditionError("magic-state preparation is not simulable");
      case OpKind::Clifford1:
        t.apply_gate({op.gate, op.q0});
        break;
      case OpKind::Clifford2:
        t.apply_gate({op.gate, op.q0, op.q1});
        break;
      case OpKind::MeasureZ: {
        auto m = t.measure_z(op.q0, rng);
        record.push(op.outcome_id, m.outcome);
        break;
      }
      case OpKind::CtrlPauli: {
        std::uint8_t parity = record.parity_of(op.parity_of);
        if (parity) {
          t.apply_gate({op.axis == PauliAxis::X ? CliffordGate::X : CliffordGate::Z, op.q0});
        }
        break;
      }
      case OpKind::CtrlOpaque:
        throw PreconditionError("opaque classical control is not simulable");
    }
  }

  RunResult run(Rng& rng) const {
    Tableau t(circuit_.n);
    OutcomeRecord record;
    t.apply_pauli(schedule_.errors[0]);
    for (std::size_t layer = 0; layer < circuit_.layers.size(); ++layer) {
      for (const auto& op : circuit_.layers[layer].ops) apply_op(t, op, record, &rng);
      t.apply_pauli(schedule_.errors[layer + 1]);
    }
    return RunResult{std::move(record), std::move(t)};
  }

  std::vector<Branch> run_branches(std::size_t max_branches) const {
    std::vector<Branch> leaves;
    std::uint32_t log2_max = 0;
    while ((1ull << (log2_max + 1)) <= max_branches) ++log2_max;
    Tableau t0(circuit_.n);
    t0.apply_pauli(schedule_.errors[0]);
    descend(std::move(t0), OutcomeRecord{}, 0, 0, 0, leaves, max_branches, log2_max);
    return leaves;
  }

 private:
  void descend(Tableau t, OutcomeRecord record, std::size_t layer, std::size_t op_index,
               std::uint32_t log2_inv_prob, std::vector<Branch>& leaves, std::size_t max_branches,
               std::uint32_t log2_max) const {
    for (std::size_t li = layer; li < circuit_.layers.size(); ++li) {
      const auto& ops = circuit_.layers[li].ops;
      for (std::size_t oi = (li == layer ? op_index : 0); oi < ops.size(); ++oi) {
        const PrimOp& op = ops[oi];
        if (op.kind == OpKind::MeasureZ || op.kind == OpKind::PrepZero) {
          if (t.peek_z(op.q0) < 0) {
            // Random: fork both outcomes.
            if (log2_inv_prob >= log2_max || leaves.size() + 2 > max_branches) {
              throw BranchBudgetExceeded(
                  fmt::format("branch enumeration exceeds budget of {} leaves", max_branches));
            }
            for (int forced = 0; forced <= 1; ++forced) {
              Tableau tc = t;
              OutcomeRecord rc = record;
              if (op.kind == OpKind::MeasureZ) {
                auto m = tc.measure_z(op.q0, nullptr, forced);
                rc.push(op.outcome_id, m.outcome);
              } else {
                tc.reset_z(op.q0, nullptr, forced);
              }
              descend(std::move(tc), std::move(rc), li, oi + 1, log2_inv_prob + 1, leaves, max_branches,
                      log2_max);
            }
            return;
          }
        }
        apply_op(t, op, record, nullptr);
      }
      t.apply_pauli(schedule_.errors[li + 1]);
    }
    leaves.push_back(Branch{std::move(record), log2_inv_prob, std::move(t)});
  }

  const AdaptiveCircuit& circuit_;
  const ErrorSchedule& schedule_;
};

}  // namespace

RunResult run(const AdaptiveCircuit& circuit, const ErrorSchedule& schedule, Rng& rng) {
  return Executor(circuit, schedule).run(rng);
}

RunResult run(const AdaptiveCircuit& circuit, Rng& rng) {
  return run(circuit, ErrorSchedule::all_identity(circuit.n, circuit.depth()), rng);
}

std::vector<Branch> run_all_branches(const AdaptiveCircuit& circuit, const ErrorSchedule& schedule,
                                     std::size_t max_branches) {
  return Executor(circuit, schedule).run_branches(max_branches);
}

std::vector<Branch> run_all_branches(const AdaptiveCircuit& circuit, std::size_t max_branches) {
  return run_all_branches(circuit, ErrorSchedule::all_identity(circuit.n, circuit.depth()), max_branches);
}

std::string outcome_key(const OutcomeRecord& record, std::span<const std::uint32_t> ids) {
  std::string key;
  for (auto id : ids) {
    auto bit = record.lookup(id);
    if (!bit) throw PreconditionError(fmt::format("branch lacks outcome id {}", id));
    key += fmt::format("{}={};", id, *bit);
  }
  return key;
}

namespace {

DyadicDist accumulate(std::span<const Branch> branches,
                      const std::function<std::string(const Branch&)>& key_of) {
  DyadicDist dist;
  for (const auto& b : branches) dist.log2_den = std::max(dist.log2_den, b.log2_inv_prob);
  for (const auto& b : branches) {
    dist.weights[key_of(b)] += 1ull << (dist.log2_den - b.log2_inv_prob);
  }
  return dist;
}

}  // namespace

DyadicDist marginal_distribution(std::span<const Branch> branches, std::span<const std::uint32_t> ids) {
  return accumulate(branches, [&](const Branch& b) { return outcome_key(b.outcomes, ids); });
}

DyadicDist joint_state_distribution(std::span<const Branch> branches, std::span<const std::uint32_t> ids) {
  return accumulate(branches, [&](const Branch& b) {
    return outcome_key(b.outcomes, ids) + "|" + state_fingerprint(b.state);
  });
}

std::string DyadicDist::to_csv() const {
  std::string out = "outcome_string,numerator,log2_denominator\n";
  for (const auto& [key, num] : weights) {
    out += fmt::format("{},{},{}\n", key, num, log2_den);
  }
  return out;
}

bool same_distribution(const DyadicDist& a, const DyadicDist& b) {
  // Normalize away denominator differences (weights are totals of 2^k).
  if (a.log2_den >= b.log2_den) {
    std::uint32_t shift = a.log2_den - b.log2_den;
    if (a.weights.size() != b.weights.size()) return false;
    auto ita = a.weights.begin();
    auto itb = b.weights.begin();
    for (; ita != a.weights.end(); ++ita, ++itb) {
      if (ita->first != itb->first || ita->second != (itb->second << shift)) return false;
    }
    return true;
  }
  return same_distribution(b, a);
}

double tvd_against_counts(const DyadicDist& exact, const std::map<std::string, std::uint64_t>& counts,
                          std::uint64_t total) {
  QLOCAL_ASSERT(total > 0);
  double tvd = 0.0;
  double denom = std::pow(2.0, static_cast<double>(exact.log2_den));
  std::map<std::string, double> probs;
  for (const auto& [key, num] : exact.weights) probs[key] = static_cast<double>(num) / denom;
  for (const auto& [key, count] : counts) {
    double p = probs.count(key) ? probs[key] : 0.0;
    tvd += std::abs(static_cast<double>(count) / static_cast<double>(total) - p);
    probs.erase(key);
  }
  for (const auto& [key, p] : probs) tvd += p;
  return tvd / 2.0;
}

std::string state_fingerprint(const Tableau& t) {
  std::string out;
  for (const auto& g : t.canonical_stabilizers()) {
    out += g.to_text();
    out += '\n';
  }
  return out;
}

}  // namespace qlocal
