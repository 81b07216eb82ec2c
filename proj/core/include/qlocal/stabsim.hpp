#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlocal/circuit.hpp"
#include "qlocal/noise.hpp"
#include "qlocal/pauli.hpp"
#include "qlocal/rng.hpp"

namespace qlocal {

/// Measurement outcomes keyed by outcome id, in execution order.
struct OutcomeRecord {
  std::vector<std::pair<std::uint32_t, std::uint8_t>> ordered;

  std::optional<std::uint8_t> lookup(std::uint32_t id) const;
  std::uint8_t parity_of(std::span<const std::uint32_t> ids) const;
  void push(std::uint32_t id, std::uint8_t bit) { ordered.emplace_back(id, bit); }
};

/// Aaronson-Gottesman stabilizer tableau with destabilizers and sign bits.
/// Signs are tracked here (outcome distributions depend on them), unlike the
/// noise-calculus path.
class Tableau {
 public:
  explicit Tableau(std::uint32_t n);

  std::uint32_t num_qubits() const { return n_; }

  void apply_gate(const GateInstance& g);
  void apply_pauli(const PauliOp& p);

  struct MeasResult {
    bool random = false;
    std::uint8_t outcome = 0;
  };
  /// Z-basis measurement projecting the qubit; `forced` (0/1) selects the
  /// branch when the outcome is random (required when rng == nullptr).
  MeasResult measure_z(std::uint32_t q, Rng* rng, int forced = -1);
  /// -1 when the outcome is random, else the deterministic outcome.
  int peek_z(std::uint32_t q) const;

  /// Resets the qubit to |0> (measure and correct; may be a random branch
  /// internally when the qubit is entangled).
  MeasResult reset_z(std::uint32_t q, Rng* rng, int forced = -1);

  /// Unique reduced-row-echelon generating set, signs included.
  std::vector<PauliOp> canonical_stabilizers() const;
  /// Exact membership including the sign of `target`. Canonicalizes on every
  /// call; use CanonicalGroup for repeated queries against one state.
  bool group_contains(const PauliOp& target) const;
  /// Generators of the subgroup supported inside `subset`, re-indexed to
  /// [0, |subset|) in subset order. Throws PreconditionError if the subset is
  /// entangled with its complement (local rank < |subset|).
  std::vector<PauliOp> reduced_stabilizers(std::span<const std::uint32_t> subset) const;

 private:
  std::uint32_t n_;
  std::uint32_t words_;
  // Rows 0..n-1 destabilizers, n..2n-1 stabilizers, row 2n scratch.
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  std::vector<std::uint8_t> sign_;

  bool xbit(std::uint32_t row, std::uint32_t q) const { return (x_[row * words_ + (q >> 6)] >> (q & 63)) & 1ull; }
  bool zbit(std::uint32_t row, std::uint32_t q) const { return (z_[row * words_ + (q >> 6)] >> (q & 63)) & 1ull; }
  void set_xbit(std::uint32_t row, std::uint32_t q, bool v);
  void set_zbit(std::uint32_t row, std::uint32_t q, bool v);
  void rowsum(std::uint32_t h, std::uint32_t i);
  PauliOp row_pauli(std::uint32_t row) const;
};

/// A stabilizer group frozen in canonical form for repeated exact membership
/// queries (symplectic Gaussian elimination happens once, at construction).
class CanonicalGroup {
 public:
  explicit CanonicalGroup(const Tableau& t) : rows_(t.canonical_stabilizers()) {}
  explicit CanonicalGroup(std::vector<PauliOp> canonical_rows) : rows_(std::move(canonical_rows)) {}

  const std::vector<PauliOp>& rows() const { return rows_; }
  bool contains(const PauliOp& target) const;

 private:
  std::vector<PauliOp> rows_;
};

bool check_bell(const Tableau& t, std::uint32_t q1, std::uint32_t q2);
bool check_bell(const CanonicalGroup& group, std::uint32_t n, std::uint32_t q1, std::uint32_t q2);

/// True iff the canonical reduced stabilizer groups agree after relabeling
/// t1's qubit mapping[i].first as t2's mapping[i].second.
bool tableau_equivalent_under_relabeling(const Tableau& t1, const Tableau& t2,
                                         std::span<const std::pair<std::uint32_t, std::uint32_t>> mapping);

struct RunResult {
  OutcomeRecord outcomes;
  Tableau state;
};

/// Executes the circuit interleaved with the error schedule: E(0) first, then
/// alternately layer t and E(t). Clifford-only circuits; PrepMagic throws.
RunResult run(const AdaptiveCircuit& circuit, const ErrorSchedule& schedule, Rng& rng);
RunResult run(const AdaptiveCircuit& circuit, Rng& rng);

struct Branch {
  OutcomeRecord outcomes;
  std::uint32_t log2_inv_prob = 0;  // branch probability is 2^-this
  Tableau state;
};

/// Exact output distribution by enumerating every random measurement branch
/// (probabilities are dyadic). Throws BranchBudgetExceeded when more than
/// `max_branches` leaves would be needed.
std::vector<Branch> run_all_branches(const AdaptiveCircuit& circuit, const ErrorSchedule& schedule,
                                     std::size_t max_branches = (1u << 20));
std::vector<Branch> run_all_branches(const AdaptiveCircuit& circuit, std::size_t max_branches = (1u << 20));

/// An exact dyadic distribution over outcome strings.
struct DyadicDist {
  std::map<std::string, std::uint64_t> weights;  // numerators
  std::uint32_t log2_den = 0;

  /// (outcome_string, numerator, log2_denominator) rows.
  std::string to_csv() const;
};

std::string outcome_key(const OutcomeRecord& record, std::span<const std::uint32_t> ids);

/// Marginal of the branch distribution on the given outcome ids (which every
/// branch must define).
DyadicDist marginal_distribution(std::span<const Branch> branches, std::span<const std::uint32_t> ids);

/// Joint fingerprint distribution over (marginal outcomes, canonical
/// stabilizer group of the post-measurement state).
DyadicDist joint_state_distribution(std::span<const Branch> branches, std::span<const std::uint32_t> ids);

bool same_distribution(const DyadicDist& a, const DyadicDist& b);

/// Total variation distance between an exact dyadic distribution and an
/// empirical histogram over the same key space.
double tvd_against_counts(const DyadicDist& exact, const std::map<std::string, std::uint64_t>& counts,
                          std::uint64_t total);

std::string state_fingerprint(const Tableau& t);

}  // namespace qlocal
