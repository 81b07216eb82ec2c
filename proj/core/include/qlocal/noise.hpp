#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qlocal/pauli.hpp"
#include "qlocal/rng.hpp"

namespace qlocal {

/// A local stochastic noise strength: Pr[F subset of supp(E)] <= p^|F|.
struct NoiseStrength {
  double p = 0.0;
  explicit NoiseStrength(double value);
  NoiseStrength() = default;
};

/// One Pauli error per layer boundary of a depth-T circuit: E(0)..E(T).
struct ErrorSchedule {
  std::vector<PauliOp> errors;

  static ErrorSchedule all_identity(std::uint32_t n, std::size_t depth);
  std::size_t boundaries() const { return errors.size(); }
};

/// Binary matrix over F2 with packed rows.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::uint32_t rows, std::uint32_t cols);

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  bool get(std::uint32_t r, std::uint32_t c) const;
  void set(std::uint32_t r, std::uint32_t c, bool v);
  std::uint32_t row_weight(std::uint32_t r) const;
  std::uint32_t col_weight(std::uint32_t c) const;

  /// y = M v over F2; `v` packed little-endian into 64-bit words.
  std::vector<std::uint64_t> mul_vec(std::span<const std::uint64_t> v) const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::uint32_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The linear classical control C(z) = X(Az) Z(Bz) applied to the first n1
/// qubits after measuring the last n2 qubits.
struct LinearControl {
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  BitMatrix A;
  BitMatrix B;

  LinearControl() = default;
  LinearControl(std::uint32_t n1_, std::uint32_t n2_);

  /// Uniform row weight of the nonzero rows of A and B, if the row-weight-w /
  /// column-weight<=1 hypothesis holds; 0 otherwise.
  std::uint32_t uniform_row_weight() const;
};

/// Canonical member of the local stochastic family: every qubit lands in the
/// support independently with probability exactly p, carrying a uniform
/// non-identity Pauli, so Pr[F subset of supp] = p^|F| with equality.
PauliOp sample_iid_noise(std::uint32_t n, NoiseStrength p, Rng& rng);

/// Correlated two-qubit bursts on consecutive qubit pairs: each pair bursts
/// independently with probability p^2 and then both qubits carry uniform
/// non-identity Paulis. Still local stochastic of strength p.
PauliOp sample_burst_noise(std::uint32_t n, NoiseStrength p, Rng& rng);

struct LsBoundRow {
  std::uint32_t subset_size = 0;
  std::vector<std::uint32_t> subset;
  double empirical = 0.0;
  double bound = 0.0;       // p^|F|
  double tolerance = 0.0;   // sigma_multiplier * binomial sigma at the bound
  bool pass = true;
};

struct LsBoundReport {
  std::vector<LsBoundRow> rows;
  bool pass = true;
  /// (trial_block, subset_size, subset, empirical_prob, bound, pass)
  std::string to_csv() const;
};

/// Empirical one-sided verifier of the defining inequality of local
/// stochastic noise over randomly drawn subsets F with |F| <= max_subset.
LsBoundReport estimate_ls_bound(std::span<const PauliOp> samples, NoiseStrength p,
                                std::uint32_t max_subset, std::uint32_t subsets_per_size, Rng& rng,
                                double sigma_multiplier = 3.0);

// Strength composition rules. All clamp at 1 (a strength above 1 is vacuous)
// and are monotone nondecreasing with value 0 at p = 0.
NoiseStrength strength_product_dependent(NoiseStrength p, NoiseStrength q);  // 2*max(sqrt p, sqrt q)
NoiseStrength strength_clifford(NoiseStrength p);                            // sqrt(2p)
NoiseStrength strength_product_disjoint(NoiseStrength p, NoiseStrength q);   // max(sqrt p, sqrt q)
NoiseStrength strength_adaptive(NoiseStrength p, std::uint32_t w);           // 4*p^(1/4w)
NoiseStrength strength_entanglement_swap(NoiseStrength p, std::uint32_t k);  // 4*(sqrt(2p))^(1/(4(k-1)))
NoiseStrength strength_teleport(NoiseStrength p);                            // 2^(17/8)*p^(1/8)

/// Commutes the error E = X(e)Z(f) on n1+n2 qubits through the measure-and-
/// correct circuit with control `ctrl`, yielding the exactly equivalent
/// after-circuit error F = X(e1 + A e2) Z(f1 + B e2) on the first n1 qubits.
/// Signs are deliberately not tracked on this path.
PauliOp commute_through_adaptive(const PauliOp& e, const LinearControl& ctrl);

/// Failure profile of a state-preparation circuit: below threshold p0 the
/// failure probability is bounded by f(p) = coeff_a * p^exp_b; the circuit
/// outputs r qubits and its minimal-support effective errors have weight at
/// most r_tilde.
struct RobustnessProfile {
  double p0 = 1.0;
  double coeff_a = 1.0;
  double exp_b = 1.0;
  std::uint32_t r = 1;
  std::uint32_t r_tilde = 1;

  RobustnessProfile() = default;
  RobustnessProfile(double p0_, double a, double b, std::uint32_t r_, std::uint32_t r_tilde_);

  double eval(double p) const;  // min(1, a*p^b); requires p <= p0
};

/// Effective output-noise strength of k robust circuits run in parallel:
/// (max_j f_j(p))^(1/r) with r = max r_j, or max r~_j when `use_r_tilde`.
/// Throws ThresholdExceeded (carrying the offending profile index) if p
/// exceeds any profile's threshold.
NoiseStrength parallel_repetition_bound(std::span<const RobustnessProfile> profiles, NoiseStrength p,
                                        bool use_r_tilde);

}  // namespace qlocal
