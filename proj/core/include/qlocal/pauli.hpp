#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qlocal/gates.hpp"

namespace qlocal {

class Rng;

/// Sorted qubit indices where an operator acts non-trivially.
using SupportSet = std::vector<std::uint32_t>;

/// An n-qubit Pauli operator in the binary symplectic representation:
/// per-qubit X and Z bits packed into 64-bit words, plus a +/- sign.
///
/// The canonical single-qubit representatives are I, X, Z and Y = iXZ, so a
/// product of two canonical Paulis is i^k times a canonical Pauli with
/// k in {0,1,2,3}; even k folds into the sign. The sign is consumed only by
/// the tableau simulator; the noise calculus works on bare (x, z) bits and
/// never reads it.
class PauliOp {
 public:
  PauliOp() = default;
  static PauliOp identity(std::uint32_t n);
  static PauliOp single(std::uint32_t n, std::uint32_t qubit, char which);  // 'X','Y','Z'
  /// Parses the text form, e.g. "X0 Z3 Y7" (empty or "I" = identity); an
  /// optional leading '+'/'-' sets the sign.
  static PauliOp from_text(std::uint32_t n, const std::string& text);
  /// Parses the hex form produced by to_hex().
  static PauliOp from_hex(std::uint32_t n, const std::string& text);

  std::uint32_t num_qubits() const { return n_; }
  bool x(std::uint32_t q) const { return bit(xw_, q); }
  bool z(std::uint32_t q) const { return bit(zw_, q); }
  void set_x(std::uint32_t q, bool v) { set_bit(xw_, q, v); }
  void set_z(std::uint32_t q, bool v) { set_bit(zw_, q, v); }
  bool negative() const { return negative_; }
  void set_negative(bool v) { negative_ = v; }

  bool is_identity() const;           // ignores sign
  bool in_support(std::uint32_t q) const { return x(q) || z(q); }
  std::uint32_t support_weight() const;
  SupportSet support() const;
  /// True iff every support qubit of this operator is in `other`'s support.
  bool support_subset_of(const PauliOp& other) const;

  bool commutes_with(const PauliOp& other) const;

  /// In-place conjugation P -> U P U^dagger by a single generator gate.
  void conjugate(const GateInstance& g);

  std::span<const std::uint64_t> x_words() const { return xw_; }
  std::span<const std::uint64_t> z_words() const { return zw_; }
  std::span<std::uint64_t> x_words() { return xw_; }
  std::span<std::uint64_t> z_words() { return zw_; }

  std::string to_text() const;
  std::string to_hex() const;

  friend bool operator==(const PauliOp&, const PauliOp&) = default;

 private:
  static bool bit(const std::vector<std::uint64_t>& w, std::uint32_t q) {
    return (w[q >> 6] >> (q & 63)) & 1ull;
  }
  static void set_bit(std::vector<std::uint64_t>& w, std::uint32_t q, bool v) {
    if (v)
      w[q >> 6] |= 1ull << (q & 63);
    else
      w[q >> 6] &= ~(1ull << (q & 63));
  }

  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> xw_;
  std::vector<std::uint64_t> zw_;
  bool negative_ = false;

  friend PauliOp multiply(const PauliOp&, const PauliOp&, int*);
};

/// Group product a*b as a canonical Pauli. The total phase is
/// i^k * result; even parts of k are folded into the result's sign, and the
/// residual (0 or 1, nonzero exactly when a and b anticommute) is written to
/// `*residual_log_i` when requested.
PauliOp multiply(const PauliOp& a, const PauliOp& b, int* residual_log_i = nullptr);

namespace detail {
/// Word-parallel sum of the per-qubit i-exponents of (word1 qubit)*(word2
/// qubit): +popcount(plus cases) - popcount(minus cases).
int g_word(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2);
}  // namespace detail

/// Product ignoring all phase bookkeeping (the noise-calculus path).
PauliOp multiply_unsigned(const PauliOp& a, const PauliOp& b);

/// Conjugates P by a layer of one- and two-qubit Clifford gates with
/// pairwise-disjoint supports.
PauliOp conjugate_by_layer(const PauliOp& p, std::span<const GateInstance> layer);

/// Relabels qubits: the output acts on qubit perm[i] as `p` acts on qubit i.
PauliOp permute(const PauliOp& p, std::span<const std::uint32_t> perm);

}  // namespace qlocal
