#include "qlocal/pauli.hpp"

#include <bit>
#include <sstream>

#include <fmt/format.h>

#include "qlocal/errors.hpp"

namespace qlocal {

namespace {

std::size_t words_for(std::uint32_t n) { return (static_cast<std::size_t>(n) + 63) / 64; }

void check_same_n(const PauliOp& a, const PauliOp& b, const char* op) {
  if (a.num_qubits() != b.num_qubits()) {
    throw PreconditionError(
        fmt::format("{}: qubit count mismatch ({} vs {})", op, a.num_qubits(), b.num_qubits()));
  }
}

}  // namespace

namespace detail {

int g_word(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2) {
  std::uint64_t plus = (x1 & z1 & ~x2 & z2)      // Y*Z
                       | (x1 & ~z1 & x2 & z2)    // X*Y
                       | (~x1 & z1 & x2 & ~z2);  // Z*X
  std::uint64_t minus = (x1 & z1 & x2 & ~z2)      // Y*X
                        | (x1 & ~z1 & ~x2 & z2)   // X*Z
                        | (~x1 & z1 & x2 & z2);   // Z*Y
  return std::popcount(plus) - std::popcount(minus);
}

}  // namespace detail

PauliOp PauliOp::identity(std::uint32_t n) {
  PauliOp p;
  p.n_ = n;
  p.xw_.assign(words_for(n), 0);
  p.zw_.assign(words_for(n), 0);
  return p;
}

PauliOp PauliOp::single(std::uint32_t n, std::uint32_t qubit, char which) {
  QLOCAL_ASSERT(qubit < n);
  PauliOp p = identity(n);
  switch (which) {
    case 'X': p.set_x(qubit, true); break;
    case 'Z': p.set_z(qubit, true); break;
    case 'Y':
      p.set_x(qubit, true);
      p.set_z(qubit, true);
      break;
    default: throw PreconditionError(fmt::format("unknown Pauli letter '{}'", which));
  }
  return p;
}

bool PauliOp::is_identity() const {
  for (std::size_t w = 0; w < xw_.size(); ++w) {
    if (xw_[w] | zw_[w]) return false;
  }
  return true;
}

std::uint32_t PauliOp::support_weight() const {
  std::uint32_t total = 0;
  for (std::size_t w = 0; w < xw_.size(); ++w) {
    total += static_cast<std::uint32_t>(std::popcount(xw_[w] | zw_[w]));
  }
  return total;
}

SupportSet PauliOp::support() const {
  SupportSet out;
  for (std::uint32_t q = 0; q < n_; ++q) {
    if (in_support(q)) out.push_back(q);
  }
  return out;
}

bool PauliOp::support_subset_of(const PauliOp& other) const {
  check_same_n(*this, other, "support_subset_of");
  for (std::size_t w = 0; w < xw_.size(); ++w) {
    std::uint64_t mine = xw_[w] | zw_[w];
    std::uint64_t theirs = other.xw_[w] | other.zw_[w];
    if (mine & ~theirs) return false;
  }
  return true;
}

bool PauliOp::commutes_with(const PauliOp& other) const {
  check_same_n(*this, other, "commutes_with");
  int parity = 0;
  for (std::size_t w = 0; w < xw_.size(); ++w) {
    parity ^= std::popcount((xw_[w] & other.zw_[w]) ^ (zw_[w] & other.xw_[w])) & 1;
  }
  return parity == 0;
}

PauliOp multiply(const PauliOp& a, const PauliOp& b, int* residual_log_i) {
  check_same_n(a, b, "multiply");
  PauliOp out = PauliOp::identity(a.num_qubits());
  int phase = 0;  // exponent of i, mod 4
  for (std::size_t w = 0; w < out.xw_.size(); ++w) {
    phase += detail::g_word(a.xw_[w], a.zw_[w], b.xw_[w], b.zw_[w]);
    out.xw_[w] = a.xw_[w] ^ b.xw_[w];
    out.zw_[w] = a.zw_[w] ^ b.zw_[w];
  }
  phase = ((phase % 4) + 4) % 4;
  bool neg = a.negative() ^ b.negative() ^ (phase == 2 || phase == 3);
  out.set_negative(neg);
  if (residual_log_i != nullptr) *residual_log_i = phase & 1;
  return out;
}

PauliOp multiply_unsigned(const PauliOp& a, const PauliOp& b) {
  check_same_n(a, b, "multiply_unsigned");
  PauliOp out = PauliOp::identity(a.num_qubits());
  auto ax = a.x_words(), az = a.z_words(), bx = b.x_words(), bz = b.z_words();
  for (std::size_t w = 0; w < out.x_words().size(); ++w) {
    out.x_words()[w] = ax[w] ^ bx[w];
    out.z_words()[w] = az[w] ^ bz[w];
  }
  return out;
}

void PauliOp::conjugate(const GateInstance& g) {
  QLOCAL_ASSERT(g.q0 < n_ && (!is_two_qubit(g.gate) || g.q1 < n_));
  std::uint32_t a = g.q0, b = g.q1;
  bool xa = x(a), za = z(a);
  switch (g.gate) {
    case CliffordGate::I:
      break;
    case CliffordGate::X:
      negative_ ^= za;
      break;
    case CliffordGate::Y:
      negative_ ^= xa ^ za;
      break;
    case CliffordGate::Z:
      negative_ ^= xa;
      break;
    case CliffordGate::H:
      negative_ ^= xa && za;
      set_x(a, za);
      set_z(a, xa);
      break;
    case CliffordGate::S:
      negative_ ^= xa && za;
      set_z(a, xa ^ za);
      break;
    case CliffordGate::Sdg:
      negative_ ^= xa && !za;
      set_z(a, xa ^ za);
      break;
    case CliffordGate::CNOT: {
      bool xb = x(b), zb = z(b);
      negative_ ^= xa && zb && (xb == za);
      set_x(b, xb ^ xa);
      set_z(a, za ^ zb);
      break;
    }
    case CliffordGate::CZ: {
      conjugate({CliffordGate::H, b});
      conjugate({CliffordGate::CNOT, a, b});
      conjugate({CliffordGate::H, b});
      break;
    }
    case CliffordGate::Swap: {
      bool xb = x(b), zb = z(b);
      set_x(a, xb);
      set_z(a, zb);
      set_x(b, xa);
      set_z(b, za);
      break;
    }
  }
}

PauliOp conjugate_by_layer(const PauliOp& p, std::span<const GateInstance> layer) {
  std::vector<bool> used(p.num_qubits(), false);
  for (const auto& g : layer) {
    auto touch = [&](std::uint32_t q) {
      if (q >= p.num_qubits()) {
        throw PreconditionError(fmt::format("gate target {} out of range (n={})", q, p.num_qubits()));
      }
      if (used[q]) {
        throw PreconditionError(fmt::format("overlapping gate supports at qubit {}", q));
      }
      used[q] = true;
    };
    touch(g.q0);
    if (is_two_qubit(g.gate)) touch(g.q1);
  }
  PauliOp out = p;
  for (const auto& g : layer) out.conjugate(g);
  return out;
}

PauliOp permute(const PauliOp& p, std::span<const std::uint32_t> perm) {
  if (perm.size() != p.num_qubits()) {
    throw PreconditionError("permute: permutation size must equal qubit count");
  }
  std::vector<bool> seen(p.num_qubits(), false);
  for (auto v : perm) {
    if (v >= p.num_qubits() || seen[v]) {
      throw PreconditionError("permute: not a bijection on [n]");
    }
    seen[v] = true;
  }
  PauliOp out = PauliOp::identity(p.num_qubits());
  out.set_negative(p.negative());
  for (std::uint32_t q = 0; q < p.num_qubits(); ++q) {
    out.set_x(perm[q], p.x(q));
    out.set_z(perm[q], p.z(q));
  }
  return out;
}

std::string PauliOp::to_text() const {
  std::string out = negative_ ? "-" : "+";
  bool any = false;
  for (std::uint32_t q = 0; q < n_; ++q) {
    char c = 0;
    if (x(q) && z(q))
      c = 'Y';
    else if (x(q))
      c = 'X';
    else if (z(q))
      c = 'Z';
    if (c != 0) {
      if (any) out += ' ';
      out += fmt::format("{}{}", c, q);
      any = true;
    }
  }
  if (!any) out += 'I';
  return out;
}

std::string PauliOp::to_hex() const {
  std::string xs, zs;
  for (std::size_t w = 0; w < xw_.size(); ++w) {
    xs += fmt::format("{:016x}", xw_[w]);
    zs += fmt::format("{:016x}", zw_[w]);
  }
  return fmt::format("{}x:{};z:{}", negative_ ? "-" : "+", xs, zs);
}

PauliOp PauliOp::from_text(std::uint32_t n, const std::string& text) {
  PauliOp p = identity(n);
  std::istringstream in(text);
  std::string tok;
  bool first = true;
  while (in >> tok) {
    if (first && (tok == "+" || tok == "-")) {
      p.set_negative(tok == "-");
      first = false;
      continue;
    }
    first = false;
    std::size_t start = 0;
    if (tok[0] == '+' || tok[0] == '-') {
      p.set_negative(tok[0] == '-');
      start = 1;
      if (start == tok.size()) continue;
    }
    char c = tok[start];
    if (c == 'I') continue;
    if (c != 'X' && c != 'Y' && c != 'Z') {
      throw ParseError(fmt::format("bad Pauli token '{}'", tok));
    }
    std::uint32_t q = 0;
    try {
      q = static_cast<std::uint32_t>(std::stoul(tok.substr(start + 1)));
    } catch (const std::exception&) {
      throw ParseError(fmt::format("bad Pauli token '{}'", tok));
    }
    if (q >= n) throw ParseError(fmt::format("qubit {} out of range (n={})", q, n));
    if (p.in_support(q)) throw ParseError(fmt::format("duplicate qubit {} in '{}'", q, text));
    p.set_x(q, c == 'X' || c == 'Y');
    p.set_z(q, c == 'Z' || c == 'Y');
  }
  return p;
}

PauliOp PauliOp::from_hex(std::uint32_t n, const std::string& text) {
  if (text.size() < 2 || (text[0] != '+' && text[0] != '-')) throw ParseError("bad Pauli hex string");
  PauliOp p = identity(n);
  p.set_negative(text[0] == '-');
  auto xpos = text.find("x:");
  auto zpos = text.find(";z:");
  if (xpos == std::string::npos || zpos == std::string::npos) throw ParseError("bad Pauli hex string");
  auto parse_words = [&](const std::string& hex, std::vector<std::uint64_t>& words) {
    if (hex.size() != words.size() * 16) throw ParseError("bad Pauli hex length");
    for (std::size_t w = 0; w < words.size(); ++w) {
      words[w] = std::stoull(hex.substr(w * 16, 16), nullptr, 16);
    }
  };
  parse_words(text.substr(xpos + 2, zpos - xpos - 2), p.xw_);
  parse_words(text.substr(zpos + 3), p.zw_);
  return p;
}

}  // namespace qlocal
