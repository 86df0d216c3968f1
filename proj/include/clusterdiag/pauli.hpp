#pragma once

// Exact Pauli-string arithmetic in the symplectic (x,z) bit representation.
// A string is phase * prod_q X_q^{x_q} Z_q^{z_q} with phase in {1,i,-1,-i}
// stored as an exponent of i. A qubit with both bits set carries X*Z = -i*Y,
// so the Hermitian-convention phase of a bare string is i^{y_count}.

#include <cassert>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace clusterdiag {

struct QubitMask {
  std::vector<uint64_t> words;

  QubitMask() = default;
  explicit QubitMask(int num_qubits) : words((num_qubits + 63) / 64, 0) {}
  static QubitMask all(int num_qubits) {
    QubitMask m(num_qubits);
    for (int q = 0; q < num_qubits; ++q) m.set(q, true);
    return m;
  }
  bool get(int q) const { return (words[q >> 6] >> (q & 63)) & 1u; }
  void set(int q, bool v) {
    uint64_t bit = uint64_t(1) << (q & 63);
    if (v)
      words[q >> 6] |= bit;
    else
      words[q >> 6] &= ~bit;
  }
  int popcount() const {
    int c = 0;
    for (uint64_t w : words) c += __builtin_popcountll(w);
    return c;
  }
  friend QubitMask operator&(const QubitMask& a, const QubitMask& b) {
    QubitMask r = a;
    for (size_t i = 0; i < r.words.size(); ++i) r.words[i] &= b.words[i];
    return r;
  }
  friend QubitMask operator^(const QubitMask& a, const QubitMask& b) {
    QubitMask r = a;
    for (size_t i = 0; i < r.words.size(); ++i) r.words[i] ^= b.words[i];
    return r;
  }
  bool none() const {
    for (uint64_t w : words)
      if (w) return false;
    return true;
  }
  bool operator==(const QubitMask& o) const { return words == o.words; }
};

class PauliString {
 public:
  int num_qubits = 0;
  QubitMask x_mask, z_mask;
  uint8_t phase_exponent = 0;  // global phase i^phase_exponent

  PauliString() = default;
  explicit PauliString(int n) : num_qubits(n), x_mask(n), z_mask(n) {}
  static PauliString identity(int n) { return PauliString(n); }

  void set_x(int q) { x_mask.set(q, true); }
  void set_z(int q) { z_mask.set(q, true); }
  void set_y(int q) {  // Hermitian Y = i * X Z
    x_mask.set(q, true);
    z_mask.set(q, true);
    phase_exponent = (phase_exponent + 1) & 3;
  }

  bool is_identity_mask() const { return x_mask.none() && z_mask.none(); }

  std::complex<double> phase() const {
    static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[phase_exponent & 3];
  }

  PauliString multiply(const PauliString& o) const {
    if (num_qubits != o.num_qubits)
      throw std::invalid_argument("PauliString::multiply: qubit count mismatch");
    PauliString r(num_qubits);
    // Z^{z1} X^{x2} = (-1)^{z1.x2} X^{x2} Z^{z1}
    int anti = 0;
    for (size_t i = 0; i < x_mask.words.size(); ++i)
      anti += __builtin_popcountll(z_mask.words[i] & o.x_mask.words[i]);
    r.x_mask = x_mask ^ o.x_mask;
    r.z_mask = z_mask ^ o.z_mask;
    r.phase_exponent = (phase_exponent + o.phase_exponent + 2 * (anti & 1)) & 3;
    return r;
  }
  PauliString operator*(const PauliString& o) const { return multiply(o); }

  // symplectic form <x_P, z_Q> + <x_Q, z_P>; even <=> commute
  bool commutes(const PauliString& o) const { return commutes_on(o, QubitMask()); }
  bool commutes_on(const PauliString& o, const QubitMask& region) const {
    if (num_qubits != o.num_qubits)
      throw std::invalid_argument("PauliString::commutes: qubit count mismatch");
    bool restricted = !region.words.empty();
    int c = 0;
    for (size_t i = 0; i < x_mask.words.size(); ++i) {
      uint64_t m = restricted ? region.words[i] : ~uint64_t(0);
      c += __builtin_popcountll((x_mask.words[i] & o.z_mask.words[i]) & m);
      c += __builtin_popcountll((o.x_mask.words[i] & z_mask.words[i]) & m);
    }
    return (c & 1) == 0;
  }

  int y_count(const QubitMask& region) const {
    int c = 0;
    for (size_t i = 0; i < x_mask.words.size(); ++i)
      c += __builtin_popcountll(x_mask.words[i] & z_mask.words[i] & region.words[i]);
    return c;
  }
  int y_count_all() const { return y_count(QubitMask::all(num_qubits)); }

  // Action of the partial transpose over `region` on this string: the string
  // is unchanged and picks up (-1)^{#Y in region}.
  int partial_transpose_sign(const QubitMask& region) const {
    return (y_count(region) & 1) ? -1 : 1;
  }

  char pauli_at(int q) const {
    bool x = x_mask.get(q), z = z_mask.get(q);
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  std::string to_string() const {
    static const char* ph[4] = {"+", "+i", "-", "-i"};
    // report in Hermitian convention: X*Z = -i*Y per doubly-set qubit
    int k = (phase_exponent + 3 * y_count_all()) & 3;
    std::string s = ph[k];
    for (int q = 0; q < num_qubits; ++q) s += pauli_at(q);
    return s;
  }
};

}  // namespace clusterdiag
