#pragma once

// Single-qubit Pauli error channels and their symmetry classification.
// A channel is bit-flip (X) or phase (Z) at rate p on a support set; it acts
// on the expansion purely through per-configuration weight factors.

#include <stdexcept>
#include <string>
#include <vector>

#include "clusterdiag/lattice.hpp"
#include "clusterdiag/pauli.hpp"

namespace clusterdiag {

struct ChannelSpec {
  enum class Kind { bit_flip, phase };
  enum class Support { all, sublattice_a, sublattice_b, custom };

  Kind kind = Kind::bit_flip;
  double rate = 0.0;
  Support support = Support::all;
  std::vector<int> custom_qubits;  // qubit indices when support == custom

  static ChannelSpec bit_flip(double p, Support s = Support::all) {
    return {Kind::bit_flip, p, s, {}};
  }
  static ChannelSpec phase(double p, Support s = Support::all) { return {Kind::phase, p, s, {}}; }

  void validate() const {
    if (!(rate >= 0.0 && rate <= 0.5))
      throw std::invalid_argument("ChannelSpec: rate must lie in [0, 1/2]");
  }

  // (vertex_mask, edge_mask) of the support on a concrete lattice
  std::pair<uint64_t, uint64_t> support_masks(const LiebLattice& lat) const {
    uint64_t vm = 0, em = 0;
    auto all_v = [&] { vm = (lat.num_vertices >= 64) ? ~uint64_t(0) : ((uint64_t(1) << lat.num_vertices) - 1); };
    auto all_e = [&] { em = (lat.num_edges >= 64) ? ~uint64_t(0) : ((uint64_t(1) << lat.num_edges) - 1); };
    switch (support) {
      case Support::all:
        all_v();
        all_e();
        break;
      case Support::sublattice_a:
        all_v();
        break;
      case Support::sublattice_b:
        all_e();
        break;
      case Support::custom:
        for (int q : custom_qubits) {
          if (q < 0 || q >= lat.num_qubits())
            throw std::invalid_argument("ChannelSpec: custom qubit outside lattice");
          if (q < lat.num_vertices)
            vm |= uint64_t(1) << q;
          else
            em |= uint64_t(1) << (q - lat.num_vertices);
        }
        break;
    }
    return {vm, em};
  }
};

enum class SymmetryClass { exact, average, broken };

struct SymmetryVerdict {
  std::string generator_name;
  SymmetryClass verdict = SymmetryClass::exact;
};

// Kraus-level classification for Pauli channels against a Pauli symmetry
// generator: exact iff every Kraus operator commutes with the generator.
// A Pauli conjugated by a Pauli is itself up to sign, so a Pauli channel is
// always at least average; "broken" is unreachable here and non-Pauli Kraus
// sets are out of scope.
inline SymmetryClass classify_symmetry(const LiebLattice& lat,
                                       const std::vector<ChannelSpec>& channels,
                                       const PauliString& generator) {
  for (const auto& ch : channels) {
    ch.validate();
    if (ch.rate == 0.0) continue;
    auto [vm, em] = ch.support_masks(lat);
    for (int q = 0; q < lat.num_qubits(); ++q) {
      bool supported = q < lat.num_vertices ? ((vm >> q) & 1)
                                            : ((em >> (q - lat.num_vertices)) & 1);
      if (!supported) continue;
      PauliString k(lat.num_qubits());
      if (ch.kind == ChannelSpec::Kind::bit_flip)
        k.set_x(q);
      else
        k.set_z(q);
      if (!k.commutes(generator)) return SymmetryClass::average;
    }
  }
  return SymmetryClass::exact;
}

// Generators of the protecting symmetry: the zero-form prod tau^x over A and
// a basis of one-form loops (prod sigma^x over graph cycles on B).
inline PauliString zero_form_generator(const LiebLattice& lat) {
  PauliString g(lat.num_qubits());
  for (int v = 0; v < lat.num_vertices; ++v) g.set_x(v);
  return g;
}

inline PauliString loop_generator(const LiebLattice& lat, const std::vector<int>& edge_ids) {
  PauliString g(lat.num_qubits());
  for (int e : edge_ids) g.set_x(lat.qubit_of_edge(e));
  return g;
}

// Cycle basis: for every face (r,c) the 4-edge face loop; plus, on the torus,
// one horizontal and one vertical wrapping ring.
inline std::vector<std::vector<int>> one_form_loop_basis(const LiebLattice& lat) {
  std::vector<std::vector<int>> basis;
  int face_rows = lat.boundary == Boundary::periodic ? lat.rows : lat.rows - 1;
  for (int r = 0; r < face_rows; ++r)
    for (int c = 0; c < lat.n; ++c)
      basis.push_back({lat.horizontal_edge(r, c), lat.horizontal_edge((r + 1) % lat.rows, c),
                       lat.vertical_edge(r, c), lat.vertical_edge(r, (c + 1) % lat.n)});
  std::vector<int> ring;
  for (int c = 0; c < lat.n; ++c) ring.push_back(lat.horizontal_edge(0, c));
  basis.push_back(ring);
  if (lat.boundary == Boundary::periodic) {
    std::vector<int> col;
    for (int r = 0; r < lat.rows; ++r) col.push_back(lat.vertical_edge(r, 0));
    basis.push_back(col);
  }
  return basis;
}

}  // namespace clusterdiag
