#pragma once

// The cluster state and its decohered Pauli expansion.
//
//   rho_D = 2^{-(V+E)} (sum_D w_A(D) P_D) (sum_G w_B(G) P_G)
//
// D ranges over vertex subsets (tau^x placements, s=+1 <=> member), G over
// edge subsets (sigma^x placements). P_D carries sigma^z on the domain wall
// (edges with one endpoint in D), P_G carries tau^z on odd-degree vertices
// of G (the flux -1 sites). Channels only rescale weights:
//   bit flip:  (1-2p)^{|wall(D) cap supp_B|} on A-factor,
//              (1-2p)^{|odd(G) cap supp_A|}  on B-factor
//   phase:     (1-2p)^{|D cap supp_A|},  (1-2p)^{|G cap supp_B|}
// The pure state has all weights 1; the identity term keeps weight 1 under
// any channel, so tr rho = 1 is preserved exactly.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clusterdiag/channels.hpp"
#include "clusterdiag/dense.hpp"
#include "clusterdiag/lattice.hpp"
#include "clusterdiag/pauli.hpp"

namespace clusterdiag {

class PauliExpansion {
 public:
  explicit PauliExpansion(const LiebLattice& lat) : lat_(lat) {
    if (lat.num_vertices > 63 || lat.num_edges > 63)
      throw std::invalid_argument("PauliExpansion: enumeration limited to 63 sites per sector");
    edge_vertex_bits_.reserve(lat.num_edges);
    for (const auto& ep : lat.edge_endpoints)
      edge_vertex_bits_.push_back((uint64_t(1) << ep[0]) ^ (uint64_t(1) << ep[1]));
  }

  const LiebLattice& lattice() const { return lat_; }
  const std::vector<ChannelSpec>& channels() const { return channels_; }

  uint64_t wall_mask(uint64_t d) const {
    uint64_t w = 0;
    for (int e = 0; e < lat_.num_edges; ++e)
      if (__builtin_popcountll(d & edge_vertex_bits_[e]) & 1) w |= uint64_t(1) << e;
    return w;
  }
  uint64_t odd_mask(uint64_t g) const {
    uint64_t o = 0;
    for (int v = 0; v < lat_.num_vertices; ++v) {
      int deg = 0;
      for (int e : lat_.vertex_edges[v]) deg += (g >> e) & 1;
      if (deg & 1) o |= uint64_t(1) << v;
    }
    return o;
  }

  double dw_weight(uint64_t d) const {
    double w = 1.0;
    uint64_t wall = wall_mask(d);
    for (const auto& ch : channels_) {
      const auto& m = masks_[&ch - channels_.data()];
      int count = ch.kind == ChannelSpec::Kind::bit_flip
                      ? __builtin_popcountll(wall & m.second)
                      : __builtin_popcountll(d & m.first);
      if (count) w *= pow_int(1.0 - 2.0 * ch.rate, count);
    }
    return w;
  }
  double ga_weight(uint64_t g) const {
    double w = 1.0;
    uint64_t odd = odd_mask(g);
    for (const auto& ch : channels_) {
      const auto& m = masks_[&ch - channels_.data()];
      int count = ch.kind == ChannelSpec::Kind::bit_flip
                      ? __builtin_popcountll(odd & m.first)
                      : __builtin_popcountll(g & m.second);
      if (count) w *= pow_int(1.0 - 2.0 * ch.rate, count);
    }
    return w;
  }

  // rho_S sign functional: product of boundary-flip endpoint spins,
  // (-1)^{#(string cap wall)} = s_u s_{u'} independent of the string's path.
  double dw_sign(uint64_t d) const {
    return (__builtin_popcountll(d & flip_vertex_mask_) & 1) ? -1.0 : 1.0;
  }
  bool flipped() const { return flip_vertex_mask_ != 0; }

  std::vector<double> dw_weight_table() const {
    std::vector<double> t(uint64_t(1) << lat_.num_vertices);
    for (uint64_t d = 0; d < t.size(); ++d) t[d] = dw_weight(d);
    return t;
  }
  std::vector<double> ga_weight_table() const {
    std::vector<double> t(uint64_t(1) << lat_.num_edges);
    for (uint64_t g = 0; g < t.size(); ++g) t[g] = ga_weight(g);
    return t;
  }

  friend PauliExpansion apply_channel(PauliExpansion expansion, const ChannelSpec& spec) {
    spec.validate();
    expansion.masks_.push_back(spec.support_masks(expansion.lat_));
    expansion.channels_.push_back(spec);
    return expansion;
  }

  friend PauliExpansion boundary_flip_state(PauliExpansion expansion, int u, int v) {
    const auto& lat = expansion.lat_;
    if (lat.boundary != Boundary::open)
      throw std::invalid_argument("boundary_flip_state: open boundary required");
    if (!lat.is_boundary_vertex(u) || !lat.is_boundary_vertex(v) || u == v)
      throw std::invalid_argument("boundary_flip_state: need two distinct boundary vertices");
    expansion.flip_vertex_mask_ ^= (uint64_t(1) << u) ^ (uint64_t(1) << v);
    return expansion;
  }

 private:
  static double pow_int(double base, int k) {
    double r = 1.0;
    for (; k > 0; k >>= 1, base *= base)
      if (k & 1) r *= base;
    return r;
  }

  LiebLattice lat_;
  std::vector<ChannelSpec> channels_;
  std::vector<std::pair<uint64_t, uint64_t>> masks_;
  std::vector<uint64_t> edge_vertex_bits_;
  uint64_t flip_vertex_mask_ = 0;
};

inline PauliExpansion pure_state_expansion(const LiebLattice& lat) { return PauliExpansion(lat); }

// Stabilizer generators: one vertex generator per vertex (A_v in the bulk,
// the boundary spin operator pi^x_u on the two open rings) and B_e per edge.
inline std::vector<PauliString> stabilizer_generators(const LiebLattice& lat) {
  std::vector<PauliString> gens;
  gens.reserve(lat.num_qubits());
  for (int v = 0; v < lat.num_vertices; ++v) {
    PauliString g(lat.num_qubits());
    g.set_x(v);
    for (int e : lat.vertex_edges[v]) g.set_z(lat.qubit_of_edge(e));
    gens.push_back(g);
  }
  for (int e = 0; e < lat.num_edges; ++e) {
    PauliString g(lat.num_qubits());
    g.set_x(lat.qubit_of_edge(e));
    g.set_z(lat.edge_endpoints[e][0]);
    g.set_z(lat.edge_endpoints[e][1]);
    gens.push_back(g);
  }
  return gens;
}

// Boundary spin-1/2 triplet at boundary vertex u.
struct PiTriplet {
  PauliString x, y, z;
};
inline PiTriplet boundary_pi_operators(const LiebLattice& lat, int u) {
  if (!lat.is_boundary_vertex(u))
    throw std::invalid_argument("boundary_pi_operators: not a boundary vertex");
  PiTriplet t{PauliString(lat.num_qubits()), PauliString(lat.num_qubits()),
              PauliString(lat.num_qubits())};
  t.x.set_x(u);
  t.y.set_y(u);
  for (int e : lat.vertex_edges[u]) {
    t.x.set_z(lat.qubit_of_edge(e));
    t.y.set_z(lat.qubit_of_edge(e));
  }
  t.z.set_z(u);
  return t;
}

// --- dense oracles -----------------------------------------------------

inline Mat cluster_state_dense(const LiebLattice& lat) {
  const int dim = checked_dim(lat.num_qubits());
  Mat rho = Mat::Identity(dim, dim);
  auto project = [&](uint64_t x, uint64_t z) {
    Mat g = rho;
    left_mul_xz(g, x, z);
    rho = 0.5 * (rho + g);
  };
  for (int v = 0; v < lat.num_vertices; ++v) {
    uint64_t z = 0;
    for (int e : lat.vertex_edges[v]) z |= uint64_t(1) << lat.qubit_of_edge(e);
    project(uint64_t(1) << v, z);
  }
  for (int e = 0; e < lat.num_edges; ++e)
    project(uint64_t(1) << lat.qubit_of_edge(e),
            (uint64_t(1) << lat.edge_endpoints[e][0]) ^ (uint64_t(1) << lat.edge_endpoints[e][1]));
  return rho;
}

inline Vec cluster_state_vector(const LiebLattice& lat) {
  const int dim = checked_dim(lat.num_qubits());
  Vec v = Vec::Constant(dim, 1.0);
  auto project = [&](uint64_t x, uint64_t z) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) {
      double s = (__builtin_popcountll(uint64_t(i ^ x) & z) & 1) ? -1.0 : 1.0;
      g(i) = s * v(int(i ^ x));
    }
    v = 0.5 * (v + g);
  };
  for (int vx = 0; vx < lat.num_vertices; ++vx) {
    uint64_t z = 0;
    for (int e : lat.vertex_edges[vx]) z |= uint64_t(1) << lat.qubit_of_edge(e);
    project(uint64_t(1) << vx, z);
  }
  for (int e = 0; e < lat.num_edges; ++e)
    project(uint64_t(1) << lat.qubit_of_edge(e),
            (uint64_t(1) << lat.edge_endpoints[e][0]) ^ (uint64_t(1) << lat.edge_endpoints[e][1]));
  double nrm = v.norm();
  if (nrm <= 0) throw std::runtime_error("cluster_state_vector: projection annihilated seed");
  return v / nrm;
}

// Exact dense matrix of the (possibly decohered, possibly boundary-flipped)
// expansion. Accumulates the 2^{V+E} Pauli terms directly.
inline Mat dense_density_matrix(const PauliExpansion& exp) {
  const auto& lat = exp.lattice();
  const int dim = checked_dim(lat.num_qubits());
  const int nv = lat.num_vertices;
  Mat rho = Mat::Zero(dim, dim);
  const uint64_t num_d = uint64_t(1) << nv;
  const uint64_t num_g = uint64_t(1) << lat.num_edges;
  for (uint64_t d = 0; d < num_d; ++d) {
    double wd = exp.dw_weight(d) * exp.dw_sign(d);
    if (wd == 0.0) continue;
    const uint64_t wall = exp.wall_mask(d);
    for (uint64_t g = 0; g < num_g; ++g) {
      double w = wd * exp.ga_weight(g);
      if (w == 0.0) continue;
      const uint64_t odd = exp.odd_mask(g);
      // P_D P_G: column k -> row k ^ xbits, sign (-1)^{(z_D + z_G).k + z_D.x_G}
      const uint64_t xbits = d | (g << nv);
      const uint64_t zbits = odd | (wall << nv);
      double base = (__builtin_popcountll(wall & g) & 1) ? -w : w;
      for (int k = 0; k < dim; ++k) {
        double s = (__builtin_popcountll(uint64_t(k) & zbits) & 1) ? -base : base;
        rho(int(k ^ xbits), k) += s;
      }
    }
  }
  return rho / double(dim);
}

// Kraus-route dense state: independent of the expansion bookkeeping, used as
// its oracle. Channels are applied qubit by qubit as (1-p) rho + p P rho P.
inline Mat kraus_density_matrix(const LiebLattice& lat, const std::vector<ChannelSpec>& channels) {
  Mat rho = cluster_state_dense(lat);
  for (const auto& ch : channels) {
    ch.validate();
    auto [vm, em] = ch.support_masks(lat);
    char axis = ch.kind == ChannelSpec::Kind::bit_flip ? 'X' : 'Z';
    for (int v = 0; v < lat.num_vertices; ++v)
      if ((vm >> v) & 1) apply_pauli_channel_dense(rho, lat.qubit_of_vertex(v), ch.rate, axis);
    for (int e = 0; e < lat.num_edges; ++e)
      if ((em >> e) & 1) apply_pauli_channel_dense(rho, lat.qubit_of_edge(e), ch.rate, axis);
  }
  return rho;
}

}  // namespace clusterdiag
