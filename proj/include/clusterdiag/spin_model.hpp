#pragma once

// Classical Ising-type models produced by the decoherence mapping.
//
// A model carries `flavors` replica flavors per site. With the replica
// product terms on (`coupled`), the energy is
//   H = - sum_b (J_b/2) [ sum_a s_i^a s_j^a + prod_a s_i^a s_j^a ]
//       - sum_i (h_i/2) [ sum_a s_i^a + (-1)^m prod_a s_i^a ]
//       - sum_p (U_p/2) [ sum_a phi_p^a + prod_a phi_p^a ]
// where m = replica_m is the total replica count (the product-term sign on
// odd-site terms flips with its parity). With `coupled` off (the n -> infty
// proxy) the product terms are dropped, leaving decoupled flavors at half
// coupling. flavors == 1 with m even reduces to the plain Ising/gauge form
//   H = -sum J s s - sum h s - sum U phi.
//
// Merged classes are hard constraints: all (site, flavor) variables in a
// class share one spin value. Variable id = flavor * num_sites + site.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "clusterdiag/lattice.hpp"

namespace clusterdiag {

struct SpinModel {
  int num_sites = 0;
  int flavors = 1;
  bool coupled = true;
  int replica_m = 2;

  struct Bond {
    int i, j;
    double coupling;
  };
  std::vector<Bond> bonds;
  std::vector<double> fields;
  struct Plaquette {
    std::vector<int> sites;
    double coupling;
  };
  std::vector<Plaquette> plaquettes;
  std::vector<std::vector<int>> merged_classes;

  int num_variables() const { return num_sites * flavors; }
  int variable(int site, int flavor) const { return flavor * num_sites + site; }

  double product_sign() const { return (replica_m % 2 == 0) ? 1.0 : -1.0; }

  // spins indexed by variable id, values +-1
  double energy(const std::vector<int8_t>& s) const {
    double h = 0.0;
    for (const auto& b : bonds) {
      if (b.coupling == 0.0) continue;
      double sum = 0.0, prod = 1.0;
      for (int a = 0; a < flavors; ++a) {
        double ss = double(s[variable(b.i, a)]) * double(s[variable(b.j, a)]);
        sum += ss;
        prod *= ss;
      }
      h -= b.coupling * 0.5 * (coupled ? sum + prod : sum);
    }
    const double psign = product_sign();
    for (int i = 0; i < num_sites; ++i) {
      if (fields.empty() || fields[i] == 0.0) continue;
      double sum = 0.0, prod = 1.0;
      for (int a = 0; a < flavors; ++a) {
        double sv = s[variable(i, a)];
        sum += sv;
        prod *= sv;
      }
      h -= fields[i] * 0.5 * (coupled ? sum + psign * prod : sum);
    }
    for (const auto& p : plaquettes) {
      if (p.coupling == 0.0) continue;
      double sum = 0.0, prod = 1.0;
      for (int a = 0; a < flavors; ++a) {
        double phi = 1.0;
        for (int site : p.sites) phi *= double(s[variable(site, a)]);
        sum += phi;
        prod *= phi;
      }
      h -= p.coupling * 0.5 * (coupled ? sum + prod : sum);
    }
    return h;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["num_sites"] = num_sites;
    j["flavors"] = flavors;
    j["coupled"] = coupled;
    j["replica_m"] = replica_m;
    j["bonds"] = nlohmann::json::array();
    for (const auto& b : bonds) j["bonds"].push_back({b.i, b.j, b.coupling});
    j["fields"] = fields;
    j["plaquettes"] = nlohmann::json::array();
    for (const auto& p : plaquettes) j["plaquettes"].push_back({{"sites", p.sites}, {"coupling", p.coupling}});
    j["merged_classes"] = merged_classes;
    return j;
  }
};

struct Couplings {
  double j, h, u, t;
};

// J = U = -ln(1-2 p_x), h = t = -ln(1-2 p_z); p = 1/2 is rejected here
// because the couplings diverge (the p = 1/2 state is handled separately).
inline Couplings couplings_from_errors(double px, double pz) {
  if (!(px >= 0.0 && px < 0.5) || !(pz >= 0.0 && pz < 0.5))
    throw std::invalid_argument("couplings_from_errors: rates must lie in [0, 1/2)");
  double j = -std::log1p(-2.0 * px);
  double h = -std::log1p(-2.0 * pz);
  return {j, h, j, h};
}

namespace detail {
inline void check_flavors(int n) {
  if (n < 2) throw std::invalid_argument("replica index n must be >= 2");
}
}  // namespace detail

// Plain vertex-graph Ising model with explicit coupling and field (used by
// routes whose effective coupling differs from J, e.g. the overlap model at
// J/2 behind the strange correlator). Bond index == edge index.
inline SpinModel vertex_ising(const LiebLattice& lat, double coupling, double field,
                              int flavors = 1, bool coupled = true, int replica_m = 2) {
  SpinModel m;
  m.num_sites = lat.num_vertices;
  m.flavors = flavors;
  m.coupled = coupled;
  m.replica_m = replica_m;
  m.bonds.reserve(lat.num_edges);
  for (const auto& ep : lat.edge_endpoints) m.bonds.push_back({ep[0], ep[1], coupling});
  m.fields.assign(m.num_sites, field);
  return m;
}

// (n-1)-flavor Ising model of the A sector. The field enters with a minus
// sign: s = +1 marks a tau^x placement, which the phase error suppresses.
inline SpinModel ising_model(const LiebLattice& lat, double px, double pz, int n,
                             bool decoupled = false) {
  detail::check_flavors(n);
  auto c = couplings_from_errors(px, pz);
  return vertex_ising(lat, c.j, -c.h, n - 1, !decoupled, n);
}

// (n-1)-flavor Ising gauge model of the B sector: sites on edges, one
// plaquette per vertex star (3 edges on the open-boundary rings, 4 in the
// bulk), field -t per edge site.
inline SpinModel gauge_model(const LiebLattice& lat, double px, double pz, int n,
                             bool decoupled = false) {
  detail::check_flavors(n);
  auto c = couplings_from_errors(px, pz);
  SpinModel m;
  m.num_sites = lat.num_edges;
  m.flavors = n - 1;
  m.coupled = !decoupled;
  m.replica_m = n;
  for (int v = 0; v < lat.num_vertices; ++v)
    m.plaquettes.push_back({lat.vertex_edges[v], c.u});
  m.fields.assign(m.num_sites, -c.t);
  return m;
}

// Couplings on the bonds crossing a loop set to zero.
inline SpinModel cut_bond_model(SpinModel m, const EdgePath& loop) {
  for (int e : loop.edges) {
    if (e < 0 || e >= int(m.bonds.size()))
      throw std::invalid_argument("cut_bond_model: loop edge outside bond list");
    m.bonds[e].coupling = 0.0;
  }
  return m;
}

// --- negativity constraints --------------------------------------------
//
// The partial-transpose trace over region X maps, after the uniform gauge
// sum, onto per-edge conditions on XOR combinations of the replica domain
// configurations. For every lattice edge e with endpoint set P:
//   e in X:      the endpoints of P outside X must carry even E-membership
//   e not in X:  the endpoints of P inside X must carry even E-membership
// One affected endpoint pins it ("all flavors agree at v"); two give a
// flavor-locked bond-parity pair (degenerate partitions only).

struct RegionConstraints {
  std::vector<int> pinned_vertices;
  std::vector<std::pair<int, int>> paired_vertices;
};

inline RegionConstraints negativity_constraints(const LiebLattice& lat,
                                                const std::vector<bool>& region_qubits) {
  if (int(region_qubits.size()) != lat.num_qubits())
    throw std::invalid_argument("negativity_constraints: region mask size mismatch");
  RegionConstraints rc;
  std::vector<char> pinned(lat.num_vertices, 0);
  for (int e = 0; e < lat.num_edges; ++e) {
    bool edge_in = region_qubits[lat.qubit_of_edge(e)];
    int a = lat.edge_endpoints[e][0], b = lat.edge_endpoints[e][1];
    bool a_opp = region_qubits[a] != edge_in;  // endpoint on the opposite side of e
    bool b_opp = region_qubits[b] != edge_in;
    if (a_opp && b_opp)
      rc.paired_vertices.push_back({a, b});
    else if (a_opp)
      pinned[a] = 1;
    else if (b_opp)
      pinned[b] = 1;
  }
  for (int v = 0; v < lat.num_vertices; ++v)
    if (pinned[v]) rc.pinned_vertices.push_back(v);
  return rc;
}

// Merged-class form of the constraints: each pinned vertex becomes a class
// spanning all flavors. Pair constraints have no class representation and
// are rejected; the band partitions produced by partition_disk never create
// them.
inline SpinModel constrained_model(SpinModel m, const LiebLattice& lat,
                                   const std::vector<bool>& region_qubits) {
  auto rc = negativity_constraints(lat, region_qubits);
  if (!rc.paired_vertices.empty())
    throw std::invalid_argument(
        "constrained_model: region induces flavor-locked pair constraints; only exact "
        "enumeration supports such regions");
  for (int v : rc.pinned_vertices) {
    std::vector<int> cls;
    for (int a = 0; a < m.flavors; ++a) cls.push_back(m.variable(v, a));
    if (cls.size() > 1) m.merged_classes.push_back(cls);
  }
  return m;
}

}  // namespace clusterdiag
