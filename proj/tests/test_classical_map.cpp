#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clusterdiag/exact.hpp"
#include "clusterdiag/expansion.hpp"
#include "clusterdiag/spin_model.hpp"

using namespace clusterdiag;

TEST_CASE("couplings from error rates") {
  SECTION("zero rates map to zero couplings") {
    auto c = couplings_from_errors(0.0, 0.0);
    REQUIRE(c.j == 0.0);
    REQUIRE(c.h == 0.0);
    REQUIRE(c.u == 0.0);
    REQUIRE(c.t == 0.0);
  }
  SECTION("the Ising critical rate maps to the critical coupling") {
    double pc2 = 0.5 * (1.0 - std::sqrt(std::sqrt(2.0) - 1.0));
    double jc = 0.5 * std::log(1.0 + std::sqrt(2.0));
    REQUIRE(std::abs(couplings_from_errors(pc2, 0.0).j - jc) < 1e-14);
    REQUIRE(std::abs(pc2 - 0.1782) < 5e-4);
  }
  SECTION("the decoupled-replica critical rate maps to twice the critical coupling") {
    double pcinf = 0.5 * (2.0 - std::sqrt(2.0));
    double jc = 0.5 * std::log(1.0 + std::sqrt(2.0));
    REQUIRE(std::abs(couplings_from_errors(pcinf, 0.0).j - 2.0 * jc) < 1e-14);
    REQUIRE(std::abs(pcinf - 0.2929) < 5e-4);
  }
  SECTION("p = 1/2 rejected") {
    REQUIRE_THROWS_AS(couplings_from_errors(0.5, 0.0), std::invalid_argument);
  }
}

TEST_CASE("replica Hamiltonian forms") {
  SECTION("n=2, pz=0: plain nearest-neighbour Ising, zero field") {
    auto lat = build_lattice(3, Boundary::periodic);
    auto m = ising_model(lat, 0.2, 0.0, 2);
    REQUIRE(m.flavors == 1);
    std::vector<int8_t> s(m.num_variables(), 1);
    double e_uniform = m.energy(s);
    double j = couplings_from_errors(0.2, 0.0).j;
    REQUIRE(std::abs(e_uniform + j * double(lat.num_edges)) < 1e-12);
  }
  SECTION("n=3 on a single bond: -(J/2)(s1 s1' + s2 s2' + s1 s1' s2 s2')") {
    SpinModel m;
    m.num_sites = 2;
    m.flavors = 2;
    m.coupled = true;
    m.replica_m = 3;
    double j = 0.37;
    m.bonds.push_back({0, 1, j});
    for (int cfgbits = 0; cfgbits < 16; ++cfgbits) {
      std::vector<int8_t> s(4);
      for (int k = 0; k < 4; ++k) s[k] = (cfgbits >> k) & 1 ? -1 : 1;
      double s11 = double(s[0]) * double(s[1]);  // flavor 0: vars 0,1
      double s22 = double(s[2]) * double(s[3]);  // flavor 1: vars 2,3
      double expected = -(j / 2.0) * (s11 + s22 + s11 * s22);
      REQUIRE(std::abs(m.energy(s) - expected) < 1e-14);
    }
  }
  SECTION("decoupled proxy: per-flavor coupling J/2") {
    SpinModel m;
    m.num_sites = 2;
    m.flavors = 1;
    m.coupled = false;
    double j = 0.5;
    m.bonds.push_back({0, 1, j});
    std::vector<int8_t> s{1, 1};
    REQUIRE(std::abs(m.energy(s) + j / 2.0) < 1e-14);
  }
  SECTION("n < 2 rejected") {
    auto lat = build_lattice(2, Boundary::periodic);
    REQUIRE_THROWS_AS(ising_model(lat, 0.1, 0.0, 1), std::invalid_argument);
  }
}

TEST_CASE("gauge model") {
  SECTION("px = 0 gives U = 0: all configurations equal weight") {
    auto lat = build_lattice(2, Boundary::periodic);
    auto m = gauge_model(lat, 0.0, 0.0, 2);
    auto r = exact_partition(m);
    REQUIRE(std::abs(r.log_partition - lat.num_edges * std::log(2.0)) < 1e-12);
  }
  SECTION("single plaquette: Z = 8 e^U + 8 e^{-U}") {
    SpinModel m;
    m.num_sites = 4;
    m.plaquettes.push_back({{0, 1, 2, 3}, 0.63});
    auto r = exact_partition(m);
    double expected = 8.0 * std::exp(0.63) + 8.0 * std::exp(-0.63);
    REQUIRE(std::abs(std::exp(r.log_partition) - expected) < 1e-10 * expected);
  }
  SECTION("free energy stays smooth across a coupling scan (no transition)") {
    // scan the plaquette coupling itself on a uniform grid
    auto lat = build_lattice(3, Boundary::periodic);
    std::vector<double> lnz;
    for (double u = 0.0; u <= 2.01; u += 0.1) {
      SpinModel m;
      m.num_sites = lat.num_edges;
      for (int v = 0; v < lat.num_vertices; ++v) m.plaquettes.push_back({lat.vertex_edges[v], u});
      lnz.push_back(exact_partition(m).log_partition);
    }
    for (size_t k = 2; k + 2 < lnz.size(); ++k) {
      double d2a = lnz[k + 1] - 2 * lnz[k] + lnz[k - 1];
      double d2b = lnz[k + 2] - 2 * lnz[k + 1] + lnz[k];
      REQUIRE(std::abs(d2b - d2a) < 0.05);
    }
  }
}

TEST_CASE("exact partition sums") {
  SECTION("2x2 torus with doubled bonds: Z = 2 e^{8J} + 12 + 2 e^{-8J}") {
    auto lat = build_lattice(2, Boundary::periodic);
    double j = 0.3;
    auto r = exact_partition(vertex_ising(lat, j, 0.0));
    double expected = 2.0 * std::exp(8.0 * j) + 12.0 + 2.0 * std::exp(-8.0 * j);
    REQUIRE(std::abs(std::exp(r.log_partition) - expected) < 1e-10 * expected);
  }
  SECTION("J = 0: ln Z = S ln 2") {
    auto lat = build_lattice(4, Boundary::periodic);
    auto r = exact_partition(vertex_ising(lat, 0.0, 0.0));
    REQUIRE(r.log_partition == 16.0 * std::log(2.0));
  }
  SECTION("budget enforced") {
    auto lat = build_lattice(6, Boundary::periodic);  // 36 spins
    REQUIRE_THROWS_AS(exact_partition(vertex_ising(lat, 0.1, 0.0)), std::invalid_argument);
  }
  SECTION("transfer matrix matches enumeration on 4x4 to 1e-12") {
    auto lat = build_lattice(4, Boundary::open);  // cylinder strip
    for (double j : {0.15, 0.4406868, 0.9}) {
      auto m = vertex_ising(lat, j, 0.0);
      double a = exact_partition(m).log_partition;
      double b = transfer_matrix_log_partition(m, 4);
      REQUIRE(std::abs(a - b) < 1e-12 * std::abs(a));
    }
  }
  SECTION("transfer matrix with fields") {
    auto lat = build_lattice(3, Boundary::open);
    auto m = vertex_ising(lat, 0.3, -0.2);
    double a = exact_partition(m).log_partition;
    double b = transfer_matrix_log_partition(m, 3);
    REQUIRE(std::abs(a - b) < 1e-12 * std::abs(a));
  }
  SECTION("ln Z is convex in J (variance positivity)") {
    auto lat = build_lattice(3, Boundary::periodic);
    double dj = 0.02;
    for (double j = 0.1; j < 1.0; j += 0.1) {
      double a = exact_partition(vertex_ising(lat, j - dj, 0.0)).log_partition;
      double b = exact_partition(vertex_ising(lat, j, 0.0)).log_partition;
      double c = exact_partition(vertex_ising(lat, j + dj, 0.0)).log_partition;
      REQUIRE(a + c - 2 * b > -1e-9);
    }
  }
}

TEST_CASE("cut-bond models") {
  SECTION("J = 0: cutting changes nothing") {
    auto lat = build_lattice(3, Boundary::periodic);
    auto base = vertex_ising(lat, 0.0, 0.0);
    auto cut = cut_bond_model(base, rectangular_loop(lat, 0, 0, 1, 1));
    REQUIRE(exact_partition(base).log_partition == exact_partition(cut).log_partition);
  }
  SECTION("cutting every bond leaves free spins") {
    auto lat = build_lattice(3, Boundary::periodic);
    auto m = vertex_ising(lat, 0.7, 0.0);
    EdgePath all;
    for (int e = 0; e < lat.num_edges; ++e) all.edges.push_back(e);
    auto cut = cut_bond_model(m, all);
    REQUIRE(std::abs(exact_partition(cut).log_partition - 9.0 * std::log(2.0)) < 1e-12);
  }
}

TEST_CASE("constrained models") {
  auto lat = build_lattice(2, Boundary::open);
  std::vector<bool> region(lat.num_qubits(), false);
  region[lat.vertex_index(0, 0)] = region[lat.vertex_index(0, 1)] = true;
  region[lat.qubit_of_edge(lat.horizontal_edge(0, 0))] = true;
  region[lat.qubit_of_edge(lat.horizontal_edge(0, 1))] = true;

  SECTION("J = 0: each pinned vertex locks the flavors, costing (m-2) ln 2") {
    const int m = 4;
    auto base = vertex_ising(lat, 0.0, 0.0, m - 1, true, m);
    auto cons = constrained_model(base, lat, region);
    double drop = exact_partition(base).log_partition - exact_partition(cons).log_partition;
    // two pinned vertices, each merging 3 flavors into one variable
    REQUIRE(std::abs(drop - 2.0 * (m - 2) * std::log(2.0)) < 1e-12);
  }
  SECTION("merged enumeration equals the restricted brute-force sum") {
    const int m = 4;
    double j = 0.31;
    auto base = vertex_ising(lat, j, 0.0, m - 1, true, m);
    auto cons = constrained_model(base, lat, region);
    double merged = exact_partition(cons).log_partition;
    auto rc = negativity_constraints(lat, region);
    double z = 0.0;
    int nv = base.num_variables();
    for (uint64_t bits = 0; bits < (uint64_t(1) << nv); ++bits) {
      std::vector<int8_t> s(nv);
      for (int k = 0; k < nv; ++k) s[k] = (bits >> k) & 1 ? -1 : 1;
      bool ok = true;
      for (int v : rc.pinned_vertices)
        for (int a = 1; a < base.flavors && ok; ++a)
          ok = s[base.variable(v, a)] == s[base.variable(v, 0)];
      if (!ok) continue;
      z += std::exp(-base.energy(s));
    }
    REQUIRE(std::abs(merged - std::log(z)) < 1e-10);
  }
  SECTION("paired-constraint regions are rejected by the class representation") {
    std::vector<bool> vregion(lat.num_qubits(), false);
    vregion[lat.vertex_index(0, 0)] = vregion[lat.vertex_index(0, 1)] = true;
    auto base = vertex_ising(lat, 0.1, 0.0, 3, true, 4);
    REQUIRE_THROWS_AS(constrained_model(base, lat, vregion), std::invalid_argument);
  }
}

TEST_CASE("replica consistency chain on the smallest open lattice") {
  // tr rho^m from the expansion equals the H_m / H'_m partition sums with all
  // constants tracked, m = 2, 3, 4
  auto lat = build_lattice(2, Boundary::open);
  const int nv = lat.num_vertices, ne = lat.num_edges;
  for (double px : {0.05, 0.1782, 0.28}) {
    auto expn = apply_channel(pure_state_expansion(lat), ChannelSpec::bit_flip(px));
    auto wa = expn.dw_weight_table();
    auto wb = expn.ga_weight_table();
    auto c = couplings_from_errors(px, 0.0);
    for (int m = 2; m <= 4; ++m) {
      double sa = 0.0, sb = 0.0;
      for (uint64_t t = 0; t < (uint64_t(1) << (nv * (m - 1))); ++t) {
        double w = 1.0;
        uint64_t x = 0;
        for (int a = 0; a < m - 1; ++a) {
          uint64_t d = (t >> (a * nv)) & ((uint64_t(1) << nv) - 1);
          w *= wa[d];
          x ^= d;
        }
        sa += w * wa[x];
      }
      for (uint64_t t = 0; t < (uint64_t(1) << (ne * (m - 1))); ++t) {
        double w = 1.0;
        uint64_t x = 0;
        for (int a = 0; a < m - 1; ++a) {
          uint64_t g = (t >> (a * ne)) & ((uint64_t(1) << ne) - 1);
          w *= wb[g];
          x ^= g;
        }
        sb += w * wb[x];
      }
      double sa_model = std::exp(-0.5 * m * c.j * ne +
                                 exact_partition(ising_model(lat, px, 0.0, m)).log_partition);
      double sb_model = std::exp(-0.5 * m * c.u * nv +
                                 exact_partition(gauge_model(lat, px, 0.0, m)).log_partition);
      REQUIRE(std::abs(sa - sa_model) < 1e-10 * sa);
      REQUIRE(std::abs(sb - sb_model) < 1e-10 * sb);
    }
  }
}

TEST_CASE("model JSON dump structure") {
  auto lat = build_lattice(2, Boundary::periodic);
  auto m = ising_model(lat, 0.1, 0.05, 3);
  auto j = m.to_json();
  REQUIRE(j["num_sites"] == 4);
  REQUIRE(j["flavors"] == 2);
  REQUIRE(j["bonds"].size() == 8);
}
