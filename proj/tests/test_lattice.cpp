#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "clusterdiag/lattice.hpp"

using namespace clusterdiag;

TEST_CASE("lattice counts and incidence") {
  SECTION("periodic N=2: |A|=4, |B|=8, 12 qubits") {
    auto lat = build_lattice(2, Boundary::periodic);
    REQUIRE(lat.num_vertices == 4);
    REQUIRE(lat.num_edges == 8);
    REQUIRE(lat.num_qubits() == 12);
    for (int v = 0; v < lat.num_vertices; ++v) REQUIRE(lat.vertex_edges[v].size() == 4);
  }
  SECTION("periodic N=3: |A|=9, |B|=18") {
    auto lat = build_lattice(3, Boundary::periodic);
    REQUIRE(lat.num_vertices == 9);
    REQUIRE(lat.num_edges == 18);
    for (int e = 0; e < lat.num_edges; ++e) {
      REQUIRE(lat.edge_endpoints[e][0] != lat.edge_endpoints[e][1]);
    }
  }
  SECTION("open N=3: boundary vertices have exactly 3 incident edges") {
    auto lat = build_lattice(3, Boundary::open);
    REQUIRE(lat.boundary_vertices.size() == 6);
    for (int u : lat.boundary_vertices) REQUIRE(lat.vertex_edges[u].size() == 3);
    // interior vertices keep 4
    for (int v = 0; v < lat.num_vertices; ++v)
      if (!lat.is_boundary_vertex(v)) REQUIRE(lat.vertex_edges[v].size() == 4);
  }
  SECTION("incidence is symmetric") {
    auto lat = build_lattice(3, Boundary::open);
    for (int v = 0; v < lat.num_vertices; ++v)
      for (int e : lat.vertex_edges[v])
        REQUIRE((lat.edge_endpoints[e][0] == v || lat.edge_endpoints[e][1] == v));
    for (int e = 0; e < lat.num_edges; ++e)
      for (int v : lat.edge_endpoints[e]) {
        const auto& es = lat.vertex_edges[v];
        REQUIRE(std::find(es.begin(), es.end(), e) != es.end());
      }
  }
  SECTION("N < 2 rejected") {
    REQUIRE_THROWS_AS(build_lattice(1, Boundary::periodic), std::invalid_argument);
  }
  SECTION("rebuild determinism") {
    auto a = build_lattice(4, Boundary::open);
    auto b = build_lattice(4, Boundary::open);
    REQUIRE(a.edge_endpoints == b.edge_endpoints);
    REQUIRE(a.to_json() == b.to_json());
  }
}

TEST_CASE("boundary strings") {
  auto lat = build_lattice(4, Boundary::open);
  SECTION("adjacent boundary vertices connect") {
    auto p = boundary_string(lat, 0, 1);
    REQUIRE(p.edges.size() >= 1);
  }
  SECTION("reversal gives the same edge set") {
    auto a = boundary_string(lat, 0, 2);
    auto b = boundary_string(lat, 2, 0);
    std::set<int> sa(a.edges.begin(), a.edges.end()), sb(b.edges.begin(), b.edges.end());
    REQUIRE(sa == sb);
  }
  SECTION("path edges are consecutive") {
    auto p = boundary_string(lat, lat.vertex_index(0, 0), lat.vertex_index(3, 2));
    // walk: consecutive edges share a vertex
    for (size_t k = 0; k + 1 < p.edges.size(); ++k) {
      auto& e1 = lat.edge_endpoints[p.edges[k]];
      auto& e2 = lat.edge_endpoints[p.edges[k + 1]];
      bool share = e1[0] == e2[0] || e1[0] == e2[1] || e1[1] == e2[0] || e1[1] == e2[1];
      REQUIRE(share);
    }
  }
  SECTION("u == v and periodic rejected") {
    REQUIRE_THROWS_AS(boundary_string(lat, 1, 1), std::invalid_argument);
    auto torus = build_lattice(4, Boundary::periodic);
    REQUIRE_THROWS_AS(boundary_string(torus, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("rectangular loops") {
  SECTION("6x6 loop on 20x20 crosses 24 bonds") {
    auto lat = build_lattice(20, Boundary::periodic);
    auto loop = rectangular_loop(lat, 0, 0, 6, 6);
    REQUIRE(loop.edges.size() == 24);
    REQUIRE(loop.closed);
  }
  SECTION("wrapping loop rejected as non-contractible") {
    auto lat = build_lattice(6, Boundary::periodic);
    REQUIRE_THROWS_AS(rectangular_loop(lat, 0, 0, 6, 6), std::invalid_argument);
    REQUIRE_THROWS_AS(rectangular_loop(lat, 0, 0, 6, 3), std::invalid_argument);
  }
  SECTION("separated loops have disjoint crossing sets") {
    auto lat = build_lattice(20, Boundary::periodic);
    auto a = rectangular_loop(lat, 0, 0, 6, 6);
    auto b = rectangular_loop(lat, 8, 8, 10, 10);
    std::set<int> sa(a.edges.begin(), a.edges.end());
    for (int e : b.edges) REQUIRE(sa.count(e) == 0);
  }
  SECTION("open lattice rejected") {
    auto lat = build_lattice(6, Boundary::open);
    REQUIRE_THROWS_AS(rectangular_loop(lat, 0, 0, 2, 2), std::invalid_argument);
  }
}

TEST_CASE("disk partitions") {
  auto lat = build_lattice(4, Boundary::open);
  SECTION("symmetric three-band cut gives l1 == l2") {
    auto part = partition_disk(lat, 0, 2);
    REQUIRE(part.l1 == lat.n);
    REQUIRE(part.l2 == lat.n);
  }
  SECTION("zero-width M rejected") {
    REQUIRE_THROWS_AS(partition_disk(lat, 1, 1), std::invalid_argument);
  }
  SECTION("margin enforced") {
    REQUIRE_THROWS_AS(partition_disk(lat, 0, 1, 2), std::invalid_argument);
  }
  SECTION("cut edges never touch the outer boundary rings") {
    auto part = partition_disk(lat, 0, 2);
    for (int e : part.cut1_edges) {
      REQUIRE_FALSE(lat.is_horizontal(e));
    }
    // every qubit is assigned to exactly one region
    REQUIRE(int(part.qubit_region.size()) == lat.num_qubits());
  }
}
