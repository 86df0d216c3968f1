#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clusterdiag/diagnostics.hpp"

using namespace clusterdiag;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("relative entropy routes agree (frozen dense anchors)") {
  auto lat = build_lattice(2, Boundary::open);
  int u = lat.boundary_vertices[0], v = lat.boundary_vertices[1];

  SECTION("px=0.15, pz=0: D2 and D3 match the independent dense evaluation") {
    // anchors computed with an independent dense implementation
    const double d2_anchor = 0.422024696613;
    const double d3_anchor = 0.382240211390;
    for (auto mode : {DiagMode::exact, DiagMode::dense, DiagMode::classical}) {
      REQUIRE(std::abs(relative_entropy(lat, 0.15, 0.0, u, v, 2, mode).value - d2_anchor) < 1e-9);
      REQUIRE(std::abs(relative_entropy(lat, 0.15, 0.0, u, v, 3, mode).value - d3_anchor) < 1e-9);
    }
  }
  SECTION("px=0.2, pz=0.08 anchors") {
    REQUIRE(std::abs(relative_entropy(lat, 0.2, 0.08, u, v, 2, DiagMode::classical).value -
                     0.159619399283) < 1e-9);
    REQUIRE(std::abs(relative_entropy(lat, 0.2, 0.08, u, v, 3, DiagMode::classical).value -
                     0.175111413709) < 1e-9);
  }
  SECTION("p = 0 diverges (orthogonal states)") {
    auto d = relative_entropy(lat, 0.0, 0.0, u, v, 2, DiagMode::dense);
    REQUIRE(d.divergent);
    auto d1 = relative_entropy(lat, 0.0, 0.0, u, v, 1, DiagMode::dense);
    REQUIRE(d1.divergent);
  }
  SECTION("u == v gives zero") {
    REQUIRE(relative_entropy(lat, 0.2, 0.0, u, u, 2, DiagMode::classical).value == 0.0);
  }
  SECTION("n = 1 von Neumann via the dense oracle only") {
    auto d1 = relative_entropy(lat, 0.2, 0.0, u, v, 1, DiagMode::dense);
    REQUIRE(std::isfinite(d1.value));
    REQUIRE(d1.value > 0.0);
    REQUIRE_THROWS_AS(relative_entropy(lat, 0.2, 0.0, u, v, 1, DiagMode::classical),
                      std::invalid_argument);
  }
  SECTION("monte carlo route within 3 sigma") {
    McSchedule s;
    s.thermalization = 2000;
    s.sweeps = 30000;
    s.seed = 41;
    auto mc = relative_entropy(lat, 0.15, 0.0, u, v, 2, DiagMode::monte_carlo, s);
    REQUIRE(std::abs(mc.value - 0.422024696613) <= 3.0 * mc.err);
  }
  SECTION("cross-ring pair agrees between dense and classical") {
    int w = lat.boundary_vertices[2];  // top ring
    auto de = relative_entropy(lat, 0.2, 0.0, u, w, 2, DiagMode::dense);
    auto cl = relative_entropy(lat, 0.2, 0.0, u, w, 2, DiagMode::classical);
    REQUIRE(std::abs(de.value - cl.value) < 1e-10);
  }
}

TEST_CASE("strange correlator routes agree") {
  SECTION("N=2 torus, px=0.1, unit loop: frozen dense anchor") {
    auto lat = build_lattice(2, Boundary::periodic);
    auto loop = rectangular_loop(lat, 0, 0, 1, 1);
    const double anchor = 1.483764910911;
    for (auto mode : {DiagMode::exact, DiagMode::dense, DiagMode::classical})
      REQUIRE(std::abs(strange_correlator(lat, 0.1, loop, mode).value - anchor) < 1e-9);
    McSchedule s;
    s.thermalization = 2000;
    s.sweeps = 20000;
    s.seed = 43;
    auto mc = strange_correlator(lat, 0.1, loop, DiagMode::monte_carlo, s);
    REQUIRE(std::abs(mc.value - anchor) <= 3.0 * mc.err);
  }
  SECTION("px = 0 gives exactly 1") {
    auto lat = build_lattice(3, Boundary::periodic);
    auto loop = rectangular_loop(lat, 0, 0, 1, 1);
    REQUIRE(strange_correlator(lat, 0.0, loop, DiagMode::exact).value == 1.0);
  }
  SECTION("N=4 torus, 2x2 loop, px=0.1: expansion route equals classical route") {
    auto lat = build_lattice(4, Boundary::periodic);
    auto loop = rectangular_loop(lat, 0, 0, 2, 2);
    auto ex = strange_correlator(lat, 0.1, loop, DiagMode::exact);
    auto cl = strange_correlator(lat, 0.1, loop, DiagMode::classical);
    REQUIRE(std::abs(ex.value - cl.value) <= 1e-10 * std::abs(ex.value));
  }
  SECTION("open loops and open lattices rejected") {
    auto lat = build_lattice(4, Boundary::periodic);
    EdgePath open_path;
    open_path.edges = {0, 1};
    open_path.closed = false;
    REQUIRE_THROWS_AS(strange_correlator(lat, 0.1, open_path, DiagMode::exact),
                      std::invalid_argument);
    auto cyl = build_lattice(4, Boundary::open);
    auto loop = rectangular_loop(lat, 0, 0, 2, 2);
    REQUIRE_THROWS_AS(strange_correlator(cyl, 0.1, loop, DiagMode::exact), std::invalid_argument);
  }
}

TEST_CASE("Renyi negativity routes agree (frozen dense anchors)") {
  auto lat = build_lattice(2, Boundary::open);
  std::vector<bool> region(lat.num_qubits(), false);
  region[lat.vertex_index(0, 0)] = region[lat.vertex_index(0, 1)] = true;
  region[lat.qubit_of_edge(lat.horizontal_edge(0, 0))] = true;
  region[lat.qubit_of_edge(lat.horizontal_edge(0, 1))] = true;

  SECTION("anchored ratios at 2n = 4") {
    // tr (rho^T_X)^4 / tr rho^4 from the independent dense implementation
    const std::pair<double, double> anchors[] = {
        {0.0, 0.0625}, {0.08, 0.073836054548}, {0.2, 0.151472346470}, {0.35, 0.247390939774}};
    for (auto [px, ratio] : anchors) {
      for (auto mode : {DiagMode::exact, DiagMode::dense, DiagMode::classical}) {
        auto e = renyi_negativity(lat, px, region, 4, mode);
        REQUIRE(std::abs(std::exp(e.value) - ratio) < 1e-9);
      }
    }
  }
  SECTION("entire system and empty region give zero") {
    std::vector<bool> all(lat.num_qubits(), true), none(lat.num_qubits(), false);
    REQUIRE(renyi_negativity(lat, 0.2, all, 4, DiagMode::dense).value == 0.0);
    REQUIRE(renyi_negativity(lat, 0.2, none, 4, DiagMode::dense).value == 0.0);
  }
  SECTION("odd replica order rejected") {
    REQUIRE_THROWS_AS(renyi_negativity(lat, 0.2, region, 3, DiagMode::dense),
                      std::invalid_argument);
  }
  SECTION("order 2n = 2 vanishes identically") {
    auto e = renyi_negativity(lat, 0.3, region, 2, DiagMode::dense);
    REQUIRE(std::abs(e.value) < 1e-12);
  }
  SECTION("deep FM: E_X approaches -(2n-2) ln 2 per region") {
    auto e = renyi_negativity(lat, 0.45, region, 4, DiagMode::classical);
    REQUIRE(std::abs(e.value + 2.0 * kLn2) < 0.01);
  }
  SECTION("monte carlo insertion chain within 3 sigma") {
    McSchedule s;
    s.thermalization = 2000;
    s.sweeps = 30000;
    s.seed = 47;
    for (double px : {0.08, 0.35}) {
      auto ex = renyi_negativity(lat, px, region, 4, DiagMode::classical);
      auto mc = renyi_negativity(lat, px, region, 4, DiagMode::monte_carlo, s);
      REQUIRE(std::abs(mc.value - ex.value) <= 3.0 * mc.err);
    }
  }
}

TEST_CASE("tripartite negativity") {
  SECTION("p = 0: the exact merged-class combination vanishes (additive pins)") {
    auto lat = build_lattice(4, Boundary::open);
    auto part = partition_disk(lat, 0, 2);
    auto r = tripartite_negativity(lat, 0.0, part, 4, DiagMode::classical);
    REQUIRE(std::abs(r.value.value) < 1e-12);
    // each constrained region alone costs -(2n-2) * N * ln 2 at J = 0
    REQUIRE(std::abs(r.e_m.value + 2.0 * (2.0 * lat.n) * kLn2) < 1e-10);
    REQUIRE(std::abs(r.e_lm.value + 2.0 * lat.n * kLn2) < 1e-10);
  }
  SECTION("deep PM and deep FM plateaus via Monte Carlo") {
    auto lat = build_lattice(6, Boundary::open);
    auto part = partition_disk(lat, 1, 3);
    McSchedule s;
    s.thermalization = 2000;
    s.sweeps = 20000;
    s.seed = 53;
    auto pm = tripartite_negativity(lat, 0.02, part, 4, DiagMode::monte_carlo, s);
    REQUIRE(std::abs(pm.value.value) <= 3.0 * pm.value.err);
    auto fm = tripartite_negativity(lat, 0.45, part, 4, DiagMode::monte_carlo, s);
    REQUIRE(std::abs(fm.value.value + 2.0 * kLn2) <= 3.0 * fm.value.err + 0.02);
  }
}

TEST_CASE("area-law fit") {
  SECTION("synthetic exact input") {
    std::vector<std::pair<double, DiagValue>> pts;
    for (double l : {4.0, 6.0, 8.0, 12.0}) pts.push_back({l, {0.7 * l, 0.0, false, ""}});
    auto f = fit_area_law(pts);
    REQUIRE(std::abs(f.c - 0.7) < 1e-12);
    REQUIRE(std::abs(f.b) < 1e-12);
  }
  SECTION("J = 0 exact data: slope -(2n-2) ln 2 per cut bond, zero intercept") {
    // cylinders of growing width give growing cut length
    std::vector<std::pair<double, DiagValue>> pts;
    for (int n : {2, 3, 4}) {
      auto lat = build_lattice(n, Boundary::open);
      std::vector<bool> region(lat.num_qubits(), false);
      for (int c = 0; c < n; ++c) {
        region[lat.vertex_index(0, c)] = true;
        region[lat.qubit_of_edge(lat.horizontal_edge(0, c))] = true;
      }
      pts.push_back({double(n), renyi_negativity(lat, 0.0, region, 4, DiagMode::classical)});
    }
    auto f = fit_area_law(pts);
    REQUIRE(std::abs(f.c + 2.0 * kLn2) < 1e-10);
    REQUIRE(std::abs(f.b) < 1e-10);
  }
}

TEST_CASE("phase call aggregation") {
  REQUIRE(phase_call({3, 0}, 0.05) == PhaseCall::spt);
  REQUIRE(phase_call({0, 3}, 0.30) == PhaseCall::trivial);
  REQUIRE(phase_call({3, 0}, 0.178) == PhaseCall::near_critical);
  REQUIRE(phase_call({2, 1}, 0.05) == PhaseCall::spt);
  REQUIRE(phase_call({1, 1}, 0.05) == PhaseCall::near_critical);
}

TEST_CASE("correlation length estimate") {
  REQUIRE(estimate_xi(0.0) == 0.0);
  double xi_pm = estimate_xi(0.2);
  REQUIRE(xi_pm > 0.0);
  REQUIRE(xi_pm < 2.0);
}
