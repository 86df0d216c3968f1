#pragma once

// Lieb lattice geometry: an edge-decorated square lattice. Vertex sites form
// sub-lattice A, edge sites sub-lattice B. Periodic boundaries give an N x N
// torus; "open" gives a cylinder (periodic in x, open in y), which is the
// unique square-lattice geometry where every boundary vertex has exactly
// three incident edges.
//
// Index layout (stable; file outputs depend on it):
//   vertices:          v = r*N + c                     r in [0,rows), c in [0,N)
//   horizontal edges:  e = r*N + c                     (r,c) -- (r,(c+1)%N)
//   vertical edges:    e = rows*N + r*N + c            (r,c) -- (r+1,c)
//   qubits:            vertex v -> v, edge e -> num_vertices + e
// N = 2 produces doubled horizontal edges (two distinct edges between the
// same vertex pair); they are kept as genuinely distinct bonds.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace clusterdiag {

enum class Boundary { periodic, open };

struct LiebLattice {
  int n = 0;  // linear size
  Boundary boundary = Boundary::periodic;
  int rows = 0;
  int num_vertices = 0;
  int num_edges = 0;
  std::vector<std::array<int, 2>> edge_endpoints;
  std::vector<std::vector<int>> vertex_edges;  // incident edge ids per vertex
  std::vector<int> boundary_vertices;          // open only: bottom ring then top ring

  int num_qubits() const { return num_vertices + num_edges; }
  int vertex_index(int r, int c) const { return r * n + c; }
  int horizontal_edge(int r, int c) const { return r * n + c; }
  int vertical_edge(int r, int c) const { return rows * n + r * n + c; }
  int qubit_of_vertex(int v) const { return v; }
  int qubit_of_edge(int e) const { return num_vertices + e; }
  int vertex_row(int v) const { return v / n; }
  int vertex_col(int v) const { return v % n; }
  bool is_horizontal(int e) const { return e < rows * n; }

  bool is_boundary_vertex(int v) const {
    if (boundary == Boundary::periodic) return false;
    int r = vertex_row(v);
    return r == 0 || r == rows - 1;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["boundary"] = boundary == Boundary::periodic ? "periodic" : "open";
    j["num_vertices"] = num_vertices;
    j["num_edges"] = num_edges;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edge_endpoints) j["edges"].push_back({e[0], e[1]});
    j["boundary_vertices"] = boundary_vertices;
    return j;
  }
};

inline LiebLattice build_lattice(int n, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("build_lattice: N must be >= 2");
  LiebLattice lat;
  lat.n = n;
  lat.boundary = boundary;
  lat.rows = n;
  lat.num_vertices = n * n;
  const int h_count = lat.rows * n;
  const int v_rows = boundary == Boundary::periodic ? lat.rows : lat.rows - 1;
  lat.num_edges = h_count + v_rows * n;
  lat.edge_endpoints.reserve(lat.num_edges);
  for (int r = 0; r < lat.rows; ++r)
    for (int c = 0; c < n; ++c)
      lat.edge_endpoints.push_back({lat.vertex_index(r, c), lat.vertex_index(r, (c + 1) % n)});
  for (int r = 0; r < v_rows; ++r)
    for (int c = 0; c < n; ++c)
      lat.edge_endpoints.push_back(
          {lat.vertex_index(r, c), lat.vertex_index((r + 1) % lat.rows, c)});
  lat.vertex_edges.assign(lat.num_vertices, {});
  for (int e = 0; e < lat.num_edges; ++e) {
    lat.vertex_edges[lat.edge_endpoints[e][0]].push_back(e);
    lat.vertex_edges[lat.edge_endpoints[e][1]].push_back(e);
  }
  if (boundary == Boundary::open) {
    for (int c = 0; c < n; ++c) lat.boundary_vertices.push_back(lat.vertex_index(0, c));
    for (int c = 0; c < n; ++c) lat.boundary_vertices.push_back(lat.vertex_index(lat.rows - 1, c));
  }
  return lat;
}

struct EdgePath {
  std::vector<int> edges;
  bool closed = false;
  int u = -1, v = -1;  // endpoints when open
};

// Canonical string of B-edges between two boundary vertices. Same ring:
// shorter arc (ties broken toward lexicographically smaller edge sets).
// Different rings: climb the column of u, then arc along u's target ring.
inline EdgePath boundary_string(const LiebLattice& lat, int u, int v) {
  if (lat.boundary != Boundary::open)
    throw std::invalid_argument("boundary_string: open boundary required");
  if (u == v) throw std::invalid_argument("boundary_string: u and v must differ");
  if (!lat.is_boundary_vertex(u) || !lat.is_boundary_vertex(v))
    throw std::invalid_argument("boundary_string: endpoints must be boundary vertices");
  EdgePath path;
  path.u = u;
  path.v = v;
  const int n = lat.n;
  auto ring_arc = [&](int row, int c_from, int c_to) {
    // edges along the ring of `row` from column c_from to c_to, shorter arc
    std::vector<int> fwd, bwd;
    for (int c = c_from; c != c_to; c = (c + 1) % n) fwd.push_back(lat.horizontal_edge(row, c));
    for (int c = c_from; c != c_to; c = (c - 1 + n) % n)
      bwd.push_back(lat.horizontal_edge(row, (c - 1 + n) % n));
    if (fwd.size() != bwd.size()) return fwd.size() < bwd.size() ? fwd : bwd;
    std::vector<int> fs = fwd, bs = bwd;
    std::sort(fs.begin(), fs.end());
    std::sort(bs.begin(), bs.end());
    return fs <= bs ? fwd : bwd;
  };
  int ru = lat.vertex_row(u), rv = lat.vertex_row(v);
  int cu = lat.vertex_col(u), cv = lat.vertex_col(v);
  if (ru == rv) {
    path.edges = ring_arc(ru, cu, cv);
  } else {
    for (int r = std::min(ru, rv); r < std::max(ru, rv); ++r)
      path.edges.push_back(lat.vertical_edge(r, cu));
    auto arc = ring_arc(rv, cu, cv);
    path.edges.insert(path.edges.end(), arc.begin(), arc.end());
  }
  return path;
}

// Dual loop around a width x height block of vertices anchored at
// (anchor_r, anchor_c): the set of B-edges with exactly one endpoint inside
// the block, i.e. the Ising bonds the loop crosses. Cardinality is
// 2*(width+height) on lattices without doubled bonds.
inline EdgePath rectangular_loop(const LiebLattice& lat, int anchor_r, int anchor_c, int width,
                                 int height) {
  if (lat.boundary != Boundary::periodic)
    throw std::invalid_argument("rectangular_loop: periodic lattice required");
  if (width < 1 || height < 1 || width >= lat.n || height >= lat.n)
    throw std::invalid_argument(
        "rectangular_loop: loop must fit strictly inside the lattice (wrapping loops are "
        "non-contractible and rejected)");
  std::vector<char> in_block(lat.num_vertices, 0);
  for (int dr = 0; dr < height; ++dr)
    for (int dc = 0; dc < width; ++dc)
      in_block[lat.vertex_index((anchor_r + dr) % lat.rows, (anchor_c + dc) % lat.n)] = 1;
  EdgePath loop;
  loop.closed = true;
  for (int e = 0; e < lat.num_edges; ++e) {
    const auto& ep = lat.edge_endpoints[e];
    if (in_block[ep[0]] != in_block[ep[1]]) loop.edges.push_back(e);
  }
  return loop;
}

enum class Region : uint8_t { L, M, R };

struct RegionPartition {
  std::vector<Region> qubit_region;  // size num_qubits
  int l1 = 0, l2 = 0;                // bonds between L-M and M-R
  std::vector<int> cut1_edges, cut2_edges;

  std::vector<bool> mask(std::initializer_list<Region> parts) const {
    std::vector<bool> m(qubit_region.size(), false);
    for (size_t q = 0; q < qubit_region.size(); ++q)
      for (Region p : parts)
        if (qubit_region[q] == p) m[q] = true;
    return m;
  }
};

// Three-band cut of the open (cylinder) lattice. L = vertex rows [0, row1],
// M = (row1, row2], R = the rest. A horizontal edge belongs to its row's
// band; a vertical edge between rows r and r+1 belongs to row r+1's band, so
// the edges crossing a cut sit on the far side of it. Cut lengths count the
// bonds whose endpoints straddle the cut; the outer boundary rings are never
// part of a cut.
inline RegionPartition partition_disk(const LiebLattice& lat, int row1, int row2, int margin = 1) {
  if (lat.boundary != Boundary::open)
    throw std::invalid_argument("partition_disk: open boundary required");
  if (row1 < 0 || row2 >= lat.rows - 1 || row1 >= row2)
    throw std::invalid_argument("partition_disk: need 0 <= row1 < row2 < rows-1");
  if (row2 - row1 < margin)
    throw std::invalid_argument("partition_disk: L and R closer than requested margin");
  RegionPartition part;
  part.qubit_region.assign(lat.num_qubits(), Region::L);
  auto band = [&](int r) { return r <= row1 ? Region::L : (r <= row2 ? Region::M : Region::R); };
  for (int v = 0; v < lat.num_vertices; ++v)
    part.qubit_region[lat.qubit_of_vertex(v)] = band(lat.vertex_row(v));
  for (int e = 0; e < lat.num_edges; ++e) {
    int r = lat.is_horizontal(e) ? (e / lat.n) : ((e - lat.rows * lat.n) / lat.n) + 1;
    part.qubit_region[lat.qubit_of_edge(e)] = band(r);
  }
  for (int e = 0; e < lat.num_edges; ++e) {
    Region a = part.qubit_region[lat.qubit_of_vertex(lat.edge_endpoints[e][0])];
    Region b = part.qubit_region[lat.qubit_of_vertex(lat.edge_endpoints[e][1])];
    if (a == b) continue;
    if ((a == Region::L && b == Region::M) || (a == Region::M && b == Region::L)) {
      part.l1++;
      part.cut1_edges.push_back(e);
    } else if ((a == Region::M && b == Region::R) || (a == Region::R && b == Region::M)) {
      part.l2++;
      part.cut2_edges.push_back(e);
    } else {
      throw std::invalid_argument("partition_disk: L and R share a bond");
    }
  }
  return part;
}

}  // namespace clusterdiag
