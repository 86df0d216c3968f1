#pragma once

// The three SPT-transition diagnostics, each computable along independent
// routes (quantum expansion sums, dense matrices, classical partition sums,
// Monte Carlo):
//
//   relative entropy  D^n(rho_D || rho_S) = ln <s_u s_v>_{H_n} / (1-n)
//   strange correlator C(gamma) = [sum_D lam^{|wall \ gamma|}] /
//                                 [sum_D lam^{|wall|}]
//                               = e^{(J/2)|gamma|} Z_{J/2,cut} / Z_{J/2}
//   Renyi negativity  E_X^{(2n)} = ln tr (rho^{T_X})^{2n} / tr rho^{2n}
//                               = ln Z'_{2n} / Z_{2n}
//
// The negativity's classical side uses the gauge-sector-error-free setting
// (bit flip on sub-lattice B only, no phase error): the uniform gauge sum
// then forces, for each free replica, the XOR of the other replicas' domain
// configurations to vanish on the cut-adjacent layer. In merged-class terms
// every pinned vertex locks all 2n-1 flavors together.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterdiag/dense.hpp"
#include "clusterdiag/exact.hpp"
#include "clusterdiag/expansion.hpp"
#include "clusterdiag/lattice.hpp"
#include "clusterdiag/mc.hpp"
#include "clusterdiag/spin_model.hpp"

namespace clusterdiag {

enum class DiagMode { exact, dense, classical, monte_carlo };

struct DiagValue {
  double value = 0.0;
  double err = 0.0;
  bool divergent = false;  // orthogonal-state regime
  std::string provenance;
};

namespace detail {

inline uint64_t check_tuple_budget(int bits, int budget = 26) {
  if (bits > budget)
    throw std::invalid_argument("exact enumeration: replica tuple space exceeds budget");
  return uint64_t(1) << bits;
}

}  // namespace detail

// --- relative entropy ------------------------------------------------------

inline DiagValue relative_entropy(const LiebLattice& lat, double px, double pz, int u, int v,
                                  int n, DiagMode mode, const McSchedule& sched = {}) {
  if (lat.boundary != Boundary::open)
    throw std::invalid_argument("relative_entropy: open boundary required");
  if (u == v) return {0.0, 0.0, false, "trivial"};
  if (n < 1) throw std::invalid_argument("relative_entropy: n >= 1");
  if (n == 1 && mode != DiagMode::dense)
    throw std::invalid_argument("relative_entropy: n = 1 only via the dense oracle");

  auto from_correlator = [&](double corr, double err, const char* prov) {
    DiagValue d;
    d.provenance = prov;
    if (corr <= 0.0 || corr <= err) {
      d.divergent = true;
      d.value = std::numeric_limits<double>::infinity();
      return d;
    }
    d.value = std::log(corr) / (1.0 - double(n));
    d.err = err / corr / std::abs(1.0 - double(n));
    return d;
  };

  switch (mode) {
    case DiagMode::exact: {
      auto expn = apply_channel(apply_channel(pure_state_expansion(lat),
                                              ChannelSpec::bit_flip(px)),
                                ChannelSpec::phase(pz));
      auto wt = expn.dw_weight_table();
      const int nv = lat.num_vertices;
      const int f = n - 1;
      uint64_t total = detail::check_tuple_budget(nv * f);
      double num = 0.0, den = 0.0;
      const uint64_t mask = (uint64_t(1) << nv) - 1;
      for (uint64_t tup = 0; tup < total; ++tup) {
        double w = 1.0;
        uint64_t x = 0;
        for (int a = 0; a < f; ++a) {
          uint64_t d = (tup >> (a * nv)) & mask;
          w *= wt[d];
          x ^= d;
        }
        w *= wt[x];
        den += w;
        uint64_t d1 = tup & mask;
        bool equal = (((d1 >> u) ^ (d1 >> v)) & 1) == 0;
        num += equal ? w : -w;
      }
      return from_correlator(num / den, 0.0, "exact-expansion");
    }
    case DiagMode::dense: {
      std::vector<ChannelSpec> chans{ChannelSpec::bit_flip(px), ChannelSpec::phase(pz)};
      Mat rho = kraus_density_matrix(lat, chans);
      // rho_S: conjugate the pure state by the boundary string, then decohere
      Mat rho_s = cluster_state_dense(lat);
      auto path = boundary_string(lat, u, v);
      uint64_t xs = 0;
      for (int e : path.edges) xs |= uint64_t(1) << lat.qubit_of_edge(e);
      left_mul_xz(rho_s, xs, 0);
      right_mul_xz(rho_s, xs, 0);
      for (const auto& ch : chans) {
        auto [vm, em] = ch.support_masks(lat);
        char axis = ch.kind == ChannelSpec::Kind::bit_flip ? 'X' : 'Z';
        for (int q = 0; q < lat.num_vertices; ++q)
          if ((vm >> q) & 1) apply_pauli_channel_dense(rho_s, q, ch.rate, axis);
        for (int e = 0; e < lat.num_edges; ++e)
          if ((em >> e) & 1) apply_pauli_channel_dense(rho_s, lat.qubit_of_edge(e), ch.rate, axis);
      }
      if (n == 1) {
        Eigen::SelfAdjointEigenSolver<Mat> ed(rho), es(rho_s);
        DiagValue d;
        d.provenance = "dense-oracle";
        // supp(rho_D) must lie in supp(rho_S) for a finite value
        double val = 0.0;
        const double tol = 1e-12;
        Mat log_s = Mat::Zero(rho.rows(), rho.cols());
        for (int k = 0; k < es.eigenvalues().size(); ++k) {
          double lam = es.eigenvalues()(k);
          if (lam > tol)
            log_s += std::log(lam) * es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
        }
        for (int k = 0; k < ed.eigenvalues().size(); ++k) {
          double lam = ed.eigenvalues()(k);
          if (lam <= tol) continue;
          Vec psi = ed.eigenvectors().col(k);
          double proj_s = 0.0;
          for (int k2 = 0; k2 < es.eigenvalues().size(); ++k2)
            if (es.eigenvalues()(k2) <= tol) proj_s += std::pow(es.eigenvectors().col(k2).dot(psi), 2);
          if (proj_s > 1e-9) {
            d.divergent = true;
            d.value = std::numeric_limits<double>::infinity();
            return d;
          }
          val += lam * (std::log(lam) - psi.dot(log_s * psi));
        }
        d.value = val;
        return d;
      }
      Mat acc = rho;
      for (int k = 0; k < n - 1; ++k) acc = acc * rho_s;
      double num = acc.trace();
      double den = trace_power(rho, n);
      double ratio = num / den;
      DiagValue d;
      d.provenance = "dense-oracle";
      if (ratio <= 0.0) {
        d.divergent = true;
        d.value = std::numeric_limits<double>::infinity();
        return d;
      }
      d.value = std::log(ratio) / (1.0 - double(n));
      return d;
    }
    case DiagMode::classical: {
      ExactOptions opt;
      opt.correlators = {{u, v}};
      auto res = exact_partition(ising_model(lat, px, pz, n), opt);
      return from_correlator(res.correlators[0], 0.0, "classical-enumeration");
    }
    case DiagMode::monte_carlo: {
      auto est = boundary_correlator(ising_model(lat, px, pz, n), u, v, sched);
      return from_correlator(est.value, est.std_err, "monte-carlo");
    }
  }
  throw std::logic_error("relative_entropy: unknown mode");
}

// --- strange correlator ------------------------------------------------------

inline DiagValue strange_correlator(const LiebLattice& lat, double px, const EdgePath& loop,
                                    DiagMode mode, const McSchedule& sched = {}) {
  if (lat.boundary != Boundary::periodic)
    throw std::invalid_argument("strange_correlator: periodic lattice required");
  if (!loop.closed) throw std::invalid_argument("strange_correlator: loop must be closed");
  const double j = couplings_from_errors(px, 0.0).j;

  switch (mode) {
    case DiagMode::exact: {
      // wall-gauge sums over domain configurations
      auto expn = apply_channel(pure_state_expansion(lat), ChannelSpec::bit_flip(px));
      uint64_t loop_mask = 0;
      for (int e : loop.edges) loop_mask |= uint64_t(1) << e;
      const double lam = 1.0 - 2.0 * px;
      uint64_t total = detail::check_tuple_budget(lat.num_vertices);
      double num = 0.0, den = 0.0;
      for (uint64_t d = 0; d < total; ++d) {
        uint64_t wall = expn.wall_mask(d);
        int wl = __builtin_popcountll(wall);
        int on_loop = __builtin_popcountll(wall & loop_mask);
        double wd = std::pow(lam, wl);
        den += wd;
        num += std::pow(lam, wl - on_loop);
      }
      return {num / den, 0.0, false, "exact-expansion"};
    }
    case DiagMode::dense: {
      Vec psi = cluster_state_vector(lat);
      std::vector<Eigen::Matrix2d> num_ops(lat.num_qubits()), den_ops(lat.num_qubits());
      Eigen::Matrix2d projx, projz_damped, projz_free;
      projx << 0.5, 0.5, 0.5, 0.5;
      projz_free << 1.0, 0.0, 0.0, 0.0;
      projz_damped << 0.5 * (1 + (1 - 2 * px)), 0.0, 0.0, 0.5 * (1 - (1 - 2 * px));
      std::vector<char> on_loop(lat.num_edges, 0);
      for (int e : loop.edges) on_loop[e] = 1;
      for (int v = 0; v < lat.num_vertices; ++v) num_ops[v] = den_ops[v] = projx;
      for (int e = 0; e < lat.num_edges; ++e) {
        den_ops[lat.qubit_of_edge(e)] = projz_damped;
        num_ops[lat.qubit_of_edge(e)] = on_loop[e] ? projz_free : projz_damped;
      }
      double num = product_op_expectation(psi, lat.num_qubits(), num_ops);
      double den = product_op_expectation(psi, lat.num_qubits(), den_ops);
      return {num / den, 0.0, false, "dense-oracle"};
    }
    case DiagMode::classical: {
      SpinModel base = vertex_ising(lat, j / 2.0, 0.0);
      SpinModel cut = cut_bond_model(base, loop);
      double lnz = exact_partition(base).log_partition;
      double lnz_cut = exact_partition(cut).log_partition;
      double lnc = (j / 2.0) * double(loop.edges.size()) + lnz_cut - lnz;
      return {std::exp(lnc), 0.0, false, "classical-enumeration"};
    }
    case DiagMode::monte_carlo: {
      SpinModel base = vertex_ising(lat, j / 2.0, 0.0);
      if (px == 0.0) return {1.0, 0.0, false, "monte-carlo"};
      auto df = free_energy_difference(base, CutTarget{loop.edges}, sched);
      double lnc = (j / 2.0) * double(loop.edges.size()) - df.value;
      double c = std::exp(lnc);
      return {c, c * df.std_err, false, "monte-carlo"};
    }
  }
  throw std::logic_error("strange_correlator: unknown mode");
}

// --- Renyi negativity ---------------------------------------------------------

// Region given as a qubit mask. Channel setting: bit flip at px on
// sub-lattice B only (the gauge-sector-error-free simplification).
inline DiagValue renyi_negativity(const LiebLattice& lat, double px,
                                  const std::vector<bool>& region, int two_n, DiagMode mode,
                                  const McSchedule& sched = {}) {
  if (two_n < 2 || two_n % 2 != 0)
    throw std::invalid_argument("renyi_negativity: even replica order >= 2 required");
  if (int(region.size()) != lat.num_qubits())
    throw std::invalid_argument("renyi_negativity: region mask size mismatch");
  bool empty = true, full = true;
  for (bool b : region) (b ? empty : full) = false;
  if (empty || full) return {0.0, 0.0, false, "trivial"};
  const int m = two_n;

  switch (mode) {
    case DiagMode::exact: {
      auto rc = negativity_constraints(lat, region);
      uint64_t pin_mask = 0;
      for (int v : rc.pinned_vertices) pin_mask |= uint64_t(1) << v;
      auto expn = apply_channel(pure_state_expansion(lat),
                                ChannelSpec::bit_flip(px, ChannelSpec::Support::sublattice_b));
      auto wt = expn.dw_weight_table();
      const int nv = lat.num_vertices;
      const uint64_t mask = (uint64_t(1) << nv) - 1;
      uint64_t total = detail::check_tuple_budget(nv * (m - 1));
      auto ok = [&](uint64_t e) {
        if (e & pin_mask) return false;
        for (auto [a, b] : rc.paired_vertices)
          if ((((e >> a) ^ (e >> b)) & 1) != 0) return false;
        return true;
      };
      double num = 0.0, den = 0.0;
      std::vector<uint64_t> ds(m - 1);
      for (uint64_t tup = 0; tup < total; ++tup) {
        double w = 1.0;
        uint64_t x = 0;
        for (int a = 0; a < m - 1; ++a) {
          ds[a] = (tup >> (a * nv)) & mask;
          w *= wt[ds[a]];
          x ^= ds[a];
        }
        w *= wt[x];
        den += w;
        bool pass = true;
        for (int g = 0; g < m - 1 && pass; ++g) pass = ok(x ^ ds[g]);
        if (pass) num += w;
      }
      return {std::log(num / den), 0.0, false, "exact-expansion"};
    }
    case DiagMode::dense: {
      Mat rho = kraus_density_matrix(
          lat, {ChannelSpec::bit_flip(px, ChannelSpec::Support::sublattice_b)});
      uint64_t bits = 0;
      for (int q = 0; q < lat.num_qubits(); ++q)
        if (region[q]) bits |= uint64_t(1) << q;
      Mat rt = partial_transpose(rho, bits);
      double num = trace_power(rt, m);
      double den = trace_power(rho, m);
      return {std::log(num / den), 0.0, false, "dense-oracle"};
    }
    case DiagMode::classical: {
      double j = couplings_from_errors(px, 0.0).j;
      SpinModel base = vertex_ising(lat, j, 0.0, m - 1, true, m);
      SpinModel cons = constrained_model(base, lat, region);
      double lnz = exact_partition(base).log_partition;
      double lnzp = exact_partition(cons).log_partition;
      return {lnzp - lnz, 0.0, false, "classical-enumeration"};
    }
    case DiagMode::monte_carlo: {
      double j = couplings_from_errors(px, 0.0).j;
      SpinModel base = vertex_ising(lat, j, 0.0, m - 1, true, m);
      auto rc = negativity_constraints(lat, region);
      if (!rc.paired_vertices.empty())
        throw std::invalid_argument("renyi_negativity: paired constraints need exact mode");
      if (rc.pinned_vertices.empty()) return {0.0, 0.0, false, "monte-carlo"};
      MergeTarget target;
      for (int v : rc.pinned_vertices) {
        std::vector<int> cls;
        for (int a = 0; a < m - 1; ++a) cls.push_back(base.variable(v, a));
        target.classes.push_back(cls);
      }
      auto df = free_energy_difference(base, target, sched);
      return {-df.value, df.std_err, false, "monte-carlo"};
    }
  }
  throw std::logic_error("renyi_negativity: unknown mode");
}

// correlation length of the mapped Ising model at coupling j, from the decay
// of the strip two-point function; used only to flag unreliable geometry
inline double estimate_xi(double j, int width = 8, int length = 24) {
  if (j <= 0.0) return 0.0;
  SpinModel strip;
  strip.num_sites = width * length;
  strip.fields.assign(strip.num_sites, 0.0);
  for (int r = 0; r < length; ++r)
    for (int c = 0; c < width; ++c) {
      if (width > 2) strip.bonds.push_back({r * width + c, r * width + (c + 1) % width, j});
      if (r + 1 < length) strip.bonds.push_back({r * width + c, (r + 1) * width + c, j});
    }
  if (width == 2)
    for (int r = 0; r < length; ++r) {
      strip.bonds.push_back({r * width, r * width + 1, j});
      strip.bonds.push_back({r * width, r * width + 1, j});
    }
  int a = (length / 4) * width;
  double c1 = std::abs(transfer_matrix_correlator(strip, width, a, a + 2 * width));
  double c2 = std::abs(transfer_matrix_correlator(strip, width, a, a + 6 * width));
  if (c1 <= 0.0 || c2 <= 0.0 || c2 >= c1) return std::numeric_limits<double>::infinity();
  return 4.0 / std::log(c1 / c2);
}

struct TripartiteResult {
  DiagValue value;
  DiagValue e_lm, e_mr, e_m;
  bool separation_warning = false;
};

inline TripartiteResult tripartite_negativity(const LiebLattice& lat, double px,
                                              const RegionPartition& part, int two_n,
                                              DiagMode mode, const McSchedule& sched = {}) {
  TripartiteResult r;
  McSchedule s = sched;
  r.e_lm = renyi_negativity(lat, px, part.mask({Region::L, Region::M}), two_n, mode, s);
  s.stream += 101;
  r.e_mr = renyi_negativity(lat, px, part.mask({Region::M, Region::R}), two_n, mode, s);
  s.stream += 101;
  r.e_m = renyi_negativity(lat, px, part.mask({Region::M}), two_n, mode, s);
  // E_{LMR} is the full system: exactly zero
  r.value.value = r.e_lm.value + r.e_mr.value - r.e_m.value;
  r.value.err = std::sqrt(r.e_lm.err * r.e_lm.err + r.e_mr.err * r.e_mr.err + r.e_m.err * r.e_m.err);
  r.value.provenance = r.e_lm.provenance;
  double j = couplings_from_errors(px, 0.0).j;
  double xi = estimate_xi(j);
  int separation = 0;
  for (size_t q = 0; q < part.qubit_region.size(); ++q)
    if (part.qubit_region[q] == Region::M && int(q) < lat.num_vertices) separation++;
  r.separation_warning = double(separation) / double(lat.n) < xi;
  return r;
}

// --- area-law fit and phase call ---------------------------------------------

struct AreaLawFit {
  double c = 0.0, b = 0.0;       // E = c*l + b
  double c_err = 0.0, b_err = 0.0;
};

inline AreaLawFit fit_area_law(const std::vector<std::pair<double, DiagValue>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_area_law: need >= 2 points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [l, e] : points) {
    double w = e.err > 0 ? 1.0 / (e.err * e.err) : 1.0;
    sw += w;
    sx += w * l;
    sy += w * e.value;
    sxx += w * l * l;
    sxy += w * l * e.value;
  }
  double det = sw * sxx - sx * sx;
  AreaLawFit f;
  f.c = (sw * sxy - sx * sy) / det;
  f.b = (sxx * sy - sx * sxy) / det;
  f.c_err = std::sqrt(sw / det);
  f.b_err = std::sqrt(sxx / det);
  return f;
}

enum class PhaseCall { spt, trivial, near_critical };

struct DiagnosticVotes {
  int spt = 0, trivial = 0;
};

// Majority vote with a near-critical band around the n=2 critical rate.
inline PhaseCall phase_call(const DiagnosticVotes& votes, double px, double p_c = 0.17817,
                            double band = 0.02) {
  if (std::abs(px - p_c) <= band) return PhaseCall::near_critical;
  if (votes.spt == votes.trivial) return PhaseCall::near_critical;
  return votes.spt > votes.trivial ? PhaseCall::spt : PhaseCall::trivial;
}

inline const char* phase_call_name(PhaseCall c) {
  switch (c) {
    case PhaseCall::spt: return "SPT";
    case PhaseCall::trivial: return "trivial";
    default: return "near-critical";
  }
}

}  // namespace clusterdiag
