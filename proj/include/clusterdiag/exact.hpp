#pragma once

// Exact evaluation of SpinModel partition sums: Gray-code exhaustive
// enumeration (<= 25 free binary degrees of freedom) with compensated
// accumulation in shifted exponential space, plus a row-transfer-matrix
// engine for single-flavor strips.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "clusterdiag/spin_model.hpp"

namespace clusterdiag {

struct KahanSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  void scale(double f) {
    sum *= f;
    comp *= f;
  }
};

struct ExactOptions {
  std::vector<std::pair<int, int>> correlators;  // flavor-0 site pairs
  bool moments = false;                          // <m^2>, <m^4> of flavor-0 magnetization
  bool mean_energy = false;
  int max_free_variables = 25;
};

struct ExactResult {
  double log_partition = 0.0;
  std::vector<double> correlators;
  double m2 = 0.0, m4 = 0.0;
  double mean_energy = 0.0;
  uint64_t enumerated = 0;
};

namespace detail {

struct ClassStructure {
  std::vector<int> rep;                  // variable -> class representative index
  std::vector<std::vector<int>> members; // class -> variables
};

inline ClassStructure build_classes(const SpinModel& m) {
  int nv = m.num_variables();
  std::vector<int> parent(nv);
  for (int i = 0; i < nv; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& cls : m.merged_classes)
    for (size_t k = 1; k < cls.size(); ++k) parent[find(cls[k])] = find(cls[0]);
  ClassStructure cs;
  cs.rep.resize(nv);
  std::vector<int> index(nv, -1);
  for (int i = 0; i < nv; ++i) {
    int r = find(i);
    if (index[r] < 0) {
      index[r] = int(cs.members.size());
      cs.members.push_back({});
    }
    cs.rep[i] = index[r];
    cs.members[index[r]].push_back(i);
  }
  return cs;
}

inline bool is_trivial(const SpinModel& m) {
  for (const auto& b : m.bonds)
    if (b.coupling != 0.0) return false;
  for (double f : m.fields)
    if (f != 0.0) return false;
  for (const auto& p : m.plaquettes)
    if (p.coupling != 0.0) return false;
  return true;
}


struct TouchLists {
  std::vector<std::vector<int>> bonds, sites, plaqs;
};

inline TouchLists build_touch_lists(const SpinModel& m, const ClassStructure& cs) {
  const int nfree = int(cs.members.size());
  TouchLists t;
  t.bonds.resize(nfree);
  t.sites.resize(nfree);
  t.plaqs.resize(nfree);
  for (int b = 0; b < int(m.bonds.size()); ++b)
    for (int a = 0; a < m.flavors; ++a)
      for (int site : {m.bonds[b].i, m.bonds[b].j}) {
        int c = cs.rep[m.variable(site, a)];
        if (t.bonds[c].empty() || t.bonds[c].back() != b) t.bonds[c].push_back(b);
      }
  for (int site = 0; site < m.num_sites; ++site)
    for (int a = 0; a < m.flavors; ++a) {
      int c = cs.rep[m.variable(site, a)];
      if (t.sites[c].empty() || t.sites[c].back() != site) t.sites[c].push_back(site);
    }
  for (int p = 0; p < int(m.plaquettes.size()); ++p)
    for (int a = 0; a < m.flavors; ++a)
      for (int site : m.plaquettes[p].sites) {
        int c = cs.rep[m.variable(site, a)];
        if (t.plaqs[c].empty() || t.plaqs[c].back() != p) t.plaqs[c].push_back(p);
      }
  return t;
}

// Energy of one term family evaluated on a full variable-spin assignment.
struct TermEnergies {
  const SpinModel& m;
  const std::vector<int8_t>& s;
  double psign;
  TermEnergies(const SpinModel& model, const std::vector<int8_t>& spins)
      : m(model), s(spins), psign(model.product_sign()) {}
  double bond(int b) const {
    const auto& bd = m.bonds[b];
    if (bd.coupling == 0.0) return 0.0;
    double sum = 0.0, prod = 1.0;
    for (int a = 0; a < m.flavors; ++a) {
      double ss = double(s[m.variable(bd.i, a)]) * double(s[m.variable(bd.j, a)]);
      sum += ss;
      prod *= ss;
    }
    return -bd.coupling * 0.5 * (m.coupled ? sum + prod : sum);
  }
  double site(int i) const {
    if (m.fields.empty() || m.fields[i] == 0.0) return 0.0;
    double sum = 0.0, prod = 1.0;
    for (int a = 0; a < m.flavors; ++a) {
      double sv = s[m.variable(i, a)];
      sum += sv;
      prod *= sv;
    }
    return -m.fields[i] * 0.5 * (m.coupled ? sum + psign * prod : sum);
  }
  double plaq(int p) const {
    const auto& pl = m.plaquettes[p];
    if (pl.coupling == 0.0) return 0.0;
    double sum = 0.0, prod = 1.0;
    for (int a = 0; a < m.flavors; ++a) {
      double phi = 1.0;
      for (int site_ : pl.sites) phi *= double(s[m.variable(site_, a)]);
      sum += phi;
      prod *= phi;
    }
    return -pl.coupling * 0.5 * (m.coupled ? sum + prod : sum);
  }
  double touched(const TouchLists& t, int c) const {
    double e = 0.0;
    for (int b : t.bonds[c]) e += bond(b);
    for (int i : t.sites[c]) e += site(i);
    for (int p : t.plaqs[c]) e += plaq(p);
    return e;
  }
};

}  // namespace detail

inline ExactResult exact_partition(const SpinModel& m, const ExactOptions& opt = {}) {
  auto cs = detail::build_classes(m);
  const int nfree = int(cs.members.size());

  if (detail::is_trivial(m)) {
    // H == 0: every class contributes a free factor of 2
    ExactResult r;
    r.log_partition = nfree * std::log(2.0);
    for (auto [a, b] : opt.correlators)
      r.correlators.push_back(cs.rep[m.variable(a, 0)] == cs.rep[m.variable(b, 0)] ? 1.0 : 0.0);
    if (opt.moments) {
      std::vector<double> count(nfree, 0.0);
      for (int site = 0; site < m.num_sites; ++site) count[cs.rep[m.variable(site, 0)]] += 1.0;
      double c2 = 0.0, c4 = 0.0;
      for (double c : count) {
        c2 += c * c;
        c4 += c * c * c * c;
      }
      double s2 = double(m.num_sites) * double(m.num_sites);
      r.m2 = c2 / s2;
      r.m4 = (3.0 * c2 * c2 - 2.0 * c4) / (s2 * s2);
    }
    r.enumerated = 0;
    return r;
  }

  if (nfree > opt.max_free_variables)
    throw std::invalid_argument("exact_partition: free degrees of freedom exceed budget");

  auto touch = detail::build_touch_lists(m, cs);

  std::vector<int8_t> s(m.num_variables(), 1);
  detail::TermEnergies terms(m, s);
  auto touched_energy = [&](int c) { return terms.touched(touch, c); };

  double H = m.energy(s);
  double href = H;
  KahanSum z;
  std::vector<KahanSum> corr(opt.correlators.size());
  KahanSum m2s, m4s, es;
  double mag = double(m.num_sites);  // all spins +1

  auto record = [&](double weight_log_shifted) {
    double w = std::exp(weight_log_shifted);
    z.add(w);
    for (size_t k = 0; k < opt.correlators.size(); ++k) {
      auto [a, b] = opt.correlators[k];
      corr[k].add(w * double(s[m.variable(a, 0)]) * double(s[m.variable(b, 0)]));
    }
    if (opt.moments) {
      double mm = mag / double(m.num_sites);
      m2s.add(w * mm * mm);
      m4s.add(w * mm * mm * mm * mm);
    }
    if (opt.mean_energy) es.add(w * H);
  };
  auto rebase = [&](double new_ref) {
    double f = std::exp(new_ref - href);
    z.scale(f);
    for (auto& c : corr) c.scale(f);
    m2s.scale(f);
    m4s.scale(f);
    es.scale(f);
    href = new_ref;
  };

  record(0.0);
  const uint64_t total = uint64_t(1) << nfree;
  for (uint64_t k = 1; k < total; ++k) {
    int c = __builtin_ctzll(k);
    double before = touched_energy(c);
    for (int var : cs.members[c]) {
      if (var < m.num_sites) mag -= 2.0 * double(s[var]);  // flavor-0 members
      s[var] = -s[var];
    }
    H += touched_energy(c) - before;
    if (H < href) rebase(H);
    record(-(H - href));
  }

  ExactResult r;
  r.log_partition = std::log(z.sum) - href;
  for (auto& c : corr) r.correlators.push_back(c.sum / z.sum);
  if (opt.moments) {
    r.m2 = m2s.sum / z.sum;
    r.m4 = m4s.sum / z.sum;
  }
  if (opt.mean_energy) r.mean_energy = es.sum / z.sum;
  r.enumerated = total;
  return r;
}

// --- transfer matrix ------------------------------------------------------
//
// Single-flavor strip engine: sites laid out row-major (rows x width) with
// horizontal bonds inside a row (periodic in x allowed, duplicates summed)
// and vertical bonds between consecutive rows. Width <= 12.

namespace detail {

struct StripLayout {
  int rows, width;
  std::vector<std::vector<double>> jh, jv, hf;  // [row][col]
};

inline StripLayout parse_strip(const SpinModel& m, int width) {
  if (m.flavors != 1 || !m.plaquettes.empty() || !m.merged_classes.empty())
    throw std::invalid_argument("transfer matrix: single-flavor pair models only");
  if (width < 1 || width > 12 || m.num_sites % width != 0)
    throw std::invalid_argument("transfer matrix: width must divide sites and be <= 12");
  StripLayout L;
  L.width = width;
  L.rows = m.num_sites / width;
  L.jh.assign(L.rows, std::vector<double>(width, 0.0));
  L.jv.assign(std::max(L.rows - 1, 0), std::vector<double>(width, 0.0));
  L.hf.assign(L.rows, std::vector<double>(width, 0.0));
  for (int i = 0; i < m.num_sites; ++i)
    if (!m.fields.empty()) L.hf[i / width][i % width] = m.fields[i];
  for (const auto& b : m.bonds) {
    int ra = b.i / width, ca = b.i % width, rb = b.j / width, cb = b.j % width;
    if (ra == rb && (cb == (ca + 1) % width))
      L.jh[ra][ca] += b.coupling;
    else if (ra == rb && (ca == (cb + 1) % width))
      L.jh[rb][cb] += b.coupling;
    else if (rb == ra + 1 && ca == cb)
      L.jv[ra][ca] += b.coupling;
    else if (ra == rb + 1 && ca == cb)
      L.jv[rb][cb] += b.coupling;
    else
      throw std::invalid_argument("transfer matrix: bond is neither in-row nor between rows");
  }
  return L;
}

}  // namespace detail

// log Z with optional single-site spin insertions <prod s_k>: returns
// log |sum| and the sign. Insertions are (row-major site) indices.
inline std::pair<double, double> transfer_matrix_log_sum(const SpinModel& m, int width,
                                                         const std::vector<int>& insertions = {}) {
  auto L = detail::parse_strip(m, width);
  const int dim = 1 << L.width;
  std::vector<int> ins_count(size_t(L.rows) * L.width, 0);
  for (int site : insertions) ins_count[site] ^= 1;
  // Each stored jh entry is one distinct bond (width-2 rings store their two
  // doubled edges in jh[r][0] and jh[r][1]), so every c is summed once.
  auto row_weight = [&](int r, int st) {
    double e = 0.0;
    for (int c = 0; c < L.width; ++c) {
      double sc = ((st >> c) & 1) ? -1.0 : 1.0;
      double sn = ((st >> ((c + 1) % L.width)) & 1) ? -1.0 : 1.0;
      e += -L.jh[r][c] * sc * sn;
      e += -L.hf[r][c] * sc;
    }
    return e;
  };
  auto sign_factor = [&](int r, int st) {
    double f = 1.0;
    for (int c = 0; c < L.width; ++c)
      if (ins_count[size_t(r) * L.width + c]) f *= ((st >> c) & 1) ? -1.0 : 1.0;
    return f;
  };
  std::vector<double> v(dim), nv(dim);
  for (int st = 0; st < dim; ++st) v[st] = std::exp(-row_weight(0, st)) * sign_factor(0, st);
  double logz = 0.0;
  auto rescale = [&]() {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    if (mx == 0.0) return false;
    for (double& x : v) x /= mx;
    logz += std::log(mx);
    return true;
  };
  if (!rescale()) return {-std::numeric_limits<double>::infinity(), 0.0};
  for (int r = 0; r + 1 < L.rows; ++r) {
    std::vector<double> tvert(dim);
    for (int d = 0; d < dim; ++d) {
      double e = 0.0;
      for (int c = 0; c < L.width; ++c) e += -L.jv[r][c] * (((d >> c) & 1) ? -1.0 : 1.0);
      tvert[d] = std::exp(-e);
    }
    for (int sp = 0; sp < dim; ++sp) {
      double acc = 0.0;
      for (int st = 0; st < dim; ++st) acc += tvert[sp ^ st] * v[st];
      nv[sp] = acc * std::exp(-row_weight(r + 1, sp)) * sign_factor(r + 1, sp);
    }
    v.swap(nv);
    if (!rescale()) return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  double total = 0.0;
  for (double x : v) total += x;
  if (total == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
  return {logz + std::log(std::abs(total)), total > 0 ? 1.0 : -1.0};
}

inline double transfer_matrix_log_partition(const SpinModel& m, int width) {
  return transfer_matrix_log_sum(m, width).first;
}

inline double transfer_matrix_correlator(const SpinModel& m, int width, int a, int b) {
  auto num = transfer_matrix_log_sum(m, width, {a, b});
  auto den = transfer_matrix_log_sum(m, width);
  return num.second * std::exp(num.first - den.first) / den.second * 1.0;
}

}  // namespace clusterdiag
