#pragma once

// Monte Carlo engine: Metropolis and Wolff samplers over merged-class
// variables, blocked/jackknife error analysis, free-energy-difference
// estimators (thermodynamic integration, exponential perturbation, class
// insertion chains) and Binder-cumulant critical-point location.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "clusterdiag/exact.hpp"
#include "clusterdiag/rng.hpp"
#include "clusterdiag/spin_model.hpp"

namespace clusterdiag {

struct McSchedule {
  uint64_t thermalization = 20000;
  uint64_t sweeps = 100000;
  int blocks = 32;
  uint64_t seed = 1;
  uint64_t stream = 0;
  int lambda_points = 12;
};

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  uint64_t sweeps = 0;
  uint64_t thermalization = 0;
  uint64_t seed = 0;
  std::string method;
};

struct BlockedStats {
  double mean = 0.0, err = 0.0;
  std::vector<double> block_means;
};

inline BlockedStats blocked_mean(const std::vector<double>& samples, int blocks) {
  BlockedStats st;
  if (samples.size() < 4) {
    for (double v : samples) st.mean += v;
    if (!samples.empty()) st.mean /= double(samples.size());
    st.block_means = {st.mean, st.mean};
    return st;
  }
  if (blocks < 2 || samples.size() < size_t(blocks) * 2) blocks = 2;
  size_t per = samples.size() / blocks;
  for (int b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (size_t k = b * per; k < (b + 1) * per; ++k) acc += samples[k];
    st.block_means.push_back(acc / double(per));
  }
  for (double bm : st.block_means) st.mean += bm;
  st.mean /= blocks;
  double var = 0.0;
  for (double bm : st.block_means) var += (bm - st.mean) * (bm - st.mean);
  st.err = std::sqrt(var / double(blocks) / double(blocks - 1));
  return st;
}

// integrated autocorrelation time with a self-consistent window cutoff
inline double autocorrelation_time(const std::vector<double>& x) {
  size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= double(n);
  if (var == 0.0) return 1.0;
  double tau = 1.0;
  for (size_t k = 1; k < n / 2; ++k) {
    double c = 0.0;
    for (size_t t = 0; t + k < n; ++t) c += (x[t] - mean) * (x[t + k] - mean);
    c /= double(n - k) * var;
    tau += 2.0 * c;
    if (double(k) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

class SpinConfig {
 public:
  explicit SpinConfig(const SpinModel& model)
      : model_(&model),
        classes_(detail::build_classes(model)),
        touch_(detail::build_touch_lists(model, classes_)),
        spins_(model.num_variables(), 1),
        terms_(model, spins_) {
    energy_ = model.energy(spins_);
    magnetization_ = double(model.num_sites);
    site_bonds_.assign(model.num_sites, {});
    for (int b = 0; b < int(model.bonds.size()); ++b) {
      site_bonds_[model.bonds[b].i].push_back(b);
      site_bonds_[model.bonds[b].j].push_back(b);
    }
  }
  SpinConfig(const SpinConfig&) = delete;
  SpinConfig& operator=(const SpinConfig&) = delete;

  const SpinModel& model() const { return *model_; }
  int num_classes() const { return int(classes_.members.size()); }
  double energy() const { return energy_; }
  int8_t spin(int site, int flavor = 0) const { return spins_[model_->variable(site, flavor)]; }
  double magnetization() const { return magnetization_ / double(model_->num_sites); }

  void randomize(SplitMix64& rng) {
    for (int c = 0; c < num_classes(); ++c)
      if (rng.uniform() < 0.5) flip_class_spins(c);
    resync();
  }

  double flip_delta(int c) {
    double before = terms_.touched(touch_, c);
    flip_class_spins(c);
    double after = terms_.touched(touch_, c);
    flip_class_spins(c);
    return after - before;
  }

  void apply_flip(int c, double delta) {
    flip_class_spins(c);
    energy_ += delta;
  }

  // Global flip of one flavor's spins: for zero-field pure-bond models this
  // leaves every bond term invariant (sum and product alike), so it is a
  // zero-cost move that hops between global flavor sectors. Only valid while
  // no merged class ties flavors together.
  bool try_global_flavor_flip(int flavor) {
    if (!model_->fields.empty())
      for (double f : model_->fields)
        if (f != 0.0) return false;
    if (!model_->plaquettes.empty()) return false;
    for (const auto& cls : model_->merged_classes) {
      int f0 = cls.empty() ? 0 : cls[0] / model_->num_sites;
      for (int var : cls)
        if (var / model_->num_sites != f0) return false;
    }
    for (int site = 0; site < model_->num_sites; ++site) {
      int var = model_->variable(site, flavor);
      if (var < model_->num_sites) magnetization_ -= 2.0 * double(spins_[var]);
      spins_[var] = -spins_[var];
    }
    return true;
  }

  // |cached - recomputed| energy; the samplers keep this below 1e-9
  double energy_drift() const {
    return std::abs(energy_ - model_->energy(spins_));
  }
  void resync() {
    energy_ = model_->energy(spins_);
  }

  const detail::ClassStructure& classes() const { return classes_; }

 private:
  void flip_class_spins(int c) {
    for (int var : classes_.members[c]) {
      if (var < model_->num_sites) magnetization_ -= 2.0 * double(spins_[var]);
      spins_[var] = -spins_[var];
    }
  }

  const SpinModel* model_;
  detail::ClassStructure classes_;
  detail::TouchLists touch_;
  std::vector<int8_t> spins_;
  detail::TermEnergies terms_;
  std::vector<std::vector<int>> site_bonds_;
  double energy_ = 0.0;
  double magnetization_ = 0.0;

  friend void wolff_update(SpinConfig&, SplitMix64&);
};

// One full sweep of single-class Metropolis proposals.
inline void metropolis_sweep(SpinConfig& cfg, SplitMix64& rng) {
  int nc = cfg.num_classes();
  for (int c = 0; c < nc; ++c) {
    double d = cfg.flip_delta(c);
    if (d <= 0.0 || rng.uniform() < std::exp(-d)) cfg.apply_flip(c, d);
  }
}

inline bool wolff_compatible(const SpinModel& m) {
  if (!m.plaquettes.empty()) return false;
  if (m.flavors > 1 && m.coupled) return false;
  for (double f : m.fields)
    if (f != 0.0) return false;
  for (const auto& b : m.bonds)
    if (b.coupling < 0.0) return false;
  return true;
}

// Single Wolff cluster flip over merged-class variables. Requires zero
// fields and non-negative couplings; the per-flavor bond activation is
// 1 - exp(-2 J_eff) with J_eff = J for a single flavor and J/2 for
// decoupled flavors.
inline void wolff_update(SpinConfig& cfg, SplitMix64& rng) {
  const SpinModel& m = cfg.model();
  if (!wolff_compatible(m))
    throw std::invalid_argument("wolff_update: needs zero fields, J >= 0, no replica coupling");
  const double jfactor = (m.flavors == 1) ? 1.0 : 0.5;

  // variable-level adjacency via bonds of the same flavor
  int seed_class = int(rng.below(uint64_t(cfg.num_classes())));
  std::vector<char> in_cluster(cfg.num_classes(), 0);
  std::vector<int> stack{seed_class};
  std::vector<int> cluster{seed_class};
  in_cluster[seed_class] = 1;
  const auto& cs = cfg.classes();
  const auto& site_bonds = cfg.site_bonds_;
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (int var : cs.members[c]) {
      int site = var % m.num_sites, flavor = var / m.num_sites;
      for (int b : site_bonds[site]) {
        const auto& bd = m.bonds[b];
        if (bd.coupling <= 0.0) continue;
        int other_site = bd.i == site ? bd.j : bd.i;
        int other_var = m.variable(other_site, flavor);
        int other_class = cs.rep[other_var];
        if (in_cluster[other_class]) continue;
        if (cfg.spin(site, flavor) != cfg.spin(other_site, flavor)) continue;
        if (rng.uniform() < 1.0 - std::exp(-2.0 * jfactor * bd.coupling)) {
          in_cluster[other_class] = 1;
          stack.push_back(other_class);
          cluster.push_back(other_class);
        }
      }
    }
  }
  for (int c : cluster) cfg.flip_class_spins(c);
  cfg.resync();
}

// --- measurement drivers -------------------------------------------------

enum class Sampler { metropolis, wolff, auto_select };

inline Sampler resolve_sampler(Sampler s, const SpinModel& m) {
  if (s == Sampler::auto_select) return wolff_compatible(m) ? Sampler::wolff : Sampler::metropolis;
  return s;
}

template <typename Observer>
inline void run_chain(const SpinModel& model, const McSchedule& sched, Sampler sampler,
                      Observer&& observe) {
  SpinConfig cfg(model);
  SplitMix64 rng(sched.seed, sched.stream);
  // ordered start: correct typical state in the FM regime, where local
  // dynamics relaxing a random start is glassy; the PM side thermalizes fast
  sampler = resolve_sampler(sampler, model);
  bool sector_hops = model.flavors > 1;
  auto step = [&] {
    if (sampler == Sampler::wolff) {
      wolff_update(cfg, rng);
      metropolis_sweep(cfg, rng);  // mix in local moves for observables with conserved pieces
    } else {
      metropolis_sweep(cfg, rng);
    }
    if (sector_hops)
      sector_hops = cfg.try_global_flavor_flip(int(rng.below(uint64_t(model.flavors))));
  };
  for (uint64_t t = 0; t < sched.thermalization; ++t) step();
  for (uint64_t t = 0; t < sched.sweeps; ++t) {
    step();
    observe(cfg);
  }
}

inline McEstimate boundary_correlator(const SpinModel& model, int site_u, int site_v,
                                      const McSchedule& sched,
                                      Sampler sampler = Sampler::auto_select) {
  if (site_u == site_v)
    return {1.0, 0.0, 0, 0, sched.seed, "exact"};
  std::vector<double> samples;
  samples.reserve(sched.sweeps);
  run_chain(model, sched, sampler,
            [&](const SpinConfig& c) { samples.push_back(double(c.spin(site_u)) * double(c.spin(site_v))); });
  auto st = blocked_mean(samples, sched.blocks);
  return {st.mean, st.err, sched.sweeps, sched.thermalization, sched.seed, "correlator"};
}

struct BinderResult {
  double u4 = 0.0, err = 0.0, m2 = 0.0, m2_err = 0.0;
};

inline BinderResult binder_cumulant(const SpinModel& model, const McSchedule& sched,
                                    Sampler sampler = Sampler::auto_select) {
  std::vector<double> m2s, m4s;
  m2s.reserve(sched.sweeps);
  run_chain(model, sched, sampler, [&](const SpinConfig& c) {
    double m = c.magnetization();
    m2s.push_back(m * m);
    m4s.push_back(m * m * m * m);
  });
  auto b2 = blocked_mean(m2s, sched.blocks);
  auto b4 = blocked_mean(m4s, sched.blocks);
  int nb = int(b2.block_means.size());
  // jackknife over blocks for U4
  std::vector<double> u4jk;
  double s2 = b2.mean * nb, s4 = b4.mean * nb;
  for (int k = 0; k < nb; ++k) {
    double m2k = (s2 - b2.block_means[k]) / (nb - 1);
    double m4k = (s4 - b4.block_means[k]) / (nb - 1);
    u4jk.push_back(1.0 - m4k / (3.0 * m2k * m2k));
  }
  double u4m = 0.0;
  for (double v : u4jk) u4m += v;
  u4m /= nb;
  double var = 0.0;
  for (double v : u4jk) var += (v - u4m) * (v - u4m);
  BinderResult r;
  r.u4 = u4m;
  r.err = std::sqrt(var * double(nb - 1) / double(nb));
  r.m2 = b2.mean;
  r.m2_err = b2.err;
  return r;
}

// --- free-energy differences ----------------------------------------------

struct CutTarget {
  std::vector<int> bond_ids;  // couplings scaled to zero
};
struct MergeTarget {
  std::vector<std::vector<int>> classes;  // additional merged classes, inserted in order
};
using FreeEnergyTarget = std::variant<CutTarget, MergeTarget>;

enum class FeMethod { auto_select, lambda_integration, perturbation, insertion_chain };

namespace detail {

// 12-point Gauss-Legendre nodes/weights on [0,1]
inline const std::array<std::array<double, 2>, 12>& gl12() {
  static const std::array<std::array<double, 2>, 12> table = {{
      {0.00921968287664038, 0.02358766819325591},
      {0.04794137181476257, 0.05346966299765922},
      {0.11504866290284765, 0.08003916427167311},
      {0.20634102285669128, 0.10158371336153296},
      {0.31608425050090994, 0.11674626826917740},
      {0.43738329574426554, 0.12457352290670139},
      {0.56261670425573446, 0.12457352290670139},
      {0.68391574949909006, 0.11674626826917740},
      {0.79365897714330872, 0.10158371336153296},
      {0.88495133709715235, 0.08003916427167311},
      {0.95205862818523743, 0.05346966299765922},
      {0.99078031712335962, 0.02358766819325591},
  }};
  return table;
}

}  // namespace detail

// Delta F = F(target) - F(base).
inline McEstimate free_energy_difference(const SpinModel& base, const FreeEnergyTarget& target,
                                         const McSchedule& sched,
                                         FeMethod method = FeMethod::auto_select,
                                         Sampler sampler = Sampler::auto_select) {
  if (std::holds_alternative<CutTarget>(target)) {
    const auto& cut = std::get<CutTarget>(target);
    if (method == FeMethod::auto_select) method = FeMethod::lambda_integration;
    if (method == FeMethod::lambda_integration) {
      if (sched.lambda_points != 12)
        throw std::invalid_argument("free_energy_difference: schedule uses 12-point Gauss-Legendre");
      double value = 0.0, var = 0.0;
      for (int k = 0; k < 12; ++k) {
        auto [lambda, weight] = detail::gl12()[k];
        SpinModel scaled = base;
        for (int b : cut.bond_ids) scaled.bonds[b].coupling = base.bonds[b].coupling * (1.0 - lambda);
        McSchedule s = sched;
        s.stream = sched.stream * 64 + 1 + k;
        std::vector<double> samples;
        samples.reserve(s.sweeps);
        run_chain(scaled, s, sampler, [&](const SpinConfig& c) {
          // d H(lambda)/d lambda = + sum_cut J_b B_b(s); B_b recovered from the
          // scaled model's bond energy at coupling (1-lambda) J_b.
          double acc = 0.0;
          for (int b : cut.bond_ids) {
            const auto& bd = base.bonds[b];
            if (bd.coupling == 0.0) continue;
            double sum = 0.0, prod = 1.0;
            for (int a = 0; a < base.flavors; ++a) {
              double ss = double(c.spin(bd.i, a)) * double(c.spin(bd.j, a));
              sum += ss;
              prod *= ss;
            }
            acc += bd.coupling * 0.5 * (base.coupled ? sum + prod : sum);
          }
          samples.push_back(acc);
        });
        auto st = blocked_mean(samples, s.blocks);
        value += weight * st.mean;
        var += weight * weight * st.err * st.err;
      }
      return {value, std::sqrt(var), sched.sweeps, sched.thermalization, sched.seed,
              "lambda-integration"};
    }
    if (method == FeMethod::perturbation) {
      SpinModel cut_model = base;
      for (int b : cut.bond_ids) cut_model.bonds[b].coupling = 0.0;
      auto delta_h = [&](const SpinConfig& c) {
        // H_cut - H_base on the current configuration
        double dh = 0.0;
        for (int b : cut.bond_ids) {
          const auto& bd = base.bonds[b];
          double sum = 0.0, prod = 1.0;
          for (int a = 0; a < base.flavors; ++a) {
            double ss = double(c.spin(bd.i, a)) * double(c.spin(bd.j, a));
            sum += ss;
            prod *= ss;
          }
          dh += bd.coupling * 0.5 * (base.coupled ? sum + prod : sum);
        }
        return dh;
      };
      std::vector<double> expdh, exp_rev;
      expdh.reserve(sched.sweeps);
      run_chain(base, sched, sampler, [&](const SpinConfig& c) { expdh.push_back(std::exp(-delta_h(c))); });
      McSchedule rev_sched = sched;
      rev_sched.stream = sched.stream * 64 + 63;
      run_chain(cut_model, rev_sched, sampler,
                [&](const SpinConfig& c) { exp_rev.push_back(std::exp(delta_h(c))); });
      auto ess_of = [](const std::vector<double>& w) {
        double s1 = 0.0, s2 = 0.0;
        for (double x : w) {
          s1 += x;
          s2 += x * x;
        }
        return s1 * s1 / (s2 * double(w.size()));
      };
      // overlap measured in both insertion directions; a frozen ordered chain
      // makes the forward weights look flat, so the directional estimates are
      // also required to agree
      double ess = std::min(ess_of(expdh), ess_of(exp_rev));
      if (ess < 0.10)
        throw std::runtime_error(
            "free_energy_difference: perturbation overlap below 10% effective sample size; use "
            "lambda integration");
      {
        auto fwd = blocked_mean(expdh, sched.blocks);
        auto rev = blocked_mean(exp_rev, sched.blocks);
        double f_est = -std::log(fwd.mean), r_est = std::log(rev.mean);
        double f_sig = fwd.err / fwd.mean, r_sig = rev.err / rev.mean;
        double sig = std::sqrt(f_sig * f_sig + r_sig * r_sig);
        if (std::abs(f_est - r_est) > 5.0 * sig + 1e-9)
          throw std::runtime_error(
              "free_energy_difference: forward and reverse perturbation estimates disagree; "
              "overlap insufficient, use lambda integration");
      }
      auto st = blocked_mean(expdh, sched.blocks);
      int nb = int(st.block_means.size());
      std::vector<double> jk;
      double tot = st.mean * nb;
      for (int k = 0; k < nb; ++k) jk.push_back(-std::log((tot - st.block_means[k]) / (nb - 1)));
      double jm = 0.0;
      for (double v : jk) jm += v;
      jm /= nb;
      double var = 0.0;
      for (double v : jk) var += (v - jm) * (v - jm);
      return {jm, std::sqrt(var * double(nb - 1) / double(nb)), sched.sweeps,
              sched.thermalization, sched.seed, "perturbation"};
    }
    throw std::invalid_argument("free_energy_difference: unsupported method for cut target");
  }

  const auto& merge = std::get<MergeTarget>(target);
  if (method == FeMethod::auto_select) method = FeMethod::insertion_chain;
  if (method != FeMethod::insertion_chain)
    throw std::invalid_argument("free_energy_difference: merge targets use the insertion chain");
  double value = 0.0, var = 0.0;
  SpinModel staged = base;
  for (size_t k = 0; k < merge.classes.size(); ++k) {
    McSchedule s = sched;
    s.stream = sched.stream * 64 + 1 + k;
    const auto& cls = merge.classes[k];
    std::vector<double> aligned;
    aligned.reserve(s.sweeps);
    run_chain(staged, s, sampler, [&](const SpinConfig& c) {
      int8_t ref = 0;
      bool ok = true;
      for (int var_id : cls) {
        int site = var_id % base.num_sites, flavor = var_id / base.num_sites;
        int8_t sv = c.spin(site, flavor);
        if (ref == 0)
          ref = sv;
        else if (sv != ref)
          ok = false;
      }
      aligned.push_back(ok ? 1.0 : 0.0);
    });
    auto st = blocked_mean(aligned, s.blocks);
    if (st.mean <= 0.0)
      throw std::runtime_error("free_energy_difference: insertion step never satisfied; schedule too short");
    // jackknife on -log of the acceptance ratio
    int nb = int(st.block_means.size());
    std::vector<double> jk;
    double tot = st.mean * nb;
    for (int b = 0; b < nb; ++b) {
      double loo = (tot - st.block_means[b]) / (nb - 1);
      jk.push_back(-std::log(std::max(loo, 1e-300)));
    }
    double jm = 0.0;
    for (double v : jk) jm += v;
    jm /= nb;
    double jvar = 0.0;
    for (double v : jk) jvar += (v - jm) * (v - jm);
    value += jm;
    var += jvar * double(nb - 1) / double(nb);
    staged.merged_classes.push_back(cls);
  }
  return {value, std::sqrt(var), sched.sweeps, sched.thermalization, sched.seed, "insertion-chain"};
}

// --- critical point ---------------------------------------------------------

struct CriticalPoint {
  double p_c = 0.0, err = 0.0;
  bool in_range = false;
};

// family: (size, p) -> SpinModel with h = 0. Binder curves per size are
// interpolated linearly; the estimate pools all size-pair crossings with a
// parametric bootstrap over the measured U4 errors.
template <typename ModelFamily>
inline CriticalPoint locate_critical_point(ModelFamily&& family, const std::vector<int>& sizes,
                                           const std::vector<double>& p_grid,
                                           const McSchedule& sched) {
  if (sizes.size() < 3) throw std::invalid_argument("locate_critical_point: need >= 3 sizes");
  if (p_grid.size() < 2) throw std::invalid_argument("locate_critical_point: need a p grid");
  std::vector<std::vector<BinderResult>> u4(sizes.size());
  for (size_t si = 0; si < sizes.size(); ++si) {
    for (size_t pi = 0; pi < p_grid.size(); ++pi) {
      McSchedule s = sched;
      s.stream = sched.stream * 1024 + si * 128 + pi;
      u4[si].push_back(binder_cumulant(family(sizes[si], p_grid[pi]), s));
    }
  }
  auto crossings = [&](const std::vector<std::vector<double>>& vals) {
    std::vector<double> xs;
    for (size_t a = 0; a < sizes.size(); ++a)
      for (size_t b = a + 1; b < sizes.size(); ++b)
        for (size_t pi = 0; pi + 1 < p_grid.size(); ++pi) {
          double d0 = vals[a][pi] - vals[b][pi];
          double d1 = vals[a][pi + 1] - vals[b][pi + 1];
          if (d0 == d1 || (d0 > 0) == (d1 > 0)) continue;
          double t = d0 / (d0 - d1);
          xs.push_back(p_grid[pi] + t * (p_grid[pi + 1] - p_grid[pi]));
        }
    return xs;
  };
  std::vector<std::vector<double>> central(sizes.size());
  for (size_t si = 0; si < sizes.size(); ++si)
    for (auto& r : u4[si]) central[si].push_back(r.u4);
  auto xs = crossings(central);
  CriticalPoint cp;
  if (xs.empty()) return cp;
  cp.in_range = true;
  for (double x : xs) cp.p_c += x;
  cp.p_c /= double(xs.size());
  // parametric bootstrap
  SplitMix64 rng(sched.seed, 987654321);
  std::vector<double> boots;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::vector<double>> pert(sizes.size());
    for (size_t si = 0; si < sizes.size(); ++si)
      for (auto& r : u4[si]) {
        double g = std::sqrt(-2.0 * std::log(rng.uniform() + 1e-12)) *
                   std::cos(6.283185307179586 * rng.uniform());
        pert[si].push_back(r.u4 + r.err * g);
      }
    auto bx = crossings(pert);
    if (bx.empty()) continue;
    double mean = 0.0;
    for (double x : bx) mean += x;
    boots.push_back(mean / double(bx.size()));
  }
  if (boots.size() > 8) {
    double bm = 0.0;
    for (double b : boots) bm += b;
    bm /= double(boots.size());
    double var = 0.0;
    for (double b : boots) var += (b - bm) * (b - bm);
    cp.err = std::sqrt(var / double(boots.size() - 1));
  }
  double grid_floor = 0.0;
  for (size_t pi = 0; pi + 1 < p_grid.size(); ++pi)
    grid_floor = std::max(grid_floor, p_grid[pi + 1] - p_grid[pi]);
  cp.err = std::max(cp.err, grid_floor / 10.0);
  return cp;
}

}  // namespace clusterdiag
