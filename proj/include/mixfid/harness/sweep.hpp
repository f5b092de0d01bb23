#pragma once
// Sweep evaluation: one record per (N, q) point, checked before it is kept.

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mixfid/fits.hpp"
#include "mixfid/geometry.hpp"
#include "mixfid/harness/config.hpp"
#include "mixfid/proxies.hpp"

namespace mixfid::harness {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInvariantSlack = 1e-9;
inline constexpr int kProxyColumns = 4;

struct SweepRecord {
  std::string model;
  int n = 0;
  int N = 0;
  double q = kNaN;
  int eta = 1;
  double chi_F = kNaN;
  double chi_norm = kNaN;
  double lower_bound = kNaN;
  double upper_bound = kNaN;
  double M_F = kNaN;
  double D_eff = kNaN;
  double xi = kNaN;
  double gamma = kNaN;
  std::vector<double> proxy_L = std::vector<double>(kProxyColumns, kNaN);
  double gap_min = kNaN;
  double seconds = 0.0;
  double chi_numeric = kNaN;
  std::vector<CorrelatorRecord> correlators;
};

/// A sweep point: a built-in model at (N, q) or an imported state.
struct SweepPoint {
  int N = 0;
  double q = kNaN;
  std::size_t index = 0;
};

namespace detail {

inline ModelState build_model(const SweepConfig& cfg, const SweepPoint& pt) {
  const SystemSpec sys = cfg.system(pt.N);
  if (cfg.model == "bond_dephased") {
    DensityMatrix rho = build_bond_dephased(sys, pt.q);
    ChargeOperatorSet ops(sys);
    return {std::move(rho), std::move(ops)};
  }
  return build_fixed_point(sys, parse_fixed_point_kind(cfg.model));
}

inline std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint64_t out = 0;
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

inline std::string point_label(const SweepRecord& r) {
  std::string s = r.model + " n=" + std::to_string(r.n) + " N=" + std::to_string(r.N);
  if (!std::isnan(r.q)) s += " q=" + std::to_string(r.q);
  return s;
}

inline bool exceeds(double value, double limit) {
  return value > limit + kInvariantSlack * std::max(1.0, std::abs(limit));
}

}  // namespace detail

/// Throws InvariantViolation when a recorded inequality fails.
inline void check_record(const SweepRecord& r) {
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(detail::point_label(r) + ": " + what);
  };
  if (!std::isnan(r.chi_norm)) {
    if (r.chi_norm < -kInvariantSlack || detail::exceeds(r.chi_norm, r.N)) {
      fail("chi_F/eta = " + std::to_string(r.chi_norm) + " outside [0, N]");
    }
    if (!std::isnan(r.lower_bound) && detail::exceeds(r.lower_bound, r.chi_norm)) {
      fail("lower bound " + std::to_string(r.lower_bound) + " exceeds chi_F/eta " + std::to_string(r.chi_norm));
    }
    if (!std::isnan(r.upper_bound) && detail::exceeds(r.chi_norm, r.upper_bound)) {
      fail("chi_F/eta " + std::to_string(r.chi_norm) + " exceeds upper bound " + std::to_string(r.upper_bound));
    }
    for (std::size_t k = 0; k < r.proxy_L.size(); ++k) {
      if (!std::isnan(r.proxy_L[k]) && detail::exceeds(r.proxy_L[k], r.chi_norm)) {
        fail("proxy L" + std::to_string(k + 1) + " = " + std::to_string(r.proxy_L[k]) + " exceeds chi_F/eta");
      }
    }
  }
  for (std::size_t k = 1; k < r.proxy_L.size(); ++k) {
    if (!std::isnan(r.proxy_L[k]) && detail::exceeds(r.proxy_L[k - 1], r.proxy_L[k])) {
      fail("proxy chain decreases at depth " + std::to_string(k + 1));
    }
  }
  if (!std::isnan(r.gap_min) && r.gap_min < -kInvariantSlack) {
    fail("subadditivity gap " + std::to_string(r.gap_min) + " is negative");
  }
}

/// Evaluates one point. `imported` replaces the model builder when set.
inline SweepRecord evaluate_point(const SweepConfig& cfg, const SweepPoint& pt,
                                  const ModelState* imported = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<ModelState> built;
  if (!imported) built.emplace(detail::build_model(cfg, pt));
  const ModelState& st = imported ? *imported : *built;
  const DensityMatrix& rho = st.rho;
  const ChargeOperatorSet& ops = st.ops;

  SweepRecord r;
  r.model = imported ? "state" : cfg.model;
  r.n = rho.system().local_dim;
  r.N = rho.system().n_sites;
  r.q = pt.q;
  r.eta = ops.eta();

  const StateAnalysis a(rho, ops);
  const bool ti = !cfg.per_site;
  const int center = rho.system().center_site();

  if (cfg.has("susceptibility") || cfg.has("bounds") || cfg.has("proxies")) {
    const SusceptibilityResult s = susceptibility_closed(a, ti);
    r.chi_F = s.chi_F;
    r.chi_norm = s.chi_normalized;
    if (cfg.has("bounds")) {
      r.lower_bound = s.lower_bound;
      r.upper_bound = s.upper_bound;
    }
    if (cfg.has("susceptibility")) {
      r.M_F = a.magnetization();
      r.D_eff = s.chi_F > 0.0 ? effective_dimension(s.chi_F, r.N) : std::numeric_limits<double>::infinity();
      if (cfg.numeric_p > 0.0) r.chi_numeric = r.eta * susceptibility_numeric(rho, ops, cfg.numeric_p).chi;
    }
  }

  if (cfg.has("proxies")) {
    // Same reduction as chi_F/eta: N times the center site, or the sum over sites.
    std::vector<double> acc(static_cast<std::size_t>(cfg.proxy_depth), 0.0);
    auto add_site = [&](int i, double w) {
      const ProxyChain pc = proxy_chain_from_spectrum(a.twisted_product_spectrum(i), cfg.proxy_depth);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * pc.L[k];
    };
    if (ti) {
      add_site(center, static_cast<double>(r.N));
    } else {
      for (int i = 0; i < r.N; ++i) add_site(i, 1.0);
    }
    for (std::size_t k = 0; k < acc.size() && k < r.proxy_L.size(); ++k) r.proxy_L[k] = acc[k];
  }

  if (cfg.has("correlators")) {
    r.correlators = correlator_row(a, center);
    const double window = r.N / 2.0;
    try {
      r.xi = fit_decay(r.correlators, DecayModel::exponential, window).xi;
      r.gamma = fit_decay(r.correlators, DecayModel::algebraic, window).gamma;
    } catch (const NoSignal&) {
      // left as nan: the correlator vanishes at almost every distance
    }
  }

  if (cfg.has("geometry") && r.N >= 3) {
    std::mt19937_64 rng(detail::point_seed(cfg.seed, pt.index));
    std::uniform_real_distribution<double> amp(0.01, 0.1);
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < r.N; ++j) {
      for (int k = j + 1; k < r.N; ++k) {
        const double th = amp(rng), pj = amp(rng), pk = amp(rng);
        gap = std::min(gap, subadditivity_gap(rho, ops, center, j, k, th, pj, pk));
      }
    }
    r.gap_min = gap;
  }

  if (cfg.timing) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  check_record(r);
  return r;
}

/// Points in config order: sites outer, q inner.
inline std::vector<SweepPoint> sweep_points(const SweepConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (int N : cfg.sites) {
    if (cfg.is_fixed_point()) {
      pts.push_back({N, kNaN, pts.size()});
    } else {
      for (double q : cfg.q) pts.push_back({N, q, pts.size()});
    }
  }
  return pts;
}

/// Evaluates every point on up to cfg.workers threads; records come back in config order.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<SweepPoint> pts = sweep_points(cfg);
  std::vector<SweepRecord> out(pts.size());
  std::vector<std::exception_ptr> errors(pts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < pts.size(); k = next++) {
      try {
        out[k] = evaluate_point(cfg, pts[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), pts.size());
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace mixfid::harness
