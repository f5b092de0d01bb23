#pragma once
// Correlators, fidelity magnetization and fidelity susceptibility.
//
// Weakly symmetric states are handled in block form (see blocks.hpp); other
// states fall back to dense matrices in the computational basis.

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mixfid/channels.hpp"
#include "mixfid/fidelity.hpp"

namespace mixfid {

/// Clock string of O_i^H O_j (or O_i O_j^H); empty for i == j.
inline ClockString pair_string(int i, int j, PairOrdering ord = PairOrdering::adjoint_i) {
  if (i == j) return {};
  return ord == PairOrdering::adjoint_i ? ClockString{{i, -1}, {j, 1}} : ClockString{{i, 1}, {j, -1}};
}

struct CorrelatorRecord {
  int i = 0;
  int j = 0;
  double fidelity_corr = 0.0;
  Complex linear_corr{0.0, 0.0};
  double renyi2_bare = 0.0;
  double renyi2_normalized = 0.0;
  double distance = 0.0;
};

/// Shared evaluation context for one state: caches its block form and the
/// fidelity factors of rho.
class StateAnalysis {
 public:
  StateAnalysis(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                PairOrdering ordering = PairOrdering::adjoint_i)
      : rho_(&rho), ops_(&ops), ordering_(ordering) {
    if (rho.dim() != ops.dim()) {
      throw DimensionMismatch("StateAnalysis: state dimension " + std::to_string(rho.dim()) +
                              " differs from the operator set's " + std::to_string(ops.dim()));
    }
    if (rho.block_form() && rho.block_form()->basis().system() == ops.system()) {
      blocks_ = *rho.block_form();
    } else {
      blocks_ = to_blocks(ops.charge_basis(), rho.matrix());
    }
    if (blocks_) ref_.emplace(*blocks_);
    purity_ = rho.purity();
  }

  const DensityMatrix& rho() const noexcept { return *rho_; }
  const ChargeOperatorSet& ops() const noexcept { return *ops_; }
  PairOrdering ordering() const noexcept { return ordering_; }
  int sites() const noexcept { return ops_->sites(); }
  bool block_form() const noexcept { return blocks_.has_value(); }
  const std::optional<BlockOperator>& blocks() const noexcept { return blocks_; }

  void check_site(int i, const char* where) const {
    if (i < 0 || i >= sites()) {
      throw InvalidArgument(std::string(where) + ": site " + std::to_string(i) + " outside [0, " +
                            std::to_string(sites()) + ")");
    }
  }

  /// F(rho, A rho A^H), A = O_i^H O_j.
  double fidelity_corr(int i, int j) const {
    check_site(i, "fidelity_correlator");
    check_site(j, "fidelity_correlator");
    if (i == j) return 1.0;
    if (blocks_) return ref_->fidelity(conjugate_clock_string(*blocks_, pair_string(i, j, ordering_)));
    return fidelity(rho_->matrix(), ops_->conjugate_pair(i, j, rho_->matrix(), ordering_));
  }

  /// tr(rho O_i^H O_j).
  Complex linear_corr(int i, int j) const {
    check_site(i, "linear_correlator");
    check_site(j, "linear_correlator");
    const Vector d = ops_->pair_phases(i, j, ordering_);
    const Matrix& m = rho_->matrix();
    Complex acc{0.0, 0.0};
    for (Index a = 0; a < m.rows(); ++a) acc += m(a, a) * d[a];
    return acc;
  }

  /// tr(rho A rho A^H), bare and divided by tr(rho^2).
  std::pair<double, double> renyi_corr(int i, int j) const {
    check_site(i, "renyi_correlator");
    check_site(j, "renyi_correlator");
    double bare = 0.0;
    if (blocks_) {
      const BlockOperator s = conjugate_clock_string(*blocks_, pair_string(i, j, ordering_));
      for (int q = 0; q < s.sector_count(); ++q) {
        bare += (blocks_->block(q).cwiseProduct(s.block(q).transpose())).sum().real();
      }
    } else {
      const Matrix s = ops_->conjugate_pair(i, j, rho_->matrix(), ordering_);
      bare = (rho_->matrix().cwiseProduct(s.transpose())).sum().real();
    }
    return {bare, purity_ > 0.0 ? bare / purity_ : 0.0};
  }

  CorrelatorRecord record(int i, int j) const {
    CorrelatorRecord r;
    r.i = i;
    r.j = j;
    r.fidelity_corr = fidelity_corr(i, j);
    r.linear_corr = linear_corr(i, j);
    std::tie(r.renyi2_bare, r.renyi2_normalized) = renyi_corr(i, j);
    r.distance = std::abs(i - j) * rho_->system().lattice_constant;
    return r;
  }

  /// (1/N) sum_j A_j rho A_j^H in block form.
  BlockOperator twisted_blocks(int i) const {
    check_site(i, "twisted_mixture");
    if (!blocks_) throw NotStronglySymmetric("twisted_mixture: state is not weakly symmetric");
    BlockOperator acc = BlockOperator::zero(blocks_->basis_ptr());
    const double w = 1.0 / static_cast<double>(sites());
    for (int j = 0; j < sites(); ++j) {
      if (j == i) {
        acc.add_scaled(w, *blocks_);
      } else {
        acc.add_scaled(w, conjugate_clock_string(*blocks_, pair_string(i, j, ordering_)));
      }
    }
    return acc;
  }

  Matrix twisted_dense(int i) const {
    check_site(i, "twisted_mixture");
    const Matrix& m = rho_->matrix();
    Matrix acc = Matrix::Zero(m.rows(), m.cols());
    const double w = 1.0 / static_cast<double>(sites());
    for (int j = 0; j < sites(); ++j) {
      const Vector d = ops_->pair_phases(i, j, ordering_);
      for (Index c = 0; c < m.cols(); ++c) {
        const Complex dc = std::conj(d[c]) * w;
        for (Index r = 0; r < m.rows(); ++r) acc(r, c) += d[r] * m(r, c) * dc;
      }
    }
    return acc;
  }

  /// F(rho, (1/N) sum_j A_j rho A_j^H).
  double twisted_fidelity(int i) const {
    if (blocks_) return ref_->fidelity(twisted_blocks(i));
    return fidelity(rho_->matrix(), twisted_dense(i));
  }

  /// Product spectrum of rho against its twisted mixture at site i.
  RealVector twisted_product_spectrum(int i) const {
    if (blocks_) return ref_->product_spectrum(twisted_blocks(i));
    return product_spectrum(rho_->matrix(), twisted_dense(i));
  }

  struct SiteTerms {
    double twisted_fidelity = 0.0;   // F(rho, sigma_i)
    std::vector<double> fij;         // F(rho, A_j rho A_j^H), j = 0..N-1
    double twisted_trace = 0.0;      // tr sigma_i
  };

  /// Everything the susceptibility needs at site i, sharing the conjugated states.
  SiteTerms site_terms(int i) const {
    check_site(i, "susceptibility");
    SiteTerms t;
    const double w = 1.0 / static_cast<double>(sites());
    if (blocks_) {
      BlockOperator acc = BlockOperator::zero(blocks_->basis_ptr());
      for (int j = 0; j < sites(); ++j) {
        if (j == i) {
          t.fij.push_back(1.0);
          acc.add_scaled(w, *blocks_);
          continue;
        }
        const BlockOperator c = conjugate_clock_string(*blocks_, pair_string(i, j, ordering_));
        t.fij.push_back(ref_->fidelity(c));
        acc.add_scaled(w, c);
      }
      t.twisted_fidelity = ref_->fidelity(acc);
      t.twisted_trace = acc.trace();
    } else {
      for (int j = 0; j < sites(); ++j) t.fij.push_back(fidelity_corr(i, j));
      const Matrix s = twisted_dense(i);
      t.twisted_fidelity = fidelity(rho_->matrix(), s);
      t.twisted_trace = s.trace().real();
    }
    return t;
  }

  /// (1/N) sum_i F(rho, O_i^H rho O_i).
  double magnetization() const {
    double acc = 0.0;
    for (int i = 0; i < sites(); ++i) {
      if (blocks_) {
        acc += ref_->fidelity(conjugate_clock_string(*blocks_, {{i, -1}}));
      } else {
        acc += fidelity(rho_->matrix(), ops_->conjugate_dagger(i, rho_->matrix()));
      }
    }
    return acc / static_cast<double>(sites());
  }

 private:
  const DensityMatrix* rho_;
  const ChargeOperatorSet* ops_;
  PairOrdering ordering_;
  std::optional<BlockOperator> blocks_;
  std::optional<BlockFidelity> ref_;
  double purity_ = 0.0;
};

inline double fidelity_correlator(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i, int j,
                                  PairOrdering ord = PairOrdering::adjoint_i) {
  return StateAnalysis(rho, ops, ord).fidelity_corr(i, j);
}

inline Complex linear_correlator(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i, int j,
                                 PairOrdering ord = PairOrdering::adjoint_i) {
  return StateAnalysis(rho, ops, ord).linear_corr(i, j);
}

inline std::pair<double, double> renyi_correlator(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                                  int i, int j,
                                                  PairOrdering ord = PairOrdering::adjoint_i) {
  return StateAnalysis(rho, ops, ord).renyi_corr(i, j);
}

inline DensityMatrix twisted_mixture(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i,
                                     PairOrdering ord = PairOrdering::adjoint_i) {
  StateAnalysis a(rho, ops, ord);
  DensityMatrix out = DensityMatrix::trusted(rho.system(), a.twisted_dense(i));
  if (a.blocks()) out.set_block_form(std::make_shared<const BlockOperator>(a.twisted_blocks(i)));
  return out;
}

inline double fidelity_magnetization(const DensityMatrix& rho, const ChargeOperatorSet& ops) {
  return StateAnalysis(rho, ops).magnetization();
}

/// Correlator records for the pairs (i, j), j = 0..N-1.
inline std::vector<CorrelatorRecord> correlator_row(const StateAnalysis& a, int i) {
  std::vector<CorrelatorRecord> out;
  for (int j = 0; j < a.sites(); ++j) out.push_back(a.record(i, j));
  return out;
}

struct SusceptibilityResult {
  double chi_F = 0.0;
  double chi_normalized = 0.0;
  int eta = 1;
  std::vector<double> per_j_fidelities;  // F(rho, A_j rho A_j^H) at the reference site
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double twisted_state_trace_check = 0.0;
  int reference_site = 0;
  bool translation_invariant = true;
};

namespace detail {

inline void require_strong_symmetry(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                    const char* where) {
  const SymmetryCheck sc = check_strong_symmetry(rho, ops);
  if (!sc.strong) {
    throw NotStronglySymmetric(std::string(where) + ": state is not strongly symmetric (residual " +
                               std::to_string(sc.strong_residual) + ")");
  }
  for (int i = 0; i < ops.sites(); ++i) {
    if (ops.unitarity_defect(i) > 1e-10) {
      throw InvalidArgument(std::string(where) + ": charged operator at site " + std::to_string(i) +
                            " is not unitary");
    }
  }
}

}  // namespace detail

/// Per-site bound terms: lower_i = (1/N) sum_j F_ij, upper_i = (1/N)(sum_j sqrt F_ij)^2.
inline std::pair<double, double> bound_terms(const StateAnalysis& a, int i, std::vector<double>* fij = nullptr) {
  double lo = 0.0, sq = 0.0;
  for (int j = 0; j < a.sites(); ++j) {
    const double f = a.fidelity_corr(i, j);
    if (fij) fij->push_back(f);
    lo += f;
    sq += std::sqrt(f);
  }
  const double n = static_cast<double>(a.sites());
  return {lo / n, sq * sq / n};
}

/// chi_F = eta sum_i F(rho, (1/N) sum_j A_j rho A_j^H). With translation
/// invariance only the center site is evaluated and multiplied by N.
/// Bounds bracket chi_F / eta.
inline SusceptibilityResult susceptibility_closed(const StateAnalysis& a, bool translation_invariant = true) {
  detail::require_strong_symmetry(a.rho(), a.ops(), "susceptibility_closed");
  SusceptibilityResult res;
  const int n_sites = a.sites();
  res.eta = a.ops().eta();
  res.translation_invariant = translation_invariant;
  res.reference_site = a.rho().system().center_site();
  const double n = static_cast<double>(n_sites);

  // Per site: N F(rho, sigma_i) lies between sum_j F_ij and (sum_j sqrt F_ij)^2.
  auto accumulate = [&](const StateAnalysis::SiteTerms& t) {
    double lo = 0.0, sq = 0.0;
    for (double f : t.fij) {
      lo += f;
      sq += std::sqrt(f);
    }
    res.chi_normalized += t.twisted_fidelity;
    res.lower_bound += lo / n;
    res.upper_bound += sq * sq / n;
  };

  if (translation_invariant) {
    const auto t = a.site_terms(res.reference_site);
    accumulate(t);
    res.chi_normalized *= n;
    res.lower_bound *= n;
    res.upper_bound *= n;
    res.per_j_fidelities = t.fij;
    res.twisted_state_trace_check = std::abs(t.twisted_trace - 1.0);
  } else {
    for (int i = 0; i < n_sites; ++i) {
      const auto t = a.site_terms(i);
      accumulate(t);
      if (i == res.reference_site) {
        res.per_j_fidelities = t.fij;
        res.twisted_state_trace_check = std::abs(t.twisted_trace - 1.0);
      }
    }
  }
  res.chi_F = res.eta * res.chi_normalized;
  return res;
}

inline SusceptibilityResult susceptibility_closed(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                                  bool translation_invariant = true,
                                                  PairOrdering ord = PairOrdering::adjoint_i) {
  return susceptibility_closed(StateAnalysis(rho, ops, ord), translation_invariant);
}

/// (lower, upper) bracketing chi_F / eta at the center site, scaled by N.
inline std::pair<double, double> susceptibility_bounds(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                                       PairOrdering ord = PairOrdering::adjoint_i) {
  detail::require_strong_symmetry(rho, ops, "susceptibility_bounds");
  StateAnalysis a(rho, ops, ord);
  auto [lo, up] = bound_terms(a, rho.system().center_site());
  const double n = static_cast<double>(a.sites());
  return {n * lo, n * up};
}

struct NumericSusceptibility {
  double chi = 0.0;
  double p = 0.0;
  bool asymptotic_ok = true;
  std::string warning;
};

/// [M_F(E_p(rho)) - M_F(rho)] / p.
inline NumericSusceptibility susceptibility_numeric(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                                    double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw InvalidArgument("susceptibility_numeric: p = " + std::to_string(p) + " must lie in (0, 1]");
  }
  NumericSusceptibility out;
  out.p = p;
  const double pn = p * ops.sites();
  if (pn >= 1e-3) {
    out.asymptotic_ok = false;
    out.warning = "p*N = " + std::to_string(pn) + " is outside the asymptotic regime p*N < 1e-3";
  }
  StateAnalysis a(rho, ops);
  const double m0 = a.magnetization();
  double m1 = 0.0;
  if (a.blocks()) {
    const BlockOperator e = apply_uniform(*a.blocks(), p);
    const BlockFidelity ref(e);
    for (int i = 0; i < ops.sites(); ++i) m1 += ref.fidelity(conjugate_clock_string(e, {{i, -1}}));
    m1 /= static_cast<double>(ops.sites());
  } else {
    m1 = fidelity_magnetization(apply_uniform(rho, ops, p), ops);
  }
  out.chi = (m1 - m0) / p;
  return out;
}

struct RichardsonCheck {
  NumericSusceptibility coarse;  // at p
  NumericSusceptibility fine;    // at p / 10
  double relative_change = 0.0;
};

inline RichardsonCheck susceptibility_numeric_checked(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                                      double p = 1e-6) {
  RichardsonCheck rc;
  rc.coarse = susceptibility_numeric(rho, ops, p);
  rc.fine = susceptibility_numeric(rho, ops, p / 10.0);
  const double ref = std::max(std::abs(rc.fine.chi), 1e-300);
  rc.relative_change = std::abs(rc.coarse.chi - rc.fine.chi) / ref;
  return rc;
}

}  // namespace mixfid
