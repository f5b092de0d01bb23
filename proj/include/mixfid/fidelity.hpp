#pragma once
// Uhlmann fidelity, square-root fidelity and Bures distance.
//
// Arguments may be sub-normalized PSD matrices; the fidelity of such a pair is
// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, tr(rho) tr(sigma)].

#include "mixfid/blocks.hpp"
#include "mixfid/states.hpp"

namespace mixfid {

namespace detail {

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch(std::string(where) + ": dimensions " + std::to_string(a.rows()) +
                            " and " + std::to_string(b.rows()) + " differ");
  }
}

inline double clip_sqrt_fidelity(double s, double tr_rho, double tr_sigma) {
  return std::clamp(s, 0.0, std::sqrt(std::max(tr_rho, 0.0) * std::max(tr_sigma, 0.0)));
}

}  // namespace detail

inline double sqrt_fidelity(const Matrix& rho, const Matrix& sigma) {
  detail::require_same_dim(rho, sigma, "sqrt_fidelity");
  const double s = sum_sqrt(sandwich_spectrum(psd_factor(rho), sigma));
  return detail::clip_sqrt_fidelity(s, rho.trace().real(), sigma.trace().real());
}

inline double fidelity(const Matrix& rho, const Matrix& sigma) {
  const double s = sqrt_fidelity(rho, sigma);
  return s * s;
}

inline double bures_distance_sq(const Matrix& rho, const Matrix& sigma) {
  return std::clamp(2.0 - 2.0 * sqrt_fidelity(rho, sigma), 0.0, 2.0);
}

inline double sqrt_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return sqrt_fidelity(rho.matrix(), sigma.matrix());
}
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}
inline double bures_distance_sq(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return bures_distance_sq(rho.matrix(), sigma.matrix());
}

/// Independent route: tr sqrt(R sigma R) with R = psd_sqrt(rho). Not clipped.
inline double sqrt_fidelity_via_psd_sqrt(const Matrix& rho, const Matrix& sigma) {
  detail::require_same_dim(rho, sigma, "sqrt_fidelity_via_psd_sqrt");
  const double tol = std::max(kHermiticityTol, 1e-12 * (1.0 + max_abs_entry(rho)));
  const Matrix r = psd_sqrt(HermitianMatrix(rho, tol)).entries();
  Matrix core = r * sigma * r;
  core = 0.5 * (core + core.adjoint()).eval();
  return trace_sqrt(core);
}

/// Fidelity against a fixed weakly symmetric reference, evaluated sector by
/// sector: sqrt F = sum_q sqrt F(rho_q, sigma_q). The support factor of each
/// block of rho is computed once.
class BlockFidelity {
 public:
  explicit BlockFidelity(const BlockOperator& rho) : basis_(rho.basis_ptr()) {
    tr_rho_ = rho.trace();
    for (int q = 0; q < rho.sector_count(); ++q) {
      const Matrix& b = rho.block(q);
      Factor f;
      if (max_abs_entry(b) == 0.0) {
        f.diagonal = true;
      } else if (detail::is_diagonal(b)) {
        f.diagonal = true;
        const RealVector d = clip_spectrum(b.diagonal().real(), kNegativeClipTol, "BlockFidelity");
        for (Index k = 0; k < d.size(); ++k) {
          if (d[k] > 0.0) {
            f.support.push_back(k);
            f.root.push_back(std::sqrt(d[k]));
          }
        }
      } else {
        f.dense = psd_factor(b);
      }
      factors_.push_back(std::move(f));
    }
  }

  /// Nonzero eigenvalues of rho*sigma restricted to sector q, descending.
  RealVector sector_spectrum(const BlockOperator& sigma, int q) const {
    const Factor& f = factors_.at(static_cast<std::size_t>(q));
    const Matrix& s = sigma.block(q);
    if (!f.diagonal) return sandwich_spectrum(f.dense, s);
    const Index k = static_cast<Index>(f.support.size());
    Matrix core(k, k);
    for (Index c = 0; c < k; ++c) {
      const Index sc = f.support[static_cast<std::size_t>(c)];
      for (Index r = 0; r < k; ++r) {
        core(r, c) = f.root[static_cast<std::size_t>(r)] *
                     s(f.support[static_cast<std::size_t>(r)], sc) *
                     f.root[static_cast<std::size_t>(c)];
      }
    }
    return core_spectrum(std::move(core));
  }

  double sqrt_fidelity(const BlockOperator& sigma) const {
    check(sigma);
    double acc = 0.0;
    for (int q = 0; q < sigma.sector_count(); ++q) acc += sum_sqrt(sector_spectrum(sigma, q));
    return detail::clip_sqrt_fidelity(acc, tr_rho_, sigma.trace());
  }

  double fidelity(const BlockOperator& sigma) const {
    const double s = sqrt_fidelity(sigma);
    return s * s;
  }

  /// Full product spectrum, descending, padded with zeros to the dimension.
  RealVector product_spectrum(const BlockOperator& sigma) const {
    check(sigma);
    std::vector<double> all;
    for (int q = 0; q < sigma.sector_count(); ++q) {
      const RealVector s = sector_spectrum(sigma, q);
      all.insert(all.end(), s.data(), s.data() + s.size());
    }
    std::sort(all.begin(), all.end(), std::greater<double>());
    RealVector out = RealVector::Zero(basis_->dim());
    for (std::size_t k = 0; k < all.size(); ++k) out[static_cast<Index>(k)] = all[k];
    return out;
  }

 private:
  struct Factor {
    bool diagonal = false;
    std::vector<Index> support;
    std::vector<double> root;
    Matrix dense;
  };

  void check(const BlockOperator& sigma) const {
    if (sigma.basis_ptr() != basis_ && !(sigma.basis().system() == basis_->system())) {
      throw DimensionMismatch("BlockFidelity: operands live on different systems");
    }
  }

  std::shared_ptr<const ChargeBasis> basis_;
  std::vector<Factor> factors_;
  double tr_rho_ = 0.0;
};

inline double sqrt_fidelity(const BlockOperator& rho, const BlockOperator& sigma) {
  return BlockFidelity(rho).sqrt_fidelity(sigma);
}

inline double fidelity(const BlockOperator& rho, const BlockOperator& sigma) {
  return BlockFidelity(rho).fidelity(sigma);
}

}  // namespace mixfid
