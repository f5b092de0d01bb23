#pragma once
// Dense Hermitian kernel: eigendecomposition, PSD square roots, product
// spectra and spectrum hygiene. Every fidelity in the library goes through
// product_spectrum().

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mixfid/errors.hpp"

namespace mixfid {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermiticityTol = 1e-10;
/// Negative eigenvalues down to this magnitude are round-off and get clipped.
inline constexpr double kNegativeClipTol = 1e-10;
/// Relative numerical-rank threshold, in units of dim * machine epsilon.
inline constexpr double kRankEpsFactor = 8.0;

inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("hermiticity_defect: matrix is not square");
  }
  return max_abs_entry(m - m.adjoint());
}

/// Square complex matrix symmetrized at construction; the pre-symmetrization
/// defect max|M - M^H| is kept for diagnostics.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m, double tol = kHermiticityTol) : entries_(std::move(m)) {
    const Index d = entries_.rows();
    if (d != entries_.cols() || d < 1) {
      throw DimensionMismatch("HermitianMatrix: need a non-empty square matrix, got " +
                              std::to_string(d) + "x" + std::to_string(entries_.cols()));
    }
    for (Index c = 0; c < d; ++c) {
      for (Index r = 0; r <= c; ++r) {
        const Complex a = entries_(r, c);
        const Complex b = std::conj(entries_(c, r));
        defect_ = std::max(defect_, std::abs(a - b));
        const Complex avg = 0.5 * (a + b);
        entries_(r, c) = avg;
        entries_(c, r) = std::conj(avg);
      }
    }
    if (defect_ > tol) {
      throw NotHermitian("HermitianMatrix: hermiticity defect " + std::to_string(defect_) +
                         " exceeds " + std::to_string(tol));
    }
  }

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double hermiticity_defect() const noexcept { return defect_; }

 private:
  Matrix entries_;
  double defect_ = 0.0;
};

struct Spectrum {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns
  double clip_tolerance = kNegativeClipTol;

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

inline bool is_diagonal(const Matrix& m) {
  double scale = 0.0;
  for (Index k = 0; k < m.rows(); ++k) scale = std::max(scale, std::abs(m(k, k)));
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (r != c && std::abs(m(r, c)) > tol) return false;
    }
  }
  return true;
}

inline Spectrum eigh_raw(const Matrix& m) {
  if (is_diagonal(m)) {
    const Index d = m.rows();
    std::vector<Index> order(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) order[static_cast<std::size_t>(k)] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return m(a, a).real() < m(b, b).real(); });
    Spectrum s{RealVector(d), Matrix::Zero(d, d), kNegativeClipTol};
    for (Index k = 0; k < d; ++k) {
      const Index src = order[static_cast<std::size_t>(k)];
      s.eigenvalues[k] = m(src, src).real();
      s.eigenvectors(src, k) = 1.0;
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw EigenNonConvergence("eigh: eigensolver did not converge for a matrix of dimension " +
                              std::to_string(m.rows()));
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors(), kNegativeClipTol};
}

// Diagonally pivoted Cholesky M = L L^H for PSD M, stopping once the largest
// remaining pivot is <= zero. Returns false if more than max_rank columns
// would be needed.
inline bool pivoted_cholesky(const Matrix& m, double zero, Index max_rank, Matrix& out) {
  const Index d = m.rows();
  RealVector piv = m.diagonal().real();
  Matrix l(d, max_rank);
  Index k = 0;
  for (;; ++k) {
    Index p = 0;
    const double top = piv.maxCoeff(&p);
    if (top <= zero) break;
    if (k == max_rank) return false;
    Vector col = m.col(p);
    for (Index j = 0; j < k; ++j) col -= l.col(j) * std::conj(l(p, j));
    col /= std::sqrt(top);
    l.col(k) = col;
    for (Index r = 0; r < d; ++r) piv[r] -= std::norm(col[r]);
    piv[p] = 0.0;
  }
  out = l.leftCols(k);
  return true;
}

}  // namespace detail

inline Spectrum eigh(const HermitianMatrix& m) { return detail::eigh_raw(m.entries()); }

/// Magnitude below which an eigenvalue of a `dim`-dimensional PSD matrix with
/// largest eigenvalue `scale` is indistinguishable from zero.
inline double numerical_zero(double scale, Index dim) {
  return kRankEpsFactor * static_cast<double>(std::max<Index>(dim, 1)) *
         std::numeric_limits<double>::epsilon() * scale;
}

/// Zero eigenvalues below the numerical rank threshold and clip small negatives.
/// Anything more negative than -neg_tol is a hard error.
inline RealVector clip_spectrum(RealVector ev, double neg_tol = kNegativeClipTol,
                                const char* where = "clip_spectrum") {
  if (ev.size() == 0) return ev;
  const double scale = ev.cwiseAbs().maxCoeff();
  const double zero = numerical_zero(scale, ev.size());
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < -neg_tol && ev[k] < -zero) {
      throw NotPositiveSemidefinite(std::string(where) + ": eigenvalue " + std::to_string(ev[k]) +
                                        " is below -" + std::to_string(neg_tol),
                                    ev[k]);
    }
    if (ev[k] <= zero) ev[k] = 0.0;
  }
  return ev;
}

inline HermitianMatrix psd_sqrt(const HermitianMatrix& m, double tol = kNegativeClipTol) {
  Spectrum s = eigh(m);
  RealVector root = clip_spectrum(s.eigenvalues, tol, "psd_sqrt").cwiseSqrt();
  Matrix r = s.eigenvectors * root.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  return HermitianMatrix(r, std::max(kHermiticityTol, 1e-12 * (1.0 + max_abs_entry(r))));
}

/// Column factor B with M = B B^H, restricted to the numerical support of M.
/// Small matrices use the eigendecomposition (one column per nonzero
/// eigenvalue); large low-rank ones a pivoted Cholesky factor.
inline Matrix psd_factor(const Matrix& m, double tol = kNegativeClipTol) {
  constexpr Index kCholeskyMinDim = 256;
  if (m.rows() >= kCholeskyMinDim && !detail::is_diagonal(m)) {
    const double scale = m.diagonal().real().maxCoeff();
    Matrix l;
    if (detail::pivoted_cholesky(m, numerical_zero(scale, m.rows()), m.rows() / 16, l)) return l;
  }
  Spectrum s = detail::eigh_raw(m);
  RealVector ev = clip_spectrum(s.eigenvalues, tol, "psd_factor");
  std::vector<Index> keep;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev[k] > 0.0) keep.push_back(k);
  }
  Matrix b(m.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    b.col(static_cast<Index>(c)) = s.eigenvectors.col(keep[c]) * std::sqrt(ev[keep[c]]);
  }
  return b;
}

/// Nonzero eigenvalues of a Hermitian PSD core matrix, descending. Entries at
/// round-off level relative to the core's own scale are dropped.
inline RealVector core_spectrum(Matrix core) {
  if (core.rows() == 0) return RealVector(0);
  core = 0.5 * (core + core.adjoint()).eval();
  RealVector ev = detail::eigh_raw(core).eigenvalues;
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  ev = clip_spectrum(ev, kNegativeClipTol * std::max(1.0, scale), "product_spectrum");
  std::vector<double> nz;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev[k] > 0.0) nz.push_back(ev[k]);
  }
  std::sort(nz.begin(), nz.end(), std::greater<double>());
  return Eigen::Map<RealVector>(nz.data(), static_cast<Index>(nz.size()));
}

/// Nonzero eigenvalues of B^H sigma B, i.e. of sqrt(rho) sigma sqrt(rho) for
/// rho = B B^H, in descending order.
inline RealVector sandwich_spectrum(const Matrix& factor, const Matrix& sigma) {
  if (factor.cols() == 0) return RealVector(0);
  return core_spectrum(factor.adjoint() * sigma * factor);
}

/// Eigenvalues of rho*sigma through the Hermitian route sqrt(rho) sigma sqrt(rho),
/// descending, padded with zeros to the full dimension.
inline RealVector product_spectrum(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != rho.cols() || sigma.rows() != sigma.cols() || rho.rows() != sigma.rows()) {
    throw DimensionMismatch("product_spectrum: dimensions " + std::to_string(rho.rows()) +
                            " and " + std::to_string(sigma.rows()) + " differ");
  }
  RealVector nz = sandwich_spectrum(psd_factor(rho), sigma);
  RealVector out = RealVector::Zero(rho.rows());
  out.head(nz.size()) = nz;
  return out;
}

/// Cross-check route: eigenvalues of the non-Hermitian product rho*sigma from a
/// general complex eigensolver. Real parts, descending, clipped at -1e-12.
inline RealVector product_spectrum_nonhermitian(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionMismatch("product_spectrum_nonhermitian: dimension mismatch");
  }
  Eigen::ComplexEigenSolver<Matrix> solver(rho * sigma, false);
  if (solver.info() != Eigen::Success) {
    throw EigenNonConvergence("product_spectrum_nonhermitian: no convergence at dimension " +
                              std::to_string(rho.rows()));
  }
  RealVector ev = solver.eigenvalues().real();
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < 0.0 && ev[k] >= -1e-12) ev[k] = 0.0;
  }
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
  return ev;
}

/// sum_i lambda_i^k, accumulated in ascending index order.
inline double trace_power(const RealVector& lams, int k) {
  if (k < 1) throw InvalidArgument("trace_power: k must be positive");
  double acc = 0.0;
  for (Index i = 0; i < lams.size(); ++i) acc += std::pow(lams[i], k);
  return acc;
}

/// tr sqrt(M) for a PSD matrix.
inline double trace_sqrt(const Matrix& m) {
  RealVector ev = clip_spectrum(detail::eigh_raw(m).eigenvalues, kNegativeClipTol, "trace_sqrt");
  double acc = 0.0;
  for (Index i = 0; i < ev.size(); ++i) acc += std::sqrt(ev[i]);
  return acc;
}

inline double sum_sqrt(const RealVector& lams) {
  double acc = 0.0;
  for (Index i = 0; i < lams.size(); ++i) acc += std::sqrt(std::max(lams[i], 0.0));
  return acc;
}

}  // namespace mixfid
