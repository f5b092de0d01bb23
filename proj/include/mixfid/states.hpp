#pragma once
// Model density matrices and Z_n symmetry data.
//
// Charged operators are per-site clock matrices O_i = Z_i (diagonal, unitary)
// and the symmetry is U = prod_i X_i with X the cyclic shift. Then
// O_i U = w U O_i with w = exp(2 pi i / n), so O_i moves a state by one unit of
// Z_n charge. For n = 2 the clock is Pauli Z and is self-adjoint (eta = 4).

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>

#include "mixfid/blocks.hpp"
#include "mixfid/system.hpp"

namespace mixfid {

/// Which two-site string a correlator conjugates with.
enum class PairOrdering {
  adjoint_i,  // O_i^H O_j
  adjoint_j,  // O_i O_j^H
};

class DensityMatrix {
 public:
  /// Full validation: Hermitian, unit trace within 1e-10, spectrum >= -1e-10.
  /// Small negative eigenvalues are clipped and the state renormalized.
  static DensityMatrix checked(const SystemSpec& sys, Matrix m) {
    DensityMatrix dm(sys, std::move(m));
    if (dm.trace_defect_ > 1e-10) {
      throw InvalidArgument("DensityMatrix: trace deviates from 1 by " +
                            std::to_string(dm.trace_defect_));
    }
    Spectrum s = eigh(dm.matrix_);
    const double lo = s.eigenvalues.size() ? s.eigenvalues.minCoeff() : 0.0;
    if (lo < -kNegativeClipTol) {
      throw NotPositiveSemidefinite(
          "DensityMatrix: eigenvalue " + std::to_string(lo) + " is below -1e-10", lo);
    }
    if (lo < 0.0) {
      RealVector ev = s.eigenvalues.cwiseMax(0.0);
      ev /= ev.sum();
      Matrix fixed = s.eigenvectors * ev.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
      dm = DensityMatrix(sys, std::move(fixed));
    }
    dm.min_eigenvalue_ = std::max(lo, 0.0);
    return dm;
  }

  /// For matrices that are PSD by construction (builders, CPTP maps). Checks
  /// hermiticity and trace but skips the spectral check.
  static DensityMatrix trusted(const SystemSpec& sys, Matrix m) {
    DensityMatrix dm(sys, std::move(m));
    if (dm.trace_defect_ > 1e-9) {
      throw InvalidArgument("DensityMatrix: trace deviates from 1 by " +
                            std::to_string(dm.trace_defect_));
    }
    return dm;
  }

  const SystemSpec& system() const noexcept { return sys_; }
  const Matrix& matrix() const noexcept { return matrix_.entries(); }
  const HermitianMatrix& hermitian() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.dim(); }
  double trace_defect() const noexcept { return trace_defect_; }
  /// Present when the spectrum was inspected at construction.
  std::optional<double> min_eigenvalue() const noexcept { return min_eigenvalue_; }
  double purity() const { return matrix().cwiseAbs2().sum(); }

  /// Charge-sector form of the same matrix, when the producer knows it exactly.
  const std::shared_ptr<const BlockOperator>& block_form() const noexcept { return blocks_; }
  void set_block_form(std::shared_ptr<const BlockOperator> b) {
    if (b && b->dim() != dim()) throw DimensionMismatch("set_block_form: dimension mismatch");
    blocks_ = std::move(b);
  }

 private:
  static double hermitian_tol(const Matrix& m) {
    return std::max(kHermiticityTol, 1e-12 * (1.0 + max_abs_entry(m)));
  }

  DensityMatrix(const SystemSpec& sys, Matrix m) : sys_(sys), matrix_(prepare(sys, std::move(m))) {
    trace_defect_ = std::abs(matrix_.entries().trace() - Complex(1.0, 0.0));
  }

  static HermitianMatrix prepare(const SystemSpec& sys, Matrix m) {
    sys.validate();
    if (m.rows() != sys.hilbert_dim()) {
      throw DimensionMismatch("DensityMatrix: matrix dimension " + std::to_string(m.rows()) +
                              " does not match the system dimension " +
                              std::to_string(sys.hilbert_dim()));
    }
    const double tol = hermitian_tol(m);
    return HermitianMatrix(std::move(m), tol);
  }

  SystemSpec sys_;
  HermitianMatrix matrix_;
  double trace_defect_ = 0.0;
  std::optional<double> min_eigenvalue_;
  std::shared_ptr<const BlockOperator> blocks_;
};

class ChargeOperatorSet {
 public:
  explicit ChargeOperatorSet(const SystemSpec& sys)
      : sys_(sys), basis_((sys.validate(), std::make_shared<const ChargeBasis>(sys))) {
    const Index dim = sys.hilbert_dim();
    const int n = sys.local_dim;
    omega_ = root_of_unity(n);
    phases_.reserve(static_cast<std::size_t>(sys.n_sites));
    for (int i = 0; i < sys.n_sites; ++i) {
      Vector d(dim);
      for (Index a = 0; a < dim; ++a) d[a] = root_of_unity(n, digit(sys, a, i));
      phases_.push_back(std::move(d));
    }
    perm_.resize(static_cast<std::size_t>(dim));
    for (Index a = 0; a < dim; ++a) {
      Index b = 0;
      for (int s = 0; s < sys.n_sites; ++s) {
        b += static_cast<Index>((digit(sys, a, s) + 1) % n) * site_stride(sys, s);
      }
      perm_[static_cast<std::size_t>(a)] = b;
    }
    double worst = 0.0;
    for (int i = 0; i < sys.n_sites; ++i) {
      worst = std::max(worst, (phases_[static_cast<std::size_t>(i)] -
                               phases_[static_cast<std::size_t>(i)].conjugate())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    eta_ = worst < 1e-10 ? 4 : 1;
  }

  const SystemSpec& system() const noexcept { return sys_; }
  int sites() const noexcept { return sys_.n_sites; }
  Index dim() const { return static_cast<Index>(perm_.size()); }
  int eta() const noexcept { return eta_; }
  Complex omega() const noexcept { return omega_; }
  const std::shared_ptr<const ChargeBasis>& charge_basis() const noexcept { return basis_; }

  /// Diagonal of O_i in the computational basis.
  const Vector& site_phases(int i) const { return phases_.at(check_site(i)); }
  /// U|a> = |perm[a]>.
  const std::vector<Index>& symmetry_permutation() const noexcept { return perm_; }

  Matrix site_operator(int i) const { return site_phases(i).asDiagonal(); }

  Matrix symmetry_unitary() const {
    Matrix u = Matrix::Zero(dim(), dim());
    for (Index a = 0; a < dim(); ++a) u(perm_[static_cast<std::size_t>(a)], a) = 1.0;
    return u;
  }

  /// O_i M O_i^H.
  Matrix conjugate(int i, const Matrix& m) const { return sandwich(site_phases(i), m); }
  /// O_i^H M O_i.
  Matrix conjugate_dagger(int i, const Matrix& m) const {
    return sandwich(site_phases(i).conjugate(), m);
  }

  /// Diagonal of the two-site string A = O_i^H O_j (or O_i O_j^H).
  Vector pair_phases(int i, int j, PairOrdering ord = PairOrdering::adjoint_i) const {
    const Vector& oi = site_phases(i);
    const Vector& oj = site_phases(j);
    return ord == PairOrdering::adjoint_i ? Vector(oi.conjugate().cwiseProduct(oj))
                                          : Vector(oi.cwiseProduct(oj.conjugate()));
  }

  /// A M A^H with A the two-site string.
  Matrix conjugate_pair(int i, int j, const Matrix& m,
                        PairOrdering ord = PairOrdering::adjoint_i) const {
    return sandwich(pair_phases(i, j, ord), m);
  }

  /// D M D^H for a diagonal unitary D = diag(d).
  static Matrix sandwich(const Vector& d, const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
      const Complex dc = std::conj(d[c]);
      for (Index r = 0; r < m.rows(); ++r) out(r, c) = d[r] * m(r, c) * dc;
    }
    return out;
  }

  /// U M.
  Matrix apply_symmetry(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c)
      for (Index a = 0; a < m.rows(); ++a) out(perm_[static_cast<std::size_t>(a)], c) = m(a, c);
    return out;
  }

  /// U M U^H.
  Matrix conjugate_symmetry(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (Index b = 0; b < m.cols(); ++b) {
      const Index pb = perm_[static_cast<std::size_t>(b)];
      for (Index a = 0; a < m.rows(); ++a) out(perm_[static_cast<std::size_t>(a)], pb) = m(a, b);
    }
    return out;
  }

  /// max|O_i^H O_i - I|.
  double unitarity_defect(int i) const {
    return (site_phases(i).cwiseAbs2().array() - 1.0).abs().maxCoeff();
  }

  /// max|O_i U - w U O_i|, zero for a charge-one operator.
  double charge_relation_defect(int i) const {
    const Matrix o = site_operator(i);
    const Matrix u = symmetry_unitary();
    return max_abs_entry(o * u - omega_ * u * o);
  }

 private:
  std::size_t check_site(int i) const {
    if (i < 0 || i >= sys_.n_sites) {
      throw InvalidArgument("site index " + std::to_string(i) + " outside [0, " +
                            std::to_string(sys_.n_sites) + ")");
    }
    return static_cast<std::size_t>(i);
  }

  SystemSpec sys_;
  std::shared_ptr<const ChargeBasis> basis_;
  std::vector<Vector> phases_;
  std::vector<Index> perm_;
  Complex omega_;
  int eta_ = 1;
};

enum class FixedPointKind { src, swssb, ghz };

inline FixedPointKind parse_fixed_point_kind(std::string_view s) {
  if (s == "src") return FixedPointKind::src;
  if (s == "swssb") return FixedPointKind::swssb;
  if (s == "ghz") return FixedPointKind::ghz;
  throw InvalidArgument("unsupported fixed-point kind '" + std::string(s) + "'");
}

inline std::string_view to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::src: return "src";
    case FixedPointKind::swssb: return "swssb";
    case FixedPointKind::ghz: return "ghz";
  }
  return "?";
}

struct ModelState {
  DensityMatrix rho;
  ChargeOperatorSet ops;
};

namespace detail {

// Exact charge-basis form of the fixed points. In that basis src is the single
// vector |f_0 ... f_0>, ghz is uniform over the charge-0 sector and swssb is the
// normalized identity on it.
inline BlockOperator fixed_point_blocks(const std::shared_ptr<const ChargeBasis>& basis, FixedPointKind kind) {
  BlockOperator b = BlockOperator::zero(basis);
  Matrix& z = b.block(0);
  const double size = static_cast<double>(z.rows());
  switch (kind) {
    case FixedPointKind::src: z(basis->position(0), basis->position(0)) = 1.0; break;
    case FixedPointKind::ghz: z.setConstant(Complex(1.0 / size, 0.0)); break;
    case FixedPointKind::swssb: z.diagonal().setConstant(Complex(1.0 / size, 0.0)); break;
  }
  return b;
}

}  // namespace detail

inline ModelState build_fixed_point(const SystemSpec& sys, FixedPointKind kind) {
  sys.validate();
  const Index dim = sys.hilbert_dim();
  const int n = sys.local_dim;
  ChargeOperatorSet ops(sys);
  Matrix rho;
  switch (kind) {
    case FixedPointKind::src: {
      // Product of uniform superpositions: every entry equals 1/dim.
      rho = Matrix::Constant(dim, dim, Complex(1.0 / static_cast<double>(dim), 0.0));
      break;
    }
    case FixedPointKind::ghz: {
      Vector psi = Vector::Zero(dim);
      for (int m = 0; m < n; ++m) {
        Index a = 0;
        for (int s = 0; s < sys.n_sites; ++s) a += m * site_stride(sys, s);
        psi[a] = 1.0 / std::sqrt(static_cast<double>(n));
      }
      rho = psi * psi.adjoint();
      break;
    }
    case FixedPointKind::swssb: {
      // (1/n) sum_k U^k projects onto charge 0; normalize by its rank n^{N-1}.
      rho = Matrix::Zero(dim, dim);
      const auto& perm = ops.symmetry_permutation();
      const double w = 1.0 / static_cast<double>(dim);  // (1/n) / n^{N-1}
      for (Index b = 0; b < dim; ++b) {
        Index a = b;
        for (int k = 0; k < n; ++k) {
          rho(a, b) += w;
          a = perm[static_cast<std::size_t>(a)];
        }
      }
      break;
    }
  }
  DensityMatrix dm = DensityMatrix::trusted(sys, std::move(rho));
  dm.set_block_form(std::make_shared<const BlockOperator>(detail::fixed_point_blocks(ops.charge_basis(), kind)));
  return {std::move(dm), std::move(ops)};
}

/// SRC fixed point dressed by the strong-symmetry-preserving bond channel
///   rho -> (1-q) rho + q/(n-1) sum_{m=1}^{n-1} B^m rho B^{-m},  B = O_j O_{j+1}^H,
/// applied on every nearest-neighbour bond. q = (n-1)/n is the full bond twirl,
/// which on an open chain lands exactly on the SW-SSB fixed point.
inline DensityMatrix build_bond_dephased(const SystemSpec& sys, double q) {
  sys.validate();
  const int n = sys.local_dim;
  const double q_max = static_cast<double>(n - 1) / static_cast<double>(n);
  if (!(q >= 0.0) || q > q_max + 1e-15) {
    throw InvalidArgument("build_bond_dephased: q = " + std::to_string(q) + " outside [0, " +
                          std::to_string(q_max) + "]");
  }
  ModelState base = build_fixed_point(sys, FixedPointKind::src);
  Matrix rho = base.rho.matrix();
  const ChargeOperatorSet& ops = base.ops;
  std::vector<std::pair<int, int>> bonds;
  for (int j = 0; j + 1 < sys.n_sites; ++j) bonds.emplace_back(j, j + 1);
  if (sys.boundary == Boundary::periodic && sys.n_sites > 2) bonds.emplace_back(sys.n_sites - 1, 0);

  BlockOperator blocks = *base.rho.block_form();
  const Index dim = rho.rows();
  for (auto [j, k] : bonds) {
    const Vector b = ops.site_phases(j).cwiseProduct(ops.site_phases(k).conjugate());
    for (Index c = 0; c < dim; ++c) {
      for (Index r = 0; r < dim; ++r) {
        const Complex phase = b[r] * std::conj(b[c]);
        Complex avg{0.0, 0.0};
        Complex pw = phase;
        for (int m = 1; m < n; ++m) {
          avg += pw;
          pw *= phase;
        }
        rho(r, c) *= (1.0 - q) + q / static_cast<double>(n - 1) * avg;
      }
    }
    BlockOperator next = blocks;
    next.scale(1.0 - q);
    for (int m = 1; m < n; ++m) {
      next.add_scaled(q / static_cast<double>(n - 1), conjugate_clock_string(blocks, {{j, m}, {k, -m}}));
    }
    blocks = std::move(next);
  }
  DensityMatrix dm = DensityMatrix::trusted(sys, std::move(rho));
  dm.set_block_form(std::make_shared<const BlockOperator>(std::move(blocks)));
  return dm;
}

/// Random state supported in one charge sector: a Wishart matrix of the given
/// rank placed in sector `charge` of the charge basis. Strongly symmetric.
inline DensityMatrix build_random_symmetric(const SystemSpec& sys, std::uint64_t seed, int charge = 0,
                                            Index rank = -1) {
  sys.validate();
  ChargeBasis basis(sys);
  const auto& idx = basis.sector(((charge % sys.local_dim) + sys.local_dim) % sys.local_dim);
  const Index b = static_cast<Index>(idx.size());
  if (rank <= 0 || rank > b) rank = b;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(b, rank);
  for (Index c = 0; c < rank; ++c)
    for (Index r = 0; r < b; ++r) x(r, c) = Complex(g(rng), g(rng));
  Matrix w = x * x.adjoint();
  w = 0.5 * (w + w.adjoint()).eval();
  w /= w.trace().real();
  BlockOperator blocks = BlockOperator::zero(std::make_shared<const ChargeBasis>(std::move(basis)));
  blocks.block(static_cast<int>(((charge % sys.local_dim) + sys.local_dim) % sys.local_dim)) = w;
  DensityMatrix dm = DensityMatrix::trusted(sys, blocks.to_dense());
  dm.set_block_form(std::make_shared<const BlockOperator>(std::move(blocks)));
  return dm;
}

struct SymmetryCheck {
  bool strong = false;
  std::optional<Complex> phase;
  bool weak = false;
  double strong_residual = 0.0;
  double weak_residual = 0.0;
};

inline constexpr double kSymmetryTol = 1e-9;

/// Strong: U rho = e^{i theta} rho, with theta read off the largest entry.
/// Weak: U rho U^H = rho.
inline SymmetryCheck check_strong_symmetry(const Matrix& rho, const Matrix& u) {
  if (rho.rows() != u.rows() || rho.cols() != u.cols() || rho.rows() != rho.cols()) {
    throw DimensionMismatch("check_strong_symmetry: state and symmetry dimensions differ");
  }
  SymmetryCheck out;
  const Matrix ur = u * rho;
  Index r0 = 0, c0 = 0;
  rho.cwiseAbs().maxCoeff(&r0, &c0);
  if (std::abs(rho(r0, c0)) > 0.0) {
    Complex ph = ur(r0, c0) / rho(r0, c0);
    if (std::abs(ph) > 0.0) ph /= std::abs(ph);
    out.strong_residual = max_abs_entry(ur - ph * rho);
    if (out.strong_residual < kSymmetryTol) {
      out.strong = true;
      out.phase = ph;
    }
  }
  out.weak_residual = max_abs_entry(ur * u.adjoint() - rho);
  out.weak = out.weak_residual < kSymmetryTol;
  return out;
}

inline SymmetryCheck check_strong_symmetry(const DensityMatrix& rho, const ChargeOperatorSet& ops) {
  if (rho.dim() != ops.dim()) {
    throw DimensionMismatch("check_strong_symmetry: state and symmetry dimensions differ");
  }
  // (U rho)(perm[a], b) = rho(a, b) and (U rho U^H)(perm[a], perm[b]) = rho(a, b).
  SymmetryCheck out;
  const Matrix& m = rho.matrix();
  const auto& perm = ops.symmetry_permutation();
  const Index d = m.rows();
  std::vector<Index> inv(perm.size());
  for (std::size_t a = 0; a < perm.size(); ++a) inv[static_cast<std::size_t>(perm[a])] = static_cast<Index>(a);
  Index r0 = 0, c0 = 0;
  m.cwiseAbs().maxCoeff(&r0, &c0);
  Complex ph{0.0, 0.0};
  const bool nonzero = std::abs(m(r0, c0)) > 0.0;
  if (nonzero) {
    ph = m(inv[static_cast<std::size_t>(r0)], c0) / m(r0, c0);
    if (std::abs(ph) > 0.0) ph /= std::abs(ph);
  }
  double strong = 0.0, weak = 0.0;
  for (Index b = 0; b < d; ++b) {
    const Index pb = perm[static_cast<std::size_t>(b)];
    for (Index a = 0; a < d; ++a) {
      const Index pa = perm[static_cast<std::size_t>(a)];
      strong = std::max(strong, std::abs(m(a, b) - ph * m(pa, b)));
      weak = std::max(weak, std::abs(m(a, b) - m(pa, pb)));
    }
  }
  out.strong_residual = strong;
  out.weak_residual = weak;
  if (nonzero && strong < kSymmetryTol) {
    out.strong = true;
    out.phase = ph;
  }
  out.weak = weak < kSymmetryTol;
  return out;
}

}  // namespace mixfid
