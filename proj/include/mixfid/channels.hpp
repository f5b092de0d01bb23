#pragma once
// Charge-dephasing channels and random Kraus channels.

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mixfid/blocks.hpp"
#include "mixfid/states.hpp"

namespace mixfid {

/// Per-site rotation angles, each in [0, pi/2].
class PerturbationVector {
 public:
  PerturbationVector() = default;
  explicit PerturbationVector(std::vector<double> theta) : theta_(std::move(theta)) {
    for (std::size_t k = 0; k < theta_.size(); ++k) {
      if (!(theta_[k] >= 0.0) || theta_[k] > std::numbers::pi / 2 + 1e-15) {
        throw InvalidArgument("PerturbationVector: component " + std::to_string(k) + " = " +
                              std::to_string(theta_[k]) + " outside [0, pi/2]");
      }
    }
  }

  static PerturbationVector uniform(int n_sites, double t) {
    return PerturbationVector(std::vector<double>(static_cast<std::size_t>(n_sites), t));
  }
  /// Only site i is rotated.
  static PerturbationVector single(int n_sites, int i, double t) {
    std::vector<double> v(static_cast<std::size_t>(n_sites), 0.0);
    v.at(static_cast<std::size_t>(i)) = t;
    return PerturbationVector(std::move(v));
  }

  std::size_t size() const noexcept { return theta_.size(); }
  double operator[](std::size_t k) const { return theta_[k]; }
  const std::vector<double>& values() const noexcept { return theta_; }

  double norm_sq() const {
    double s = 0.0;
    for (double t : theta_) s += t * t;
    return s;
  }
  double max_abs() const {
    double m = 0.0;
    for (double t : theta_) m = std::max(m, std::abs(t));
    return m;
  }
  PerturbationVector scaled(double c) const {
    std::vector<double> v = theta_;
    for (double& t : v) t *= c;
    return PerturbationVector(std::move(v));
  }
  PerturbationVector operator+(const PerturbationVector& o) const {
    if (o.size() != size()) throw DimensionMismatch("PerturbationVector: length mismatch");
    std::vector<double> v = theta_;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.theta_[k];
    return PerturbationVector(std::move(v));
  }

 private:
  std::vector<double> theta_;
};

enum class ChannelMode { uniform, parameterized };

struct ChannelSpec {
  ChannelMode mode = ChannelMode::uniform;
  double p = 0.0;
  PerturbationVector theta;
  const ChargeOperatorSet* operator_set = nullptr;

  void validate() const {
    if (operator_set == nullptr) throw InvalidArgument("ChannelSpec: operator set missing");
    if (mode == ChannelMode::uniform && !(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("ChannelSpec: p = " + std::to_string(p) + " outside [0, 1]");
    }
    if (mode == ChannelMode::parameterized &&
        theta.size() != static_cast<std::size_t>(operator_set->sites())) {
      throw DimensionMismatch("ChannelSpec: theta has " + std::to_string(theta.size()) +
                              " components for " + std::to_string(operator_set->sites()) + " sites");
    }
  }
};

namespace detail {

inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("dephasing strength p = " + std::to_string(p) + " outside [0, 1]");
  }
}

inline void check_angles(const PerturbationVector& theta, int n_sites) {
  if (theta.size() != static_cast<std::size_t>(n_sites)) {
    throw DimensionMismatch("perturbation vector has " + std::to_string(theta.size()) +
                            " components for " + std::to_string(n_sites) + " sites");
  }
}

// rho <- (1-w) rho + w O_j rho O_j^H
inline void dephase_site(Matrix& rho, const Vector& phases, double w) {
  if (w == 0.0) return;
  const Index d = rho.rows();
  for (Index c = 0; c < d; ++c) {
    const Complex pc = std::conj(phases[c]);
    for (Index r = 0; r < d; ++r) {
      rho(r, c) *= (1.0 - w) + w * phases[r] * pc;
    }
  }
}

inline void dephase_site(BlockOperator& rho, int site, double w) {
  if (w == 0.0) return;
  BlockOperator moved = conjugate_clock_string(rho, {{site, 1}});
  rho.scale(1.0 - w);
  rho.add_scaled(w, moved);
}

}  // namespace detail

/// Block-form counterparts; the clock operators are implied by the basis.
inline BlockOperator apply_uniform(BlockOperator rho, double p) {
  detail::check_probability(p);
  for (int j = 0; j < rho.basis().system().n_sites; ++j) detail::dephase_site(rho, j, p);
  return rho;
}

inline BlockOperator apply_parameterized(BlockOperator rho, const PerturbationVector& theta) {
  const int n_sites = rho.basis().system().n_sites;
  detail::check_angles(theta, n_sites);
  for (int j = 0; j < n_sites; ++j) {
    const double s = std::sin(theta[static_cast<std::size_t>(j)]);
    detail::dephase_site(rho, j, s * s);
  }
  return rho;
}

/// E = E_{N-1} o ... o E_0 with E_j[rho] = (1-p) rho + p O_j rho O_j^H, in the
/// given site order (ascending by default).
inline DensityMatrix apply_uniform(const DensityMatrix& rho, const ChargeOperatorSet& ops, double p,
                                   const std::vector<int>& order = {}) {
  detail::check_probability(p);
  if (rho.dim() != ops.dim()) throw DimensionMismatch("apply_uniform: state and operators differ");
  Matrix m = rho.matrix();
  if (order.empty()) {
    for (int j = 0; j < ops.sites(); ++j) detail::dephase_site(m, ops.site_phases(j), p);
  } else {
    for (int j : order) detail::dephase_site(m, ops.site_phases(j), p);
  }
  DensityMatrix out = DensityMatrix::trusted(rho.system(), std::move(m));
  if (rho.block_form()) {
    BlockOperator b = *rho.block_form();
    if (order.empty()) {
      for (int j = 0; j < ops.sites(); ++j) detail::dephase_site(b, j, p);
    } else {
      for (int j : order) detail::dephase_site(b, j, p);
    }
    out.set_block_form(std::make_shared<const BlockOperator>(std::move(b)));
  }
  return out;
}

/// E_j[rho] = cos^2(theta_j) rho + sin^2(theta_j) O_j rho O_j^H on every site.
inline DensityMatrix apply_parameterized(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                         const PerturbationVector& theta) {
  detail::check_angles(theta, ops.sites());
  if (rho.dim() != ops.dim()) throw DimensionMismatch("apply_parameterized: state and operators differ");
  Matrix m = rho.matrix();
  for (int j = 0; j < ops.sites(); ++j) {
    const double s = std::sin(theta[static_cast<std::size_t>(j)]);
    detail::dephase_site(m, ops.site_phases(j), s * s);
  }
  DensityMatrix out = DensityMatrix::trusted(rho.system(), std::move(m));
  if (rho.block_form()) {
    out.set_block_form(std::make_shared<const BlockOperator>(apply_parameterized(*rho.block_form(), theta)));
  }
  return out;
}

inline DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& spec) {
  spec.validate();
  return spec.mode == ChannelMode::uniform ? apply_uniform(rho, *spec.operator_set, spec.p)
                                           : apply_parameterized(rho, *spec.operator_set, spec.theta);
}

struct KrausChannel {
  std::vector<Matrix> kraus;

  Index dim() const { return kraus.empty() ? 0 : kraus.front().cols(); }

  Matrix apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  }

  /// max|sum_k K^H K - I|.
  double completeness_defect() const {
    Matrix s = Matrix::Zero(dim(), dim());
    for (const auto& k : kraus) s += k.adjoint() * k;
    return max_abs_entry(s - Matrix::Identity(dim(), dim()));
  }
};

/// Random CPTP map: a Gaussian (dim*n_kraus) x dim matrix orthonormalized by QR,
/// cut into n_kraus square blocks. n_kraus = 1 gives a Haar unitary.
inline KrausChannel random_channel(Index dim, int n_kraus, std::uint64_t seed) {
  if (n_kraus < 1) throw InvalidArgument("random_channel: n_kraus must be >= 1");
  if (dim < 1) throw InvalidArgument("random_channel: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const Index rows = dim * n_kraus;
  Matrix a(rows, dim);
  for (Index c = 0; c < dim; ++c)
    for (Index r = 0; r < rows; ++r) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, dim);
  const Matrix& r = qr.matrixQR();
  for (Index c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  KrausChannel ch;
  for (int k = 0; k < n_kraus; ++k) ch.kraus.push_back(q.middleRows(k * dim, dim));
  return ch;
}

}  // namespace mixfid
