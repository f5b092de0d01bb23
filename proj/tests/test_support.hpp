#pragma once
// Random matrices for property tests.

#include <random>

#include "mixfid/mixfid.hpp"

namespace mixfid::testing {

using Rng = std::mt19937_64;

inline Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(Index dim, Rng& rng) {
  const Matrix g = gaussian(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

/// Wishart X X^H with X of shape dim x rank, unnormalized.
inline Matrix random_psd(Index dim, Rng& rng, Index rank = -1) {
  if (rank <= 0) rank = dim;
  const Matrix x = gaussian(dim, rank, rng);
  Matrix w = x * x.adjoint();
  return 0.5 * (w + w.adjoint());
}

/// Unit-trace Wishart state; rank defaults to full.
inline Matrix random_state(Index dim, Rng& rng, Index rank = -1) {
  Matrix w = random_psd(dim, rng, rank);
  return w / w.trace().real();
}

inline Vector random_unit_vector(Index dim, Rng& rng) {
  Vector v = gaussian(dim, 1, rng).col(0);
  return v / v.norm();
}

inline Matrix pure(const Vector& v) { return v * v.adjoint(); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Probability vector of length k.
inline std::vector<double> random_weights(int k, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<std::size_t>(k));
  double s = 0.0;
  for (double& x : w) s += (x = e(rng));
  for (double& x : w) x /= s;
  return w;
}

inline Matrix diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

}  // namespace mixfid::testing
