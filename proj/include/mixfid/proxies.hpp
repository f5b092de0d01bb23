#pragma once
// Polynomial lower bounds on fidelity built from the product spectrum of rho*sigma.
//
// With t = sum_i e_i sqrt(lambda_i) for independent random signs e_i, E[t^2] = F_1
// and the all-plus value of t is sqrt F. Define
//   P_1(t) = t^2 - F_1,   P_n(t) = P_{n-1}(t)^2 - m_n,   m_n = E[P_{n-1}(t)^2].
// Each m_n is a symmetric polynomial in the lambda_i with non-negative value, and
//   F = F_1 + sqrt(m_2 + sqrt(m_3 + sqrt(m_4 + ...)))
// so cutting the nested radical after m_depth gives an increasing sequence of
// lower bounds L_1 <= L_2 <= ... <= F. m_2 = 2[(sum lambda)^2 - sum lambda^2], so
// L_2 is the two-term bound tr(rho sigma) + sqrt(2) sqrt(tr(rho sigma)^2 - tr((rho sigma)^2)).
// The reported F_n are m_n / 2^{n(n-1)/2}.
//
// Expectations over the 2^r sign patterns are taken on a discrete measure for t
// that is built one eigenvalue at a time and compressed to a Gauss rule (Lanczos
// on the support) whenever it outgrows the degree the chain needs.

#include <cmath>
#include <limits>
#include <vector>

#include "mixfid/observables.hpp"

namespace mixfid {

inline constexpr int kMaxProxyDepth = 8;
inline constexpr int kDefaultProxyDepth = 4;

struct ProxyChain {
  RealVector lambdas;        // descending
  std::vector<double> F;     // F[0] = F_1, ...
  std::vector<double> L;     // L[0] = L_1, ...
  int depth = 0;
  double exact_F = 0.0;

  double F_n(int n) const { return F.at(static_cast<std::size_t>(n - 1)); }
  double L_n(int n) const { return L.at(static_cast<std::size_t>(n - 1)); }
};

/// Discrete probability measure on the real line.
struct DiscreteMeasure {
  std::vector<double> nodes;
  std::vector<double> weights;

  double expect(const std::vector<double>& values) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * values[k];
    return acc;
  }
};

namespace detail {

/// m-node Gauss rule reproducing the moments of `mu` up to degree 2m - 1.
inline DiscreteMeasure gauss_compress(const DiscreteMeasure& mu, int m) {
  const Index k = static_cast<Index>(mu.nodes.size());
  if (k <= m) return mu;
  RealVector x(k), start(k);
  double total = 0.0;
  for (Index a = 0; a < k; ++a) {
    x[a] = mu.nodes[static_cast<std::size_t>(a)];
    total += mu.weights[static_cast<std::size_t>(a)];
    start[a] = std::sqrt(mu.weights[static_cast<std::size_t>(a)]);
  }
  start /= start.norm();
  // Lanczos with full reorthogonalization on diag(x).
  Eigen::MatrixXd q(k, m);
  RealVector alpha(m), beta(std::max(m - 1, 1));
  q.col(0) = start;
  int steps = m;
  for (int j = 0; j < m; ++j) {
    RealVector w = x.cwiseProduct(q.col(j));
    alpha[j] = q.col(j).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (int l = 0; l <= j; ++l) w -= q.col(l).dot(w) * q.col(l);
    }
    if (j + 1 == m) break;
    const double b = w.norm();
    if (b <= 1e-14 * (std::abs(alpha[j]) + 1e-300)) {
      steps = j + 1;  // invariant subspace: the measure has only j+1 points in effect
      break;
    }
    beta[j] = b;
    q.col(j + 1) = w / b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  RealVector diag = alpha.head(steps);
  RealVector sub = steps > 1 ? RealVector(beta.head(steps - 1)) : RealVector(0);
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  DiscreteMeasure out;
  for (int a = 0; a < steps; ++a) {
    const double v = es.eigenvectors()(0, a);
    out.nodes.push_back(es.eigenvalues()[a]);
    out.weights.push_back(total * v * v);
  }
  return out;
}

}  // namespace detail

/// Law of t = sum_i e_i sqrt(lambda_i), exact for polynomials of degree <= 2m - 1.
inline DiscreteMeasure rademacher_sum_measure(const RealVector& lambdas, int m) {
  DiscreteMeasure mu{{0.0}, {1.0}};
  for (Index i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) continue;
    const double a = std::sqrt(lambdas[i]);
    DiscreteMeasure next;
    next.nodes.reserve(2 * mu.nodes.size());
    next.weights.reserve(2 * mu.nodes.size());
    for (std::size_t k = 0; k < mu.nodes.size(); ++k) {
      next.nodes.push_back(mu.nodes[k] + a);
      next.weights.push_back(0.5 * mu.weights[k]);
      next.nodes.push_back(mu.nodes[k] - a);
      next.weights.push_back(0.5 * mu.weights[k]);
    }
    mu = next.nodes.size() > static_cast<std::size_t>(2 * m) ? detail::gauss_compress(next, m)
                                                              : std::move(next);
  }
  return mu;
}

inline ProxyChain proxy_chain_from_spectrum(const RealVector& lambdas, int depth = kDefaultProxyDepth) {
  if (depth < 1 || depth > kMaxProxyDepth) {
    throw InvalidArgument("proxy_chain: depth " + std::to_string(depth) + " outside [1, " +
                          std::to_string(kMaxProxyDepth) + "]");
  }
  ProxyChain pc;
  pc.lambdas = lambdas;
  pc.depth = depth;
  RealVector lam = lambdas.cwiseMax(0.0);
  const double f1 = lam.sum();
  const double p2 = lam.squaredNorm();
  pc.exact_F = std::pow(sum_sqrt(lam), 2);

  std::vector<double> m(static_cast<std::size_t>(depth + 1), 0.0);  // m[n], n >= 2
  if (depth >= 2) m[2] = std::max(2.0 * (f1 * f1 - p2), 0.0);
  if (depth >= 3) {
    const int nodes = (1 << (depth - 1)) + 1;
    const DiscreteMeasure mu = rademacher_sum_measure(lam, nodes);
    std::vector<double> p(mu.nodes.size()), sq(mu.nodes.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = mu.nodes[k] * mu.nodes[k] - f1;
    for (int n = 3; n <= depth; ++n) {
      const double prev = m[static_cast<std::size_t>(n - 1)];
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = p[k] * p[k] - prev;
      for (std::size_t k = 0; k < p.size(); ++k) sq[k] = p[k] * p[k];
      m[static_cast<std::size_t>(n)] = std::max(mu.expect(sq), 0.0);
    }
  }

  pc.F.push_back(f1);
  for (int n = 2; n <= depth; ++n) {
    const double c = std::ldexp(1.0, n * (n - 1) / 2);
    const double fn = m[static_cast<std::size_t>(n)] / c;
    if (!std::isfinite(fn)) {
      throw InvariantViolation("proxy_chain: F_" + std::to_string(n) + " overflowed");
    }
    pc.F.push_back(fn);
  }
  for (int d = 1; d <= depth; ++d) {
    double tail = 0.0;
    for (int n = d; n >= 2; --n) tail = std::sqrt(m[static_cast<std::size_t>(n)] + tail);
    pc.L.push_back(f1 + tail);
  }
  return pc;
}

inline ProxyChain proxy_chain(const Matrix& rho, const Matrix& sigma, int depth = kDefaultProxyDepth) {
  return proxy_chain_from_spectrum(product_spectrum(rho, sigma), depth);
}

inline ProxyChain proxy_chain(const DensityMatrix& rho, const DensityMatrix& sigma,
                              int depth = kDefaultProxyDepth) {
  return proxy_chain(rho.matrix(), sigma.matrix(), depth);
}

/// tr(rho sigma) + sqrt(2) sqrt(tr(rho sigma)^2 - tr((rho sigma)^2)).
inline double miszczak_bound(const RealVector& lambdas) {
  const RealVector lam = lambdas.cwiseMax(0.0);
  const double f1 = lam.sum();
  const double f2 = f1 * f1 - lam.squaredNorm();
  return f1 + std::sqrt(2.0 * std::max(f2, 0.0));
}

inline double miszczak_bound(const Matrix& rho, const Matrix& sigma) {
  return miszczak_bound(product_spectrum(rho, sigma));
}

inline double miszczak_bound(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return miszczak_bound(rho.matrix(), sigma.matrix());
}

/// tr[((1/N) sum_j rho A_j rho A_j^H)^n] from the spectrum of rho * sigma_i.
inline double renyi_2n_aggregate(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i, int n,
                                 PairOrdering ord = PairOrdering::adjoint_i) {
  if (n < 1) throw InvalidArgument("renyi_2n_aggregate: n must be >= 1");
  StateAnalysis a(rho, ops, ord);
  a.check_site(i, "renyi_2n_aggregate");
  return trace_power(a.twisted_product_spectrum(i), n);
}

/// Same quantity through explicit matrix powers.
inline double renyi_2n_aggregate_direct(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i,
                                        int n, PairOrdering ord = PairOrdering::adjoint_i) {
  if (n < 1) throw InvalidArgument("renyi_2n_aggregate: n must be >= 1");
  const Matrix x = rho.matrix() * twisted_mixture(rho, ops, i, ord).matrix();
  Matrix acc = x;
  for (int k = 1; k < n; ++k) acc = (acc * x).eval();
  return acc.trace().real();
}

/// N * L_depth(rho, twisted mixture at the center site); a lower bound on chi_F / eta.
inline double susceptibility_proxy(const StateAnalysis& a, int depth = kDefaultProxyDepth) {
  detail::require_strong_symmetry(a.rho(), a.ops(), "susceptibility_proxy");
  const int c = a.rho().system().center_site();
  const ProxyChain pc = proxy_chain_from_spectrum(a.twisted_product_spectrum(c), depth);
  return a.sites() * pc.L.back();
}

inline double susceptibility_proxy(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                   int depth = kDefaultProxyDepth) {
  return susceptibility_proxy(StateAnalysis(rho, ops), depth);
}

}  // namespace mixfid
