#pragma once
// Bures geometry of channel-perturbed, strongly symmetric states.

#include "mixfid/channels.hpp"
#include "mixfid/fidelity.hpp"
#include "mixfid/observables.hpp"

namespace mixfid {

namespace detail {

inline BlockOperator symmetric_blocks(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                      const char* where) {
  require_strong_symmetry(rho, ops, where);
  auto b = to_blocks(ops.charge_basis(), rho.matrix());
  if (!b) throw NotStronglySymmetric(std::string(where) + ": state couples charge sectors");
  return std::move(*b);
}

inline double bures_from_sqrt_fidelity(double s) { return std::clamp(2.0 - 2.0 * s, 0.0, 2.0); }

// sum_i w_i O_i rho O_i^H
inline BlockOperator charged_mixture(const BlockOperator& rho, const PerturbationVector& angles) {
  BlockOperator acc = BlockOperator::zero(rho.basis_ptr());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double w = angles[i] * angles[i];
    if (w == 0.0) continue;
    acc.add_scaled(w, conjugate_clock_string(rho, {{static_cast<int>(i), 1}}));
  }
  return acc;
}

}  // namespace detail

/// D_b^2(E_theta[rho], rho).
inline double perturbed_self_distance(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                      const PerturbationVector& theta) {
  const BlockOperator b = detail::symmetric_blocks(rho, ops, "perturbed_self_distance");
  const BlockOperator e = apply_parameterized(b, theta);
  return detail::bures_from_sqrt_fidelity(sqrt_fidelity(e, b));
}

/// Polarization form [D(E_theta rho, rho) + D(rho, E_phi rho) - D(E_theta rho, E_phi rho)] / 2.
inline double bures_inner_defining(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                   const PerturbationVector& theta, const PerturbationVector& phi) {
  if (theta.size() != phi.size()) throw DimensionMismatch("bures_inner_defining: vector lengths differ");
  const BlockOperator b = detail::symmetric_blocks(rho, ops, "bures_inner_defining");
  const BlockOperator et = apply_parameterized(b, theta);
  const BlockOperator ep = apply_parameterized(b, phi);
  const BlockFidelity ref_t(et);
  const double d_t = detail::bures_from_sqrt_fidelity(ref_t.sqrt_fidelity(b));
  const double d_p = detail::bures_from_sqrt_fidelity(sqrt_fidelity(b, ep));
  const double d_tp = detail::bures_from_sqrt_fidelity(ref_t.sqrt_fidelity(ep));
  return 0.5 * (d_t + d_p - d_tp);
}

/// sqrt F(sum_i theta_i^2 O_i rho O_i^H, sum_j phi_j^2 O_j rho O_j^H).
inline double bures_inner_second_order(const DensityMatrix& rho, const ChargeOperatorSet& ops,
                                       const PerturbationVector& theta, const PerturbationVector& phi) {
  if (theta.size() != phi.size() || theta.size() != static_cast<std::size_t>(ops.sites())) {
    throw DimensionMismatch("bures_inner_second_order: vector lengths do not match the site count");
  }
  const BlockOperator b = detail::symmetric_blocks(rho, ops, "bures_inner_second_order");
  return sqrt_fidelity(detail::charged_mixture(b, theta), detail::charged_mixture(b, phi));
}

/// g(theta^i, phi^j) + g(theta^i, phi^k) - g(theta^i, phi^j + phi^k) with
/// single-site vectors and the second-order inner product g.
inline double subadditivity_gap(const DensityMatrix& rho, const ChargeOperatorSet& ops, int i, int j, int k,
                                double theta_i, double phi_j, double phi_k) {
  if (j == k) throw InvalidArgument("subadditivity_gap: sites j and k must differ");
  const int n = ops.sites();
  for (int s : {i, j, k}) {
    if (s < 0 || s >= n) throw InvalidArgument("subadditivity_gap: site " + std::to_string(s) + " out of range");
  }
  if (!(theta_i > 0.0 && phi_j > 0.0 && phi_k > 0.0)) {
    throw InvalidArgument("subadditivity_gap: amplitudes must be positive");
  }
  const BlockOperator b = detail::symmetric_blocks(rho, ops, "subadditivity_gap");
  const auto ti = PerturbationVector::single(n, i, theta_i);
  const auto pj = PerturbationVector::single(n, j, phi_j);
  const auto pk = PerturbationVector::single(n, k, phi_k);
  const BlockFidelity ref(detail::charged_mixture(b, ti));
  const double g_j = ref.sqrt_fidelity(detail::charged_mixture(b, pj));
  const double g_k = ref.sqrt_fidelity(detail::charged_mixture(b, pk));
  const double g_jk = ref.sqrt_fidelity(detail::charged_mixture(b, pj + pk));
  return g_j + g_k - g_jk;
}

/// D_eff = N / chi_F.
inline double effective_dimension(double chi_F, int n_sites) {
  if (!(chi_F > 0.0)) throw InvalidArgument("effective_dimension: chi_F must be positive");
  if (n_sites < 1) throw InvalidArgument("effective_dimension: N must be positive");
  return static_cast<double>(n_sites) / chi_F;
}

}  // namespace mixfid
