#pragma once
// Weakly symmetric operators as charge-sector blocks.
//
// In the charge basis the clock Z maps the Fourier vector f_k to f_{k-1}, so
// every clock string is an index permutation and conjugating by one moves
// blocks between sectors without arithmetic. Channels, twisted mixtures and
// fidelities of weakly symmetric states are evaluated here, sector by sector,
// so a sector carrying weight p^2 keeps its own relative precision.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mixfid/system.hpp"

namespace mixfid {

/// (site, exponent) factors of a clock string prod_s Z_s^{e_s}.
using ClockString = std::vector<std::pair<int, int>>;

class BlockOperator {
 public:
  BlockOperator(std::shared_ptr<const ChargeBasis> basis, std::vector<Matrix> blocks)
      : basis_(std::move(basis)), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != basis_->sector_count()) {
      throw DimensionMismatch("BlockOperator: expected one block per charge sector");
    }
    for (int q = 0; q < sector_count(); ++q) {
      const Index b = static_cast<Index>(basis_->sector(q).size());
      if (blocks_[static_cast<std::size_t>(q)].rows() != b ||
          blocks_[static_cast<std::size_t>(q)].cols() != b) {
        throw DimensionMismatch("BlockOperator: block " + std::to_string(q) + " has the wrong size");
      }
    }
  }

  static BlockOperator zero(std::shared_ptr<const ChargeBasis> basis) {
    std::vector<Matrix> blocks;
    for (int q = 0; q < basis->sector_count(); ++q) {
      const Index b = static_cast<Index>(basis->sector(q).size());
      blocks.push_back(Matrix::Zero(b, b));
    }
    return BlockOperator(std::move(basis), std::move(blocks));
  }

  const ChargeBasis& basis() const noexcept { return *basis_; }
  const std::shared_ptr<const ChargeBasis>& basis_ptr() const noexcept { return basis_; }
  int sector_count() const noexcept { return static_cast<int>(blocks_.size()); }
  Index dim() const noexcept { return basis_->dim(); }
  const Matrix& block(int q) const { return blocks_.at(static_cast<std::size_t>(q)); }
  Matrix& block(int q) { return blocks_.at(static_cast<std::size_t>(q)); }

  double trace() const {
    double t = 0.0;
    for (const auto& b : blocks_) t += b.trace().real();
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, max_abs_entry(b));
    return m;
  }

  /// this += w * other.
  void add_scaled(double w, const BlockOperator& other) {
    for (int q = 0; q < sector_count(); ++q) block(q) += w * other.block(q);
  }

  void scale(double w) {
    for (auto& b : blocks_) b *= w;
  }

  /// Dense matrix in the charge basis.
  Matrix charge_basis_matrix() const {
    Matrix out = Matrix::Zero(dim(), dim());
    for (int q = 0; q < sector_count(); ++q) {
      const auto& idx = basis_->sector(q);
      const Matrix& b = block(q);
      for (Index c = 0; c < b.cols(); ++c)
        for (Index r = 0; r < b.rows(); ++r)
          out(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]) = b(r, c);
    }
    return out;
  }

  /// Dense matrix in the computational basis.
  Matrix to_dense() const { return basis_->from_charge_basis(charge_basis_matrix()); }

 private:
  std::shared_ptr<const ChargeBasis> basis_;
  std::vector<Matrix> blocks_;
};

/// Relative size of entries treated as transform round-off when splitting a
/// dense matrix into blocks.
inline double block_noise_floor(const SystemSpec& sys) {
  return 64.0 * static_cast<double>(sys.n_sites) * std::numeric_limits<double>::epsilon();
}

/// Block form of a weakly symmetric matrix given in the computational basis.
/// Empty when the inter-sector coupling exceeds `rel_tol` times the largest
/// entry. Sectors whose entries are all at round-off level are set to zero.
inline std::optional<BlockOperator> to_blocks(const std::shared_ptr<const ChargeBasis>& basis,
                                              const Matrix& m, double rel_tol = 1e-10) {
  if (m.rows() != basis->dim() || m.cols() != basis->dim()) {
    throw DimensionMismatch("to_blocks: matrix dimension " + std::to_string(m.rows()) +
                            " does not match the charge basis " + std::to_string(basis->dim()));
  }
  Matrix cb = basis->to_charge_basis(m);
  const double scale = max_abs_entry(cb);
  if (basis->off_block_max(cb) > rel_tol * std::max(scale, 1e-300)) return std::nullopt;
  const double floor = block_noise_floor(basis->system()) * scale;
  std::vector<Matrix> blocks;
  for (int q = 0; q < basis->sector_count(); ++q) {
    Matrix b = basis->block(cb, q);
    if (max_abs_entry(b) <= floor) b.setZero();
    blocks.push_back(std::move(b));
  }
  return BlockOperator(basis, std::move(blocks));
}

/// S B S^H for the clock string S = prod_s Z_s^{e_s}.
inline BlockOperator conjugate_clock_string(const BlockOperator& b, const ClockString& s) {
  const ChargeBasis& basis = b.basis();
  const int n = basis.sector_count();
  int total = 0;
  for (auto [site, e] : s) total += e;
  std::vector<Matrix> out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const auto& idx = basis.sector(q);
    const Index size = static_cast<Index>(idx.size());
    // Z^e sends f_k to f_{k-e}.
    const int q2 = (((q - total) % n) + n) % n;
    std::vector<Index> map(static_cast<std::size_t>(size));
    for (Index r = 0; r < size; ++r) {
      Index a = idx[static_cast<std::size_t>(r)];
      for (auto [site, e] : s) a = basis.shift_label(a, site, -e);
      map[static_cast<std::size_t>(r)] = basis.position(a);
    }
    const Matrix& src = b.block(q);
    Matrix dst(size, size);
    for (Index c = 0; c < size; ++c) {
      const Index c2 = map[static_cast<std::size_t>(c)];
      for (Index r = 0; r < size; ++r) dst(map[static_cast<std::size_t>(r)], c2) = src(r, c);
    }
    out[static_cast<std::size_t>(q2)] = std::move(dst);
  }
  return BlockOperator(b.basis_ptr(), std::move(out));
}

}  // namespace mixfid
