#pragma once
// Lattice description and the Z_n charge basis.
//
// The global symmetry is U = shift^{(x)N}. Its eigenbasis is the product of
// per-site Fourier vectors f_k = n^{-1/2} sum_m w^{-km}|m>, with X f_k = w^k f_k,
// so a product Fourier state |k_1..k_N> carries charge (k_1+...+k_N) mod n.
// Weakly symmetric operators are block diagonal in that basis.

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mixfid/matcore.hpp"

namespace mixfid {

enum class Boundary { open, periodic };

inline constexpr Index kDefaultDimensionCap = 4096;

struct SystemSpec {
  int n_sites = 1;            // N
  int local_dim = 2;          // n, Z_n symmetry
  int spatial_dim = 1;        // d, enters scaling formulas only
  double lattice_constant = 1.0;
  Boundary boundary = Boundary::open;
  Index dimension_cap = kDefaultDimensionCap;

  /// n^N, or -1 on overflow.
  Index hilbert_dim() const {
    Index d = 1;
    for (int s = 0; s < n_sites; ++s) {
      if (d > (Index{1} << 40) / local_dim) return -1;
      d *= local_dim;
    }
    return d;
  }

  void validate() const {
    if (n_sites < 1) throw InvalidArgument("SystemSpec: n_sites must be >= 1");
    if (local_dim < 2) throw InvalidArgument("SystemSpec: local_dim must be >= 2");
    if (spatial_dim < 1) throw InvalidArgument("SystemSpec: spatial_dim must be >= 1");
    if (!(lattice_constant > 0.0)) throw InvalidArgument("SystemSpec: lattice_constant must be > 0");
    const Index d = hilbert_dim();
    if (d < 0 || d > dimension_cap) {
      throw InvalidArgument("SystemSpec: Hilbert dimension " + std::to_string(local_dim) + "^" +
                            std::to_string(n_sites) + " exceeds the cap " +
                            std::to_string(dimension_cap));
    }
  }

  /// Site used by translation-invariant shortcuts.
  int center_site() const { return n_sites / 2; }

  bool operator==(const SystemSpec&) const = default;
};

inline SystemSpec make_chain(int n_sites, int local_dim) {
  SystemSpec s;
  s.n_sites = n_sites;
  s.local_dim = local_dim;
  return s;
}

/// Stride of site `s` in the row-major basis index (site 0 is most significant).
inline Index site_stride(const SystemSpec& sys, int site) {
  Index st = 1;
  for (int s = site + 1; s < sys.n_sites; ++s) st *= sys.local_dim;
  return st;
}

inline int digit(const SystemSpec& sys, Index basis_index, int site) {
  return static_cast<int>((basis_index / site_stride(sys, site)) % sys.local_dim);
}

inline Complex root_of_unity(int n, int power = 1) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(power) / static_cast<double>(n);
  return {std::cos(a), std::sin(a)};
}

/// Per-site Fourier transform W = F^{(x)N} with F_{m,k} = w^{-km}/sqrt(n), and the
/// charge label of every product Fourier state.
class ChargeBasis {
 public:
  explicit ChargeBasis(const SystemSpec& sys) : sys_(sys) {
    const int n = sys.local_dim;
    fourier_.resize(n, n);
    for (int m = 0; m < n; ++m) {
      for (int k = 0; k < n; ++k) {
        fourier_(m, k) = root_of_unity(n, -((k * m) % n)) / std::sqrt(static_cast<double>(n));
      }
    }
    const Index dim = sys.hilbert_dim();
    sectors_.assign(static_cast<std::size_t>(n), {});
    label_.resize(static_cast<std::size_t>(dim));
    position_.resize(static_cast<std::size_t>(dim));
    for (Index a = 0; a < dim; ++a) {
      int q = 0;
      for (int s = 0; s < sys.n_sites; ++s) q += digit(sys, a, s);
      q %= n;
      label_[static_cast<std::size_t>(a)] = q;
      position_[static_cast<std::size_t>(a)] = static_cast<Index>(sectors_[static_cast<std::size_t>(q)].size());
      sectors_[static_cast<std::size_t>(q)].push_back(a);
    }
  }

  const SystemSpec& system() const noexcept { return sys_; }
  int sector_count() const noexcept { return sys_.local_dim; }
  const std::vector<Index>& sector(int q) const { return sectors_.at(static_cast<std::size_t>(q)); }
  int charge(Index a) const { return label_[static_cast<std::size_t>(a)]; }
  /// Position of charge-basis index `a` inside its sector.
  Index position(Index a) const { return position_[static_cast<std::size_t>(a)]; }
  Index dim() const noexcept { return static_cast<Index>(label_.size()); }

  /// Index reached from `a` by adding `delta` to the Fourier label of `site`.
  Index shift_label(Index a, int site, int delta) const {
    const int n = sys_.local_dim;
    const Index st = site_stride(sys_, site);
    const int k = static_cast<int>((a / st) % n);
    const int k2 = ((k + delta) % n + n) % n;
    return a + static_cast<Index>(k2 - k) * st;
  }

  /// W^H M W, applied site by site.
  Matrix to_charge_basis(Matrix m) const {
    transform_in_place(m, /*inverse=*/false);
    return m;
  }

  /// W M W^H.
  Matrix from_charge_basis(Matrix m) const {
    transform_in_place(m, /*inverse=*/true);
    return m;
  }

  /// W^H v.
  Vector vector_to_charge_basis(Vector v) const {
    const int n = sys_.local_dim;
    const Matrix fh = fourier_.adjoint();
    std::vector<Complex> buf(static_cast<std::size_t>(n));
    for (int s = 0; s < sys_.n_sites; ++s) {
      const Index st = site_stride(sys_, s);
      for (Index base = 0; base < v.size(); ++base) {
        if ((base / st) % n != 0) continue;
        apply_leg(fh, v.data() + base, st, buf);
      }
    }
    return v;
  }

  Matrix block(const Matrix& charge_basis_matrix, int q) const {
    const auto& idx = sector(q);
    const Index b = static_cast<Index>(idx.size());
    Matrix out(b, b);
    for (Index c = 0; c < b; ++c) {
      for (Index r = 0; r < b; ++r) {
        out(r, c) = charge_basis_matrix(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      }
    }
    return out;
  }

  /// Largest entry coupling different charge sectors.
  double off_block_max(const Matrix& charge_basis_matrix) const {
    double worst = 0.0;
    const Index dim = charge_basis_matrix.rows();
    for (Index c = 0; c < dim; ++c) {
      const int qc = charge(c);
      for (Index r = 0; r < dim; ++r) {
        if (charge(r) != qc) worst = std::max(worst, std::abs(charge_basis_matrix(r, c)));
      }
    }
    return worst;
  }

 private:
  // Applies the n x n matrix `f` to the leg starting at `p` with stride `st`.
  static void apply_leg(const Matrix& f, Complex* p, Index st, std::vector<Complex>& buf) {
    const Index n = f.rows();
    for (Index k = 0; k < n; ++k) {
      Complex acc{0.0, 0.0};
      for (Index m = 0; m < n; ++m) acc += f(k, m) * p[m * st];
      buf[static_cast<std::size_t>(k)] = acc;
    }
    for (Index k = 0; k < n; ++k) p[k * st] = buf[static_cast<std::size_t>(k)];
  }

  void transform_in_place(Matrix& m, bool inverse) const {
    const int n = sys_.local_dim;
    const Index dim = m.rows();
    // Row legs get F^H (forward) or F (inverse); column legs the transpose.
    const Matrix row_op = inverse ? Matrix(fourier_) : Matrix(fourier_.adjoint());
    const Matrix col_op = inverse ? Matrix(fourier_.conjugate()) : Matrix(fourier_.transpose());
    // Rows, one panel of columns at a time so the working set stays small.
    constexpr Index kPanel = 32;
    Matrix tmp;
    for (Index c0 = 0; c0 < dim; c0 += kPanel) {
      auto panel = m.middleCols(c0, std::min(kPanel, dim - c0));
      for (int s = 0; s < sys_.n_sites; ++s) {
        const Index st = site_stride(sys_, s);
        const Index span = st * n;
        for (Index hi = 0; hi < dim; hi += span) {
          tmp = panel.middleRows(hi, span);
          for (int k = 0; k < n; ++k) {
            auto dst = panel.middleRows(hi + k * st, st);
            dst = row_op(k, 0) * tmp.topRows(st);
            for (int l = 1; l < n; ++l) dst += row_op(k, l) * tmp.middleRows(l * st, st);
          }
        }
      }
    }
    // Columns: (M W)_{r,k} = sum_m M_{r,m} F_{m,k}, i.e. F^T acting on whole columns.
    Matrix cols(dim, n);
    for (int s = 0; s < sys_.n_sites; ++s) {
      const Index st = site_stride(sys_, s);
      const Index span = st * n;
      for (Index hi = 0; hi < dim; hi += span) {
        for (Index lo = 0; lo < st; ++lo) {
          const Index base = hi + lo;
          for (int l = 0; l < n; ++l) cols.col(l) = m.col(base + l * st);
          for (int k = 0; k < n; ++k) m.col(base + k * st) = cols * col_op.row(k).transpose();
        }
      }
    }
  }

  SystemSpec sys_;
  Matrix fourier_;
  std::vector<std::vector<Index>> sectors_;
  std::vector<int> label_;
  std::vector<Index> position_;
};

}  // namespace mixfid
