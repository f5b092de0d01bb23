#pragma once
// Plain-text state container.
//
//   mixfid-state 1
//   dim D
//   local_dim n
//   sites N
//   <D lines, each with D pairs "re im" in row-major order>
//
// Numbers are written with 17 significant digits, so a round trip is exact.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "mixfid/states.hpp"

namespace mixfid {

inline void write_state(std::ostream& os, const DensityMatrix& rho) {
  const SystemSpec& sys = rho.system();
  const Matrix& m = rho.matrix();
  os << "mixfid-state 1\n"
     << "dim " << m.rows() << "\n"
     << "local_dim " << sys.local_dim << "\n"
     << "sites " << sys.n_sites << "\n";
  os << std::setprecision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << m(r, c).real() << ' ' << m(r, c).imag();
    }
    os << '\n';
  }
  if (!os) throw IoError("write_state: stream error");
}

inline void write_state(const std::string& path, const DensityMatrix& rho) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_state(f, rho);
}

namespace detail {

inline long read_header_field(std::istream& is, const char* key) {
  std::string k;
  long v = 0;
  if (!(is >> k >> v) || k != key) {
    throw IoError(std::string("state file: expected header field '") + key + "'");
  }
  return v;
}

}  // namespace detail

/// Reads a state and runs the full DensityMatrix validation. Boundary and
/// spatial dimension are not stored; they come from `base`.
inline DensityMatrix read_state(std::istream& is, SystemSpec base = {}) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "mixfid-state" || version != 1) {
    throw IoError("state file: missing 'mixfid-state 1' header");
  }
  const long dim = detail::read_header_field(is, "dim");
  base.local_dim = static_cast<int>(detail::read_header_field(is, "local_dim"));
  base.n_sites = static_cast<int>(detail::read_header_field(is, "sites"));
  base.dimension_cap = std::max<Index>(base.dimension_cap, dim);
  if (dim < 1 || base.hilbert_dim() != dim) {
    throw IoError("state file: dim " + std::to_string(dim) + " is not local_dim^sites");
  }
  Matrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im)) {
        throw IoError("state file: truncated at entry (" + std::to_string(r) + ", " +
                      std::to_string(c) + ")");
      }
      m(r, c) = Complex(re, im);
    }
  }
  return DensityMatrix::checked(base, std::move(m));
}

inline DensityMatrix read_state(const std::string& path, SystemSpec base = {}) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return read_state(f, base);
}

}  // namespace mixfid
