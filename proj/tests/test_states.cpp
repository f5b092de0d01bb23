#include <gtest/gtest.h>

#include <sstream>

#include "mixfid/state_io.hpp"
#include "test_support.hpp"

using namespace mixfid;
using namespace mixfid::testing;

namespace {

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  return x;
}

}  // namespace

TEST(SystemSpec, DimensionCap) {
  EXPECT_EQ(make_chain(10, 2).hilbert_dim(), 1024);
  EXPECT_THROW(make_chain(13, 2).validate(), InvalidArgument);
  SystemSpec s = make_chain(13, 2);
  s.dimension_cap = 1 << 13;
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW(make_chain(0, 2).validate(), InvalidArgument);
  EXPECT_THROW(make_chain(3, 1).validate(), InvalidArgument);
}

TEST(ChargeOperatorSet, UnitaryChargedAndEta) {
  for (int n : {2, 3, 4}) {
    const ChargeOperatorSet ops(make_chain(3, n));
    EXPECT_EQ(ops.eta(), n == 2 ? 4 : 1);
    const Matrix u = ops.symmetry_unitary();
    EXPECT_LT(max_abs_entry(u.adjoint() * u - Matrix::Identity(ops.dim(), ops.dim())), 1e-14);
    for (int i = 0; i < 3; ++i) {
      EXPECT_LT(ops.unitarity_defect(i), 1e-14);
      EXPECT_LT(ops.charge_relation_defect(i), 1e-12) << "n=" << n << " i=" << i;
      // also the conjugate relation O U = w^-1 U O fails unless w is real
      const Matrix o = ops.site_operator(i);
      const double alt = max_abs_entry(o * u - std::conj(ops.omega()) * u * o);
      if (n > 2) EXPECT_GT(alt, 0.1);
    }
  }
}

TEST(ChargeOperatorSet, SiteOutOfRange) {
  const ChargeOperatorSet ops(make_chain(2, 2));
  EXPECT_THROW(ops.site_phases(2), InvalidArgument);
  EXPECT_THROW(ops.site_phases(-1), InvalidArgument);
}

TEST(ChargeOperatorSet, PermutationMatchesDenseSymmetry) {
  Rng rng(2);
  const ChargeOperatorSet ops(make_chain(3, 3));
  const Matrix m = random_hermitian(27, rng);
  const Matrix u = ops.symmetry_unitary();
  EXPECT_LT(max_abs_entry(ops.apply_symmetry(m) - u * m), 1e-14);
  EXPECT_LT(max_abs_entry(ops.conjugate_symmetry(m) - u * m * u.adjoint()), 1e-14);
}

TEST(FixedPoint, SwssbTwoQubitsIsHalfEvenProjector) {
  const auto st = build_fixed_point(make_chain(2, 2), FixedPointKind::swssb);
  const Matrix xx = kron(pauli_x(), pauli_x());
  const Matrix expected = 0.25 * (Matrix::Identity(4, 4) + xx);
  EXPECT_LT(max_abs_entry(st.rho.matrix() - expected), 1e-15);
  const auto sc = check_strong_symmetry(st.rho, st.ops);
  EXPECT_TRUE(sc.strong);
  EXPECT_NEAR(std::abs(sc.phase.value() - Complex(1.0, 0.0)), 0.0, 1e-14);
}

TEST(FixedPoint, SrcIsPlusProduct) {
  const auto st = build_fixed_point(make_chain(3, 2), FixedPointKind::src);
  const Vector plus = Vector::Constant(8, 1.0 / std::sqrt(8.0));
  EXPECT_LT(max_abs_entry(st.rho.matrix() - pure(plus)), 1e-15);
  const auto sc = check_strong_symmetry(st.rho, st.ops);
  EXPECT_TRUE(sc.strong);
  EXPECT_NEAR(std::abs(sc.phase.value() - Complex(1.0, 0.0)), 0.0, 1e-14);
}

TEST(FixedPoint, SrcQutritsDenseSymmetryCheck) {
  const auto st = build_fixed_point(make_chain(2, 3), FixedPointKind::src);
  const Matrix u = st.ops.symmetry_unitary();
  EXPECT_LT(max_abs_entry(u * st.rho.matrix() - st.rho.matrix()), 1e-15);
  EXPECT_TRUE(check_strong_symmetry(st.rho.matrix(), u).strong);
}

TEST(FixedPoint, AllKindsValidAndStronglySymmetric) {
  for (int n : {2, 3}) {
    for (int N : {1, 2, 3, 4}) {
      for (auto kind : {FixedPointKind::src, FixedPointKind::swssb, FixedPointKind::ghz}) {
        const auto st = build_fixed_point(make_chain(N, n), kind);
        EXPECT_LT(st.rho.trace_defect(), 1e-12);
        const DensityMatrix checked = DensityMatrix::checked(st.rho.system(), st.rho.matrix());
        EXPECT_GE(*checked.min_eigenvalue(), 0.0);
        const auto sc = check_strong_symmetry(st.rho, st.ops);
        EXPECT_TRUE(sc.strong) << to_string(kind) << " n=" << n << " N=" << N;
        EXPECT_TRUE(sc.weak);
        EXPECT_NEAR(std::abs(sc.phase.value()), 1.0, 1e-12);
        ASSERT_TRUE(st.rho.block_form());
        EXPECT_LT(max_abs_entry(st.rho.block_form()->to_dense() - st.rho.matrix()), 1e-12);
      }
    }
  }
}

TEST(FixedPoint, GhzQubitsIsCat) {
  const auto st = build_fixed_point(make_chain(3, 2), FixedPointKind::ghz);
  Vector cat = Vector::Zero(8);
  cat[0] = cat[7] = 1.0 / std::sqrt(2.0);
  EXPECT_LT(max_abs_entry(st.rho.matrix() - pure(cat)), 1e-15);
}

TEST(FixedPoint, ParseKind) {
  EXPECT_EQ(parse_fixed_point_kind("ghz"), FixedPointKind::ghz);
  EXPECT_THROW(parse_fixed_point_kind("neel"), InvalidArgument);
  EXPECT_THROW(build_fixed_point(make_chain(13, 2), FixedPointKind::src), InvalidArgument);
}

TEST(SymmetryCheck, GhzStrongUnderXX) {
  const auto st = build_fixed_point(make_chain(2, 2), FixedPointKind::ghz);
  const auto sc = check_strong_symmetry(st.rho.matrix(), kron(pauli_x(), pauli_x()));
  EXPECT_TRUE(sc.strong);
  EXPECT_NEAR(std::abs(sc.phase.value() - Complex(1.0, 0.0)), 0.0, 1e-14);
}

TEST(SymmetryCheck, ClassicalMixtureOnlyWeak) {
  const Matrix rho = diag({0.5, 0.0, 0.0, 0.5});
  const auto sc = check_strong_symmetry(rho, kron(pauli_x(), pauli_x()));
  EXPECT_FALSE(sc.strong);
  EXPECT_TRUE(sc.weak);
}

TEST(SymmetryCheck, MaximallyMixedIsWeakOnlyForNontrivialU) {
  const Matrix rho = 0.25 * Matrix::Identity(4, 4);
  const auto sc = check_strong_symmetry(rho, kron(pauli_x(), pauli_x()));
  EXPECT_FALSE(sc.strong);
  EXPECT_TRUE(sc.weak);
  const auto id = check_strong_symmetry(rho, Matrix::Identity(4, 4));
  EXPECT_TRUE(id.strong);
  EXPECT_NEAR(std::abs(id.phase.value() - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(SymmetryCheck, PhaseOfChargedSector) {
  const SystemSpec sys = make_chain(3, 3);
  const ChargeOperatorSet ops(sys);
  const DensityMatrix rho = build_random_symmetric(sys, 4, 1);
  const auto sc = check_strong_symmetry(rho, ops);
  ASSERT_TRUE(sc.strong);
  EXPECT_NEAR(std::abs(sc.phase.value()), 1.0, 1e-12);
  EXPECT_GT(std::abs(sc.phase.value() - Complex(1.0, 0.0)), 0.5);
  const auto dense = check_strong_symmetry(rho.matrix(), ops.symmetry_unitary());
  EXPECT_NEAR(std::abs(dense.phase.value() - sc.phase.value()), 0.0, 1e-12);
}

TEST(SymmetryCheck, DimensionMismatch) {
  EXPECT_THROW(check_strong_symmetry(Matrix::Identity(2, 2), Matrix::Identity(4, 4)), DimensionMismatch);
}

TEST(BondDephased, EndpointsMatchFixedPoints) {
  const SystemSpec sys = make_chain(4, 2);
  const auto src = build_fixed_point(sys, FixedPointKind::src);
  const auto sw = build_fixed_point(sys, FixedPointKind::swssb);
  EXPECT_LT(max_abs_entry(build_bond_dephased(sys, 0.0).matrix() - src.rho.matrix()), 1e-15);
  EXPECT_LT(max_abs_entry(build_bond_dephased(sys, 0.5).matrix() - sw.rho.matrix()), 1e-10);
  const SystemSpec q3 = make_chain(3, 3);
  const auto sw3 = build_fixed_point(q3, FixedPointKind::swssb);
  EXPECT_LT(max_abs_entry(build_bond_dephased(q3, 2.0 / 3.0).matrix() - sw3.rho.matrix()), 1e-10);
}

TEST(BondDephased, IntermediateStrongAndPartiallyCorrelated) {
  const SystemSpec sys = make_chain(4, 2);
  const ChargeOperatorSet ops(sys);
  const DensityMatrix rho = build_bond_dephased(sys, 0.25);
  EXPECT_TRUE(check_strong_symmetry(rho, ops).strong);
  EXPECT_GE(DensityMatrix::checked(sys, rho.matrix()).min_eigenvalue().value(), 0.0);
  const double f = fidelity_correlator(rho, ops, 1, 3);
  EXPECT_GT(f, 0.0);
  EXPECT_LT(f, 1.0);
}

TEST(BondDephased, MonotoneCorrelatorInQ) {
  for (int n : {2, 3}) {
    const SystemSpec sys = make_chain(n == 2 ? 6 : 4, n);
    const ChargeOperatorSet ops(sys);
    const int c = sys.center_site();
    const int far = c - sys.n_sites / 2;
    double prev = -1.0;
    const double q_max = (n - 1.0) / n;
    for (int k = 0; k <= 6; ++k) {
      const double f = fidelity_correlator(build_bond_dephased(sys, q_max * k / 6.0), ops, c, far);
      EXPECT_GE(f, prev - 1e-12) << "n=" << n << " k=" << k;
      prev = f;
    }
  }
}

TEST(BondDephased, BlockFormMatchesDense) {
  for (auto boundary : {Boundary::open, Boundary::periodic}) {
    SystemSpec sys = make_chain(4, 3);
    sys.boundary = boundary;
    const DensityMatrix rho = build_bond_dephased(sys, 0.3);
    ASSERT_TRUE(rho.block_form());
    EXPECT_LT(max_abs_entry(rho.block_form()->to_dense() - rho.matrix()), 1e-12);
  }
}

TEST(BondDephased, RejectsOutOfRange) {
  EXPECT_THROW(build_bond_dephased(make_chain(4, 2), 0.6), InvalidArgument);
  EXPECT_THROW(build_bond_dephased(make_chain(4, 2), -0.1), InvalidArgument);
}

TEST(DensityMatrix, ValidationPolicy) {
  const SystemSpec sys = make_chain(1, 2);
  EXPECT_THROW(DensityMatrix::checked(sys, diag({0.6, 0.6})), InvalidArgument);
  EXPECT_THROW(DensityMatrix::checked(sys, diag({1.1, -0.1})), NotPositiveSemidefinite);
  const DensityMatrix clipped = DensityMatrix::checked(sys, diag({1.0 + 5e-11, -5e-11}));
  EXPECT_EQ(clipped.matrix()(1, 1).real(), 0.0);
  EXPECT_NEAR(clipped.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_THROW(DensityMatrix::checked(sys, Matrix::Identity(4, 4) / 4.0), DimensionMismatch);
}

TEST(RandomSymmetric, SectorAndRank) {
  const SystemSpec sys = make_chain(4, 2);
  const ChargeOperatorSet ops(sys);
  for (int charge : {0, 1}) {
    const DensityMatrix rho = build_random_symmetric(sys, 10 + charge, charge, 3);
    const auto sc = check_strong_symmetry(rho, ops);
    EXPECT_TRUE(sc.strong);
    EXPECT_NEAR(sc.phase.value().real(), charge == 0 ? 1.0 : -1.0, 1e-12);
    const Spectrum s = eigh(rho.hermitian());
    int rank = 0;
    for (Index k = 0; k < s.eigenvalues.size(); ++k) rank += s.eigenvalues[k] > 1e-12;
    EXPECT_EQ(rank, 3);
  }
}

TEST(StateIo, RoundTrip) {
  const SystemSpec sys = make_chain(3, 3);
  const DensityMatrix rho = build_bond_dephased(sys, 0.2);
  std::stringstream ss;
  write_state(ss, rho);
  const DensityMatrix back = read_state(ss);
  EXPECT_EQ(back.system().n_sites, 3);
  EXPECT_EQ(back.system().local_dim, 3);
  // 17 digits are exact; validation may still clip round-off negativity.
  EXPECT_LE(max_abs_entry(back.matrix() - rho.matrix()), 1e-15);
}

TEST(StateIo, Malformed) {
  std::stringstream bad("mixfid-state 1\ndim 4\nlocal_dim 2\nsites 2\n0.25 0 0 0\n");
  EXPECT_THROW(read_state(bad), IoError);
  std::stringstream wrong_dim("mixfid-state 1\ndim 3\nlocal_dim 2\nsites 2\n");
  EXPECT_THROW(read_state(wrong_dim), IoError);
  std::stringstream no_magic("state 1\n");
  EXPECT_THROW(read_state(no_magic), IoError);
  EXPECT_THROW(read_state(std::string("/nonexistent/state.txt")), IoError);
}
