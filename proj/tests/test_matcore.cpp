#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rmspi/matcore.hpp"

using namespace rmspi;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << a, b, c;
  return m;
}

double orth_error(const SubspaceBasis& b) {
  return (b.matrix().transpose() * b.matrix() - Matrix::Identity(b.rank(), b.rank())).cwiseAbs().maxCoeff();
}

SubspaceBasis basis_of(std::initializer_list<double> col) {
  Matrix m(static_cast<Index>(col.size()), 1);
  Index i = 0;
  for (double v : col) m(i++, 0) = v;
  return SubspaceBasis(m);
}

}  // namespace

TEST(Svd, IdentityHasUnitSingularValues) {
  const SvdResult s = svd(Matrix::Identity(3, 3));
  EXPECT_TRUE(s.singular_values.isApprox(Vector::Ones(3)));
}

TEST(Svd, DiagonalCase) {
  const SvdResult s = svd(diag3(3, 2, 1));
  EXPECT_NEAR(s.singular_values(0), 3, 1e-14);
  EXPECT_NEAR(s.singular_values(1), 2, 1e-14);
  EXPECT_NEAR(s.singular_values(2), 1, 1e-14);
  EXPECT_TRUE(s.left.matrix().cwiseAbs().isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(s.right.matrix().cwiseAbs().isApprox(Matrix::Identity(3, 3)));
}

TEST(Svd, RandomReconstructs) {
  Rng rng(5);
  const Matrix m = gaussian_matrix(5, 5, rng);
  EXPECT_LE((svd(m).reconstruct() - m).norm(), 1e-8 * m.norm());
}

TEST(Svd, RectangularGivesMinDimTriplets) {
  Rng rng(6);
  const SvdResult s = svd(gaussian_matrix(7, 3, rng));
  EXPECT_EQ(s.singular_values.size(), 3);
  EXPECT_EQ(s.left.rank(), 3);
  EXPECT_EQ(s.right.rank(), 3);
}

TEST(Svd, RejectsNonFinite) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(svd(m), InvalidArgument);
}

TEST(TruncateRank, DiagonalEckartYoung) {
  EXPECT_TRUE(truncate_rank(diag3(3, 2, 1), 2).isApprox(diag3(3, 2, 0)));
}

TEST(TruncateRank, FullRankIsIdentity) {
  Rng rng(7);
  const Matrix m = gaussian_matrix(4, 4, rng);
  EXPECT_LE((truncate_rank(m, 4) - m).norm(), 1e-10);
}

TEST(TruncateRank, ResidualIsTailEnergy) {
  Rng rng(8);
  const Matrix m = gaussian_matrix(6, 6, rng);
  const Vector s = svd(m).singular_values;
  EXPECT_NEAR((truncate_rank(m, 2) - m).norm(), s.tail(4).norm(), 1e-8);
}

TEST(TruncateRank, ZeroRankAndRangeErrors) {
  EXPECT_TRUE(truncate_rank(diag3(3, 2, 1), 0).isZero());
  EXPECT_THROW(truncate_rank(diag3(3, 2, 1), 4), InvalidArgument);
  EXPECT_THROW(truncate_rank(diag3(3, 2, 1), -1), InvalidArgument);
}

TEST(SubspaceBasisType, RejectsNonOrthonormal) {
  Matrix m(3, 2);
  m << 1, 1, 0, 1, 0, 0;
  EXPECT_THROW(SubspaceBasis{m}, InvalidArgument);
  EXPECT_THROW(SubspaceBasis{Matrix::Identity(2, 3)}, InvalidArgument);
}

TEST(PrincipalAngles, IdenticalSubspaces) {
  Rng rng(9);
  const SubspaceBasis s = random_orthonormal(10, 3, rng);
  for (double a : principal_angles(s, s)) EXPECT_NEAR(a, 0.0, 1e-6);
}

TEST(PrincipalAngles, OrthogonalLines) {
  const auto a = principal_angles(basis_of({1, 0}), basis_of({0, 1}));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0], 90.0, 1e-12);
}

TEST(PrincipalAngles, PlanarRotation) {
  const double t = to_radians(30.0);
  const auto a = principal_angles(basis_of({1, 0}), basis_of({std::cos(t), std::sin(t)}));
  EXPECT_NEAR(a[0], 30.0, 1e-8);
}

TEST(PrincipalAngles, LengthIsMinRankAndDimsMustMatch) {
  Rng rng(10);
  EXPECT_EQ(principal_angles(random_orthonormal(8, 2, rng), random_orthonormal(8, 5, rng)).size(), 2u);
  EXPECT_THROW(principal_angles(random_orthonormal(8, 2, rng), random_orthonormal(7, 2, rng)), InvalidArgument);
}

TEST(PerturbSubspace, ZeroAnglesKeepSubspace) {
  Rng rng(11);
  const SubspaceBasis s = random_orthonormal(12, 3, rng);
  const std::vector<double> zeros(3, 0.0);
  for (double a : principal_angles(s, perturb_subspace(s, zeros, rng))) EXPECT_NEAR(a, 0.0, 1e-6);
}

TEST(PerturbSubspace, NinetyDegreesIsOrthogonal) {
  Rng rng(12);
  const SubspaceBasis s = random_orthonormal(12, 3, rng);
  const std::vector<double> right(3, 90.0);
  const SubspaceBasis t = perturb_subspace(s, right, rng);
  EXPECT_LE((s.matrix().transpose() * t.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PerturbSubspace, FigureOneAnglesRoundTrip) {
  Rng rng(13);
  const SubspaceBasis s = random_orthonormal(30, 3, rng);
  const std::vector<double> target{2.3307, 3.1302, 3.8852};
  const SubspaceBasis t = perturb_subspace(s, target, rng);
  EXPECT_LE(orth_error(t), 1e-10);
  const auto got = principal_angles(s, t);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], target[i], 1e-6);
}

TEST(PerturbSubspace, Errors) {
  Rng rng(14);
  const SubspaceBasis s = random_orthonormal(5, 3, rng);
  const std::vector<double> three(3, 1.0), two(2, 1.0), bad{1.0, 91.0, 1.0};
  EXPECT_THROW(perturb_subspace(s, three, rng), InvalidArgument);
  const SubspaceBasis ok = random_orthonormal(8, 3, rng);
  EXPECT_THROW(perturb_subspace(ok, two, rng), InvalidArgument);
  EXPECT_THROW(perturb_subspace(ok, bad, rng), InvalidArgument);
}

TEST(Orthonormalize, OrthonormalInputKeepsSpan) {
  Rng rng(15);
  const SubspaceBasis q = random_orthonormal(6, 3, rng);
  const SubspaceBasis b = orthonormalize(q.matrix());
  ASSERT_EQ(b.rank(), 3);
  EXPECT_LE((b.projector() - q.projector()).norm(), 1e-12);
}

TEST(Orthonormalize, DependentColumnsDropped) {
  Matrix m = Matrix::Zero(3, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  const SubspaceBasis b = orthonormalize(m);
  ASSERT_EQ(b.rank(), 1);
  EXPECT_NEAR(std::abs(b.matrix()(0, 0)), 1.0, 1e-15);
}

TEST(Orthonormalize, KnownRank) {
  Rng rng(16);
  const Matrix m = gaussian_matrix(8, 3, rng) * gaussian_matrix(3, 5, rng);
  EXPECT_EQ(orthonormalize(m).rank(), 3);
  EXPECT_EQ(orthonormalize(Matrix::Zero(4, 2)).rank(), 0);
}

TEST(RandomOrthonormal, SquareHasUnitDeterminant) {
  Rng rng(17);
  EXPECT_NEAR(std::abs(random_orthonormal(5, 5, rng).matrix().determinant()), 1.0, 1e-8);
}

TEST(RandomOrthonormal, Deterministic) {
  Rng a(18), b(18);
  EXPECT_EQ(random_orthonormal(30, 3, a).matrix(), random_orthonormal(30, 3, b).matrix());
}

TEST(RandomOrthonormal, TallFrame) {
  Rng rng(19);
  const SubspaceBasis b = random_orthonormal(30, 3, rng);
  EXPECT_EQ(b.ambient_dim(), 30);
  EXPECT_LE(orth_error(b), 1e-10);
  EXPECT_THROW(random_orthonormal(3, 4, rng), InvalidArgument);
}

TEST(Complement, SpansTheRest) {
  Rng rng(20);
  const SubspaceBasis s = random_orthonormal(7, 2, rng);
  const SubspaceBasis c = complement(s);
  EXPECT_EQ(c.rank(), 5);
  EXPECT_LE((s.projector() + c.projector() - Matrix::Identity(7, 7)).norm(), 1e-12);
}

// ---------------------------------------------------------------- properties

TEST(MatcoreProps, TruncationBeatsRandomCandidates) {
  Rng rng(100);
  for (int inst = 0; inst < 10; ++inst) {
    const Index n = 3 + inst % 3;
    const Index r = 1 + inst % 2;
    const Matrix m = gaussian_matrix(n, n, rng);
    const double best = (truncate_rank(m, r) - m).norm();
    for (int c = 0; c < 100; ++c) {
      const Matrix z = gaussian_matrix(n, r, rng) * gaussian_matrix(r, n, rng);
      EXPECT_LE(best, (z - m).norm() + 1e-12);
    }
  }
}

TEST(MatcoreProps, PrincipalAnglesSymmetric) {
  Rng rng(101);
  for (int i = 0; i < 50; ++i) {
    const SubspaceBasis a = random_orthonormal(10, 1 + i % 4, rng);
    const SubspaceBasis b = random_orthonormal(10, 1 + (i / 4) % 4, rng);
    const auto ab = principal_angles(a, b), ba = principal_angles(b, a);
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t k = 0; k < ab.size(); ++k) EXPECT_NEAR(ab[k], ba[k], 1e-10);
  }
}

TEST(MatcoreProps, PerturbRoundTrip) {
  Rng rng(102);
  std::uniform_real_distribution<double> angle(0.0, 90.0);
  for (int i = 0; i < 50; ++i) {
    const Index r = 1 + i % 4;
    const SubspaceBasis s = random_orthonormal(2 * r + i % 5, r, rng);
    std::vector<double> target(static_cast<std::size_t>(r));
    for (double& t : target) t = angle(rng);
    const SubspaceBasis t = perturb_subspace(s, target, rng);
    EXPECT_LE(orth_error(t), 1e-10);
    std::sort(target.begin(), target.end());
    const auto got = principal_angles(s, t);
    for (std::size_t k = 0; k < target.size(); ++k) EXPECT_NEAR(got[k], target[k], 1e-6);
  }
}

TEST(MatcoreProps, SvdReconstructionUpTo100) {
  Rng rng(103);
  for (Index n : {1, 2, 7, 20, 50, 100}) {
    const Matrix m = gaussian_matrix(n, n / 2 + 1, rng);
    const SvdResult s = svd(m);
    EXPECT_LE((s.reconstruct() - m).norm(), 1e-8 * m.norm());
    for (Index i = 1; i < s.singular_values.size(); ++i) EXPECT_GE(s.singular_values(i - 1), s.singular_values(i));
    EXPECT_LE(orth_error(s.left), 1e-10);
    EXPECT_LE(orth_error(s.right), 1e-10);
  }
}

TEST(MatcoreProps, RandomFramesOrthonormal) {
  Rng rng(104);
  for (int i = 0; i < 50; ++i) EXPECT_LE(orth_error(random_orthonormal(5 + i, 1 + i % 5, rng)), 1e-10);
}
