#include <gtest/gtest.h>

#include <algorithm>

#include "rmspi/weighting.hpp"

using namespace rmspi;

namespace {

std::vector<double> sorted_eigs(const WeightOperator& op) {
  const Vector e = eigenvalues(op);
  return {e.begin(), e.end()};
}

void expect_multiset(std::vector<double> got, std::vector<double> want, double tol) {
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "eigenvalue " << i;
}

WeightSpec random_spec(Rng& rng, Index r) {
  std::uniform_real_distribution<double> w(0.05, 1.0);
  if (rng() % 2) return WeightSpec::single(w(rng), w(rng));
  std::vector<double> s(static_cast<std::size_t>(r)), c(static_cast<std::size_t>(r));
  for (double& x : s) x = w(rng);
  for (double& x : c) x = w(rng);
  return WeightSpec::per_direction(s, c);
}

}  // namespace

TEST(BuildWeightOperator, AllOnesIsIdentity) {
  Rng rng(1);
  const SubspaceBasis prior = random_orthonormal(10, 3, rng);
  EXPECT_EQ(build_weight_operator(prior, WeightSpec::single(1, 1), rng).q, Matrix::Identity(10, 10));
  const auto pd = build_weight_operator(prior, WeightSpec::per_direction({1, 1, 1}, {1, 1, 1}), rng);
  EXPECT_EQ(pd.q, Matrix::Identity(10, 10));
  EXPECT_EQ(pd.q_inv, Matrix::Identity(10, 10));
  EXPECT_EQ(identity_weight(4).q, Matrix::Identity(4, 4));
}

TEST(BuildWeightOperator, SingleModeFigureOneSpectrum) {
  Rng rng(2);
  const auto op = build_weight_operator(random_orthonormal(30, 3, rng), WeightSpec::single(0.18, 0.999), rng);
  std::vector<double> want(3, 0.18);
  want.insert(want.end(), 27, 0.999);
  expect_multiset(sorted_eigs(op), want, 1e-12);
}

TEST(BuildWeightOperator, PerDirectionFigureOneSpectrum) {
  Rng rng(3);
  const auto op = build_weight_operator(random_orthonormal(30, 3, rng),
                                        WeightSpec::per_direction({0.17, 0.19, 0.21}, {0.99, 0.98, 0.97}), rng);
  std::vector<double> want{0.17, 0.19, 0.21, 0.99, 0.98, 0.97};
  want.insert(want.end(), 24, 1.0);
  expect_multiset(sorted_eigs(op), want, 1e-12);
}

TEST(BuildWeightOperator, InvalidSpecs) {
  Rng rng(4);
  const SubspaceBasis prior = random_orthonormal(10, 3, rng);
  EXPECT_THROW(build_weight_operator(prior, WeightSpec::single(0.0, 1.0), rng), InvalidArgument);
  EXPECT_THROW(build_weight_operator(prior, WeightSpec::single(0.5, 1.01), rng), InvalidArgument);
  EXPECT_THROW(build_weight_operator(prior, WeightSpec::single(-0.5, 1.0), rng), InvalidArgument);
  EXPECT_THROW(build_weight_operator(prior, WeightSpec::per_direction({0.5, 0.5}, {1, 1}), rng), InvalidArgument);
  EXPECT_THROW(build_weight_operator(prior, WeightSpec::per_direction({0.5, 0.5, 0.5}, {1, 1}), rng),
               InvalidArgument);
}

TEST(BuildWeightOperator, ExplicitComplementMustBeOrthogonal) {
  Rng rng(5);
  const SubspaceBasis prior = random_orthonormal(10, 2, rng);
  const WeightSpec spec = WeightSpec::per_direction({0.2, 0.3}, {0.9, 0.8});
  EXPECT_THROW(build_weight_operator(prior, spec, prior), InvalidArgument);
  const SubspaceBasis comp = random_complement_directions(prior, rng);
  const auto op = build_weight_operator(prior, spec, comp);
  EXPECT_LE((op.q * comp.matrix().col(0) - 0.9 * comp.matrix().col(0)).norm(), 1e-12);
}

TEST(Invert, IdentityAndReciprocal) {
  Rng rng(6);
  EXPECT_EQ(invert(identity_weight(5)), Matrix::Identity(5, 5));
  const SubspaceBasis prior = random_orthonormal(8, 2, rng);
  const auto op = build_weight_operator(prior, WeightSpec::single(0.5, 1.0), rng);
  const Matrix& qi = invert(op);
  EXPECT_LE((qi * prior.matrix() - 2.0 * prior.matrix()).norm(), 1e-12);
  const SubspaceBasis comp = complement(prior);
  EXPECT_LE((qi * comp.matrix() - comp.matrix()).norm(), 1e-12);
}

TEST(AnglesToWeights, Endpoints) {
  const std::vector<double> zero{0.0}, right{90.0};
  const WeightSpec a = angles_to_weights(zero, WeightMode::per_direction);
  EXPECT_NEAR(a.span_weights[0], 0.1, 1e-15);
  EXPECT_NEAR(a.complement_weights[0], 0.9, 1e-15);
  const WeightSpec b = angles_to_weights(right, WeightMode::per_direction);
  EXPECT_NEAR(b.span_weights[0], 0.9, 1e-15);
  EXPECT_NEAR(b.complement_weights[0], 0.1, 1e-15);
}

TEST(AnglesToWeights, FigureOneAngles) {
  const std::vector<double> th{2.33, 3.13, 3.89};
  const WeightSpec w = angles_to_weights(th, WeightMode::per_direction);
  EXPECT_NEAR(w.span_weights[0], 0.121, 1e-3);
  EXPECT_NEAR(w.span_weights[1], 0.128, 1e-3);
  EXPECT_NEAR(w.span_weights[2], 0.135, 1e-3);
  const WeightSpec s = angles_to_weights(th, WeightMode::single);
  ASSERT_EQ(s.span_weights.size(), 1u);
  EXPECT_NEAR(s.span_weights[0], angle_weight((2.33 + 3.13 + 3.89) / 3), 1e-15);
}

TEST(AnglesToWeights, OutOfRange) {
  const std::vector<double> bad{-1.0}, big{90.5}, none;
  EXPECT_THROW(angles_to_weights(bad, WeightMode::single), InvalidArgument);
  EXPECT_THROW(angles_to_weights(big, WeightMode::single), InvalidArgument);
  EXPECT_THROW(angles_to_weights(none, WeightMode::single), InvalidArgument);
}

TEST(AlignedComplement, PairsWithPriorDirections) {
  Rng rng(7);
  const SubspaceBasis u = random_orthonormal(30, 3, rng);
  const std::vector<double> th{2.3307, 3.1302, 3.8852};
  const SubspaceBasis prior = perturb_subspace(u, th, rng);
  const SubspaceBasis c = aligned_complement_directions(prior, u, rng);
  EXPECT_LE((prior.matrix().transpose() * c.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  // P_prior_perp u_i has norm sin(theta_i); direction i carries the i-th smallest.
  const Matrix proj = u.matrix() - prior.matrix() * (prior.matrix().transpose() * u.matrix());
  const Vector s = svd(c.matrix().transpose() * proj).singular_values;
  for (int i = 0; i < 3; ++i) {
    const double si = (c.matrix().col(i).transpose() * proj).norm();
    EXPECT_NEAR(si, std::sin(to_radians(th[static_cast<std::size_t>(i)])), 1e-8);
  }
  EXPECT_NEAR(s.sum(), std::sin(to_radians(th[0])) + std::sin(to_radians(th[1])) + std::sin(to_radians(th[2])),
              1e-8);
}

TEST(AlignedComplement, FillsWhenReferenceInsidePrior) {
  Rng rng(8);
  const SubspaceBasis prior = random_orthonormal(9, 3, rng);
  const SubspaceBasis c = aligned_complement_directions(prior, prior, rng);
  EXPECT_EQ(c.rank(), 3);
  EXPECT_LE((prior.matrix().transpose() * c.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

// ---------------------------------------------------------------- properties

TEST(WeightingProps, InverseNormAndCommutation) {
  Rng rng(200);
  for (int i = 0; i < 60; ++i) {
    const Index r = 1 + i % 4;
    const Index n = 2 * r + i % 7;
    const SubspaceBasis prior = random_orthonormal(n, r, rng);
    const auto op = build_weight_operator(prior, random_spec(rng, r), rng);
    const Matrix eye = Matrix::Identity(n, n);
    EXPECT_LE((op.q * op.q_inv - eye).norm(), 1e-10);
    EXPECT_LE((op.q - op.q.transpose()).norm(), 0.0);
    const Vector ev = eigenvalues(op);
    EXPECT_GT(ev.minCoeff(), 0.0);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-12);
    EXPECT_LE((op.q * prior.projector() - prior.projector() * op.q).norm(), 1e-10);
  }
}

TEST(WeightingProps, ShrinksFrobeniusNorm) {
  Rng rng(201);
  for (int i = 0; i < 60; ++i) {
    const Index r = 1 + i % 3;
    const Index n = 2 * r + 3;
    const auto qu = build_weight_operator(random_orthonormal(n, r, rng), random_spec(rng, r), rng);
    const auto qv = build_weight_operator(random_orthonormal(n, r, rng), random_spec(rng, r), rng);
    const Matrix z = gaussian_matrix(n, n, rng);
    EXPECT_LE((qu.q * z * qv.q).norm(), z.norm() + 1e-12);
  }
}

TEST(WeightingProps, InverseEigenRebuildGivesReciprocalSpec) {
  Rng rng(202);
  for (int i = 0; i < 40; ++i) {
    const Index r = 1 + i % 3;
    const Index n = 2 * r + 2;
    const SubspaceBasis prior = random_orthonormal(n, r, rng);
    const WeightSpec spec = random_spec(rng, r);
    const auto op = build_weight_operator(prior, spec, rng);
    const Matrix& u = prior.matrix();
    // Rayleigh quotients of Q^-1 on the weighted directions give 1 / w.
    if (spec.mode == WeightMode::single) {
      const Matrix span = u.transpose() * op.q_inv * u;
      EXPECT_LE((span - Matrix::Identity(r, r) / spec.span_weights[0]).norm(), 1e-8);
      const Matrix c = complement(prior).matrix();
      EXPECT_LE((c.transpose() * op.q_inv * c - Matrix::Identity(n - r, n - r) / spec.complement_weights[0]).norm(),
                1e-8);
    } else {
      const Matrix& c = op.complement.matrix();
      for (Index k = 0; k < r; ++k) {
        EXPECT_NEAR(u.col(k).dot(op.q_inv * u.col(k)), 1.0 / spec.span_weights[static_cast<std::size_t>(k)], 1e-8);
        EXPECT_NEAR(c.col(k).dot(op.q_inv * c.col(k)), 1.0 / spec.complement_weights[static_cast<std::size_t>(k)],
                    1e-8);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.q_inv);
    const Matrix rebuilt = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
    EXPECT_LE((rebuilt - op.q).norm(), 1e-8);
  }
}
