#include "paramkl/core_model.hpp"
#include "paramkl/error.hpp"
#include "../test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace
{
  using namespace paramkl;
  using namespace paramkl::testing;

  TEST(ParameterGrid, RejectsBadWeightsAndDuplicates)
  {
    MatrixXd pts(2, 1);
    pts << 0.0, 1.0;
    EXPECT_THROW(ParameterGrid(pts, VectorXd::Constant(2, 0.0)), InvalidArgument);
    EXPECT_THROW(ParameterGrid(pts, VectorXd::Ones(3)), DimensionError);
    pts(1, 0) = 1e-15;
    EXPECT_THROW(ParameterGrid(pts, VectorXd::Ones(2)), InvalidArgument);
    pts(1, 0) = 1e-10;
    EXPECT_NO_THROW(ParameterGrid(pts, VectorXd::Ones(2)));
  }

  TEST(ParameterGrid, UniformAndMidpoint)
  {
    const auto g = ParameterGrid::midpoint(4, 2);
    EXPECT_EQ(g.size(), 16);
    EXPECT_EQ(g.dimension(), 2);
    EXPECT_NEAR(g.weights().sum(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(g.points().minCoeff(), 0.125);
    EXPECT_DOUBLE_EQ(g.points().maxCoeff(), 0.875);
  }

  TEST(SnapshotSet, Invariants)
  {
    MatrixXd v = MatrixXd::Ones(2, 3);
    EXPECT_THROW(SnapshotSet(v, ParameterGrid::midpoint(2)), DimensionError);
    v(0, 0) = std::nan("");
    EXPECT_THROW(SnapshotSet(v, ParameterGrid::midpoint(3)), InvalidArgument);
  }

  TEST(ApplyMap, Examples)
  {
    const auto id = unit_weight_snapshots(MatrixXd::Identity(2, 2));
    EXPECT_EQ(apply_map(id, Eigen::Vector2d(1, 0)), Eigen::Vector2d(1, 0));

    MatrixXd d(2, 2);
    d << 2, 0, 0, 1;
    EXPECT_EQ(apply_map(unit_weight_snapshots(d), Eigen::Vector2d(1, 1)), Eigen::Vector2d(2, 1));

    std::mt19937_64 rng(11);
    const auto s = random_snapshots(rng, 4, 3);
    const VectorXd u = random_vector(rng, 4);
    const VectorXd phi = apply_map(s, u);
    for (Index j = 0; j < 3; ++j)
    {
      double dot = 0;
      for (Index i = 0; i < 4; ++i) dot += s.values()(i, j) * u(i);
      EXPECT_NEAR(phi(j), dot, 1e-13);
    }
    EXPECT_THROW(apply_map(s, VectorXd::Ones(3)), DimensionError);
  }

  TEST(ApplyAdjoint, Examples)
  {
    const auto id = unit_weight_snapshots(MatrixXd::Identity(2, 2));
    EXPECT_EQ(apply_adjoint(id, Eigen::Vector2d(1, 0)), Eigen::Vector2d(1, 0));

    MatrixXd pts(1, 1);
    pts << 0.5;
    const SnapshotSet single(Eigen::Vector2d(3, 4), ParameterGrid(pts, VectorXd::Constant(1, 2.0)));
    EXPECT_EQ(apply_adjoint(single, VectorXd::Ones(1)), Eigen::Vector2d(6, 8));
    EXPECT_THROW(apply_adjoint(single, VectorXd::Ones(2)), DimensionError);
  }

  TEST(ApplyAdjoint, AdjointIdentity)
  {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial)
    {
      const auto s = random_snapshots(rng, 5, 4);
      const VectorXd u = random_vector(rng, 5);
      const VectorXd phi = random_vector(rng, 4);
      double lhs = 0;
      for (Index j = 0; j < 4; ++j) lhs += s.grid().weights()(j) * apply_map(s, u)(j) * phi(j);
      const double rhs = u.dot(apply_adjoint(s, phi));
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }

  TEST(Correlation, Examples)
  {
    MatrixXd pts(1, 1);
    pts << 0.0;
    const SnapshotSet single(Eigen::Vector2d(1, 0), ParameterGrid(pts, VectorXd::Ones(1)));
    MatrixXd e(2, 2);
    e << 1, 0, 0, 0;
    EXPECT_EQ(correlation(single).entries(), e);

    MatrixXd d(2, 2);
    d << 2, 0, 0, 1;
    e << 4, 0, 0, 1;
    EXPECT_EQ(correlation(unit_weight_snapshots(d)).entries(), e);
  }

  TEST(Correlation, TripleLoopOracle)
  {
    std::mt19937_64 rng(13);
    const auto s = random_snapshots(rng, 6, 10);
    MatrixXd c = MatrixXd::Zero(6, 6);
    for (Index a = 0; a < 6; ++a)
      for (Index b = 0; b < 6; ++b)
        for (Index j = 0; j < 10; ++j)
          c(a, b) += s.grid().weights()(j) * s.values()(a, j) * s.values()(b, j);
    EXPECT_LE(rel_err(correlation(s).entries(), c), 1e-12);
  }

  TEST(Correlation, ComposesMapAndAdjointAndTrace)
  {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial)
    {
      const auto s = random_snapshots(rng, 7, 5);
      const MatrixXd c = correlation(s).entries();
      const VectorXd u = random_vector(rng, 7);
      EXPECT_LE(rel_err(c * u, apply_adjoint(s, apply_map(s, u))), 1e-12);
      double tr = 0;
      for (Index j = 0; j < 5; ++j) tr += s.grid().weights()(j) * s.values().col(j).squaredNorm();
      EXPECT_NEAR(c.trace(), tr, 1e-12 * tr);
    }
  }

  TEST(CorrelationMatrix, ValidatesInput)
  {
    MatrixXd a(2, 2);
    a << 1, 2, 0, 1;
    EXPECT_THROW(CorrelationMatrix{a}, InvalidArgument);
    a << 1, 2, 2, 1;
    EXPECT_THROW(CorrelationMatrix{a}, NotPositiveDefiniteError);
    a << 2, 1, 1, 2;
    EXPECT_NO_THROW(CorrelationMatrix{a});
  }

  TEST(KernelGram, Examples)
  {
    std::mt19937_64 rng(15);
    const MatrixXd q = random_orthonormal(rng, 5, 3);
    EXPECT_LE((kernel_gram(unit_weight_snapshots(q)).entries() - MatrixXd::Identity(3, 3)).norm(), 1e-14);

    MatrixXd pts(1, 1);
    pts << 0.0;
    const SnapshotSet single(Eigen::Vector2d(3, 4), ParameterGrid(pts, VectorXd::Ones(1)));
    EXPECT_DOUBLE_EQ(kernel_gram(single).entries()(0, 0), 25.0);

    const auto s = random_snapshots(rng, 4, 6);
    const MatrixXd k = kernel_gram(s).entries();
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) EXPECT_NEAR(k(i, j), s.values().col(i).dot(s.values().col(j)), 1e-13);
  }

  TEST(KernelGram, PermutationEquivariance)
  {
    std::mt19937_64 rng(16);
    const auto s = random_snapshots(rng, 4, 6);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> p(6);
    for (int i = 0; i < 6; ++i) p.indices()(i) = perm[i];
    const MatrixXd pm = p.toDenseMatrix().cast<double>();
    const SnapshotSet permuted(s.values() * pm,
        ParameterGrid(pm.transpose() * s.grid().points(), pm.transpose() * s.grid().weights()));
    EXPECT_LE((kernel_gram(permuted).entries() - pm.transpose() * kernel_gram(s).entries() * pm).norm(), 1e-12);
  }

  TEST(RkhsReproduce, Examples)
  {
    const auto id = unit_weight_snapshots(MatrixXd::Identity(2, 2));
    EXPECT_NEAR(rkhs_reproduce(id, apply_map(id, Eigen::Vector2d(0, 1)), 1), 1.0, 1e-14);
    EXPECT_EQ(rkhs_reproduce(id, VectorXd::Zero(2), 0), 0.0);

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial)
    {
      const auto s = random_snapshots(rng, 5, 3);
      const VectorXd phi = apply_map(s, random_vector(rng, 5));
      for (Index i = 0; i < 3; ++i) EXPECT_NEAR(rkhs_reproduce(s, phi, i), phi(i), 1e-10 * phi.norm());
    }
  }

  TEST(RkhsReproduce, NotInRange)
  {
    // 3 samples of a 2-dimensional state: range of R is a 2-plane in R^3.
    MatrixXd v(2, 3);
    v << 1, 0, 1, 0, 1, 1;
    const auto s = unit_weight_snapshots(v);
    EXPECT_THROW(rkhs_reproduce(s, Eigen::Vector3d(1, 0, 0), 0), NotInRangeError);
    EXPECT_THROW(rkhs_reproduce(s, Eigen::Vector3d(1, 0, 1), 3), InvalidArgument);
  }

  TEST(MassMatrix, EuclideanProductMatchesMassProduct)
  {
    std::mt19937_64 rng(18);
    const auto s = random_snapshots(rng, 4, 3);
    const MatrixXd mass = random_psd(rng, 4, 4) + MatrixXd::Identity(4, 4);
    const auto t = apply_mass_matrix(s, mass);
    const MatrixXd expected = s.values().transpose() * mass * s.values();
    EXPECT_LE(rel_err(kernel_gram(t).entries(), expected), 1e-12);
  }

  TEST(Fingerprint, SensitiveToValuesAndWeights)
  {
    std::mt19937_64 rng(19);
    const auto s = random_snapshots(rng, 3, 3);
    MatrixXd v = s.values();
    v(1, 1) += 1e-15;
    EXPECT_EQ(fingerprint(s), fingerprint(SnapshotSet(s.values(), s.grid())));
    EXPECT_NE(fingerprint(s), fingerprint(SnapshotSet(v, s.grid())));
    EXPECT_EQ(fingerprint(s).size(), 64u);
  }
}  // namespace
