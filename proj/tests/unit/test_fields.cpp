#include "paramkl/error.hpp"
#include "paramkl/fields.hpp"
#include "../test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

namespace
{
  using namespace paramkl;
  using namespace paramkl::testing;

  MatrixXd random_symmetric(std::mt19937_64& rng, Index n)
  {
    const MatrixXd a = random_matrix(rng, n, n);
    return (a + a.transpose()) / 2;
  }

  MatrixXd random_spd(std::mt19937_64& rng, Index n)
  {
    return random_psd(rng, n, n) + 0.1 * MatrixXd::Identity(n, n);
  }

  double min_eigenvalue(const MatrixXd& a)
  {
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
  }

  VectorXd sorted(VectorXd v)
  {
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return v;
  }

  TEST(MatrixFunctions, ExpLogBasics)
  {
    EXPECT_LE((matrix_exp_sym(MatrixXd::Zero(3, 3)) - MatrixXd::Identity(3, 3)).norm(), 1e-15);
    EXPECT_LE(matrix_log_spd(MatrixXd::Identity(3, 3)).norm(), 1e-15);
    const MatrixXd d = Eigen::Vector2d(std::numbers::e, std::exp(2.0)).asDiagonal();
    EXPECT_LE((matrix_log_spd(d) - MatrixXd(Eigen::Vector2d(1, 2).asDiagonal())).norm(), 1e-14);
  }

  TEST(MatrixFunctions, RoundTrips)
  {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 20; ++trial)
    {
      const MatrixXd h = random_symmetric(rng, 4);
      EXPECT_LE(rel_err(matrix_log_spd(matrix_exp_sym(h)), h), 1e-10);
      const MatrixXd a = random_spd(rng, 4);
      EXPECT_LE(rel_err(matrix_exp_sym(matrix_log_spd(a)), a), 1e-10);
    }
  }

  TEST(MatrixFunctions, DomainErrors)
  {
    MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    try
    {
      matrix_log_spd(a);
      FAIL();
    }
    catch (const NotPositiveDefiniteError& e)
    {
      EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
    }
    a << 0, 1, 0, 0;
    EXPECT_THROW(matrix_exp_sym(a), InvalidArgument);
    EXPECT_THROW(matrix_exp_skew(a), InvalidArgument);
  }

  TEST(MatrixFunctions, SkewExponential)
  {
    EXPECT_LE((matrix_exp_skew(MatrixXd::Zero(3, 3)) - MatrixXd::Identity(3, 3)).norm(), 1e-15);
    const double th = std::numbers::pi / 3;
    MatrixXd s(2, 2);
    s << 0, th, -th, 0;
    const MatrixXd q = matrix_exp_skew(s);
    EXPECT_NEAR(q(0, 0), 0.5, 1e-14);
    EXPECT_NEAR(q(0, 1), std::sin(th), 1e-14);

    std::mt19937_64 rng(82);
    for (int trial = 0; trial < 10; ++trial)
    {
      const MatrixXd a = random_matrix(rng, 5, 5);
      const MatrixXd r = matrix_exp_skew(a - a.transpose());
      EXPECT_LE((r.transpose() * r - MatrixXd::Identity(5, 5)).norm(), 1e-10);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-10);
    }
  }

  TEST(Packing, FrobeniusIsometry)
  {
    std::mt19937_64 rng(83);
    for (Index n = 1; n <= 5; ++n)
    {
      const MatrixXd h = random_symmetric(rng, n);
      const VectorXd p = pack_symmetric(h);
      EXPECT_EQ(p.size(), packed_size(n));
      EXPECT_NEAR(p.norm(), h.norm(), 1e-14 * h.norm());
      EXPECT_LE((unpack_symmetric(p, n) - h).norm(), 1e-15 * h.norm());
    }
    EXPECT_THROW(unpack_symmetric(VectorXd::Ones(4), 2), DimensionError);
  }

  TEST(VectorKl, SingleComponentIsScalarDecompose)
  {
    std::mt19937_64 rng(84);
    const auto s = random_snapshots(rng, 5, 6);
    const auto a = vector_kl(VectorFieldSet(s, 1));
    const auto b = decompose(s);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.spatial_modes, b.spatial_modes);
  }

  TEST(VectorKl, UncorrelatedComponentsGiveUnionOfSpectra)
  {
    std::mt19937_64 rng(85);
    const Index nodes = 4, m = 10;
    const ParameterGrid grid(random_points(rng, m, 1), random_weights(rng, m));
    // component 0 lives on the first half of the samples, component 1 on the second
    MatrixXd c0 = random_matrix(rng, nodes, m), c1 = random_matrix(rng, nodes, m);
    c0.rightCols(m / 2).setZero();
    c1.leftCols(m / 2).setZero();
    MatrixXd stacked(2 * nodes, m);
    for (Index i = 0; i < nodes; ++i)
    {
      stacked.row(2 * i) = c0.row(i);
      stacked.row(2 * i + 1) = c1.row(i);
    }
    const auto sd = vector_kl(VectorFieldSet(SnapshotSet(stacked, grid), 2));
    const auto s0 = decompose(SnapshotSet(c0, grid));
    const auto s1 = decompose(SnapshotSet(c1, grid));
    VectorXd u(s0.rank() + s1.rank());
    u << s0.eigenvalues, s1.eigenvalues;
    ASSERT_EQ(sd.rank(), u.size());
    EXPECT_LE(rel_err(sd.eigenvalues, sorted(u)), 1e-10);
  }

  TEST(VectorKl, FullReconstructionAndKernelBlocks)
  {
    std::mt19937_64 rng(86);
    const auto s = random_snapshots(rng, 2 * 5, 7);
    const VectorFieldSet v(s, 2);
    const auto sd = vector_kl(v);
    EXPECT_LE((evaluate_all(full_model(sd, s)) - s.values()).cwiseAbs().maxCoeff(), 1e-8 * s.values().norm());

    for (Index i = 0; i < 7; ++i)
      for (Index j = 0; j < 7; ++j)
      {
        MatrixXd ref = MatrixXd::Zero(2, 2);
        for (Index node = 0; node < 5; ++node)
          for (Index k = 0; k < 2; ++k)
            for (Index l = 0; l < 2; ++l) ref(k, l) += s.values()(2 * node + k, i) * s.values()(2 * node + l, j);
        EXPECT_LE((v.kernel_block(i, j) - ref).norm(), 1e-12 * std::max(1.0, ref.norm()));
        // trace of the block is the scalar stacked kernel
        EXPECT_NEAR(v.kernel_block(i, j).trace(), s.values().col(i).dot(s.values().col(j)), 1e-12 * s.values().squaredNorm());
      }
  }

  TEST(VectorKl, OrthogonalBasisChangeInvariance)
  {
    std::mt19937_64 rng(87);
    const Index nodes = 4, ne = 3, m = 8;
    const auto s = random_snapshots(rng, nodes * ne, m);
    const MatrixXd q = random_orthonormal(rng, ne, ne);
    // basis r'_k = q r_k ; coefficients c' = q^T c per node keep the physical field fixed
    MatrixXd rotated = s.values();
    for (Index node = 0; node < nodes; ++node) rotated.middleRows(node * ne, ne) = q.transpose() * s.values().middleRows(node * ne, ne);
    const VectorFieldSet a(s, ne);
    const VectorFieldSet b(SnapshotSet(rotated, s.grid()), ne, q);
    EXPECT_LE((a.physical(s.values().col(2)) - b.physical(rotated.col(2))).norm(), 1e-12);
    EXPECT_LE(rel_err(vector_kl(b).eigenvalues, vector_kl(a).eigenvalues), 1e-10);
  }

  TEST(VectorKl, LayoutErrors)
  {
    std::mt19937_64 rng(88);
    EXPECT_THROW(VectorFieldSet(random_snapshots(rng, 5, 3), 2), DimensionError);
    EXPECT_THROW(VectorFieldSet(random_snapshots(rng, 4, 3), 2, MatrixXd::Ones(2, 2)), InvalidArgument);
  }

  TEST(SpdField, RejectsNonSpd)
  {
    MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    EXPECT_THROW(SPDFieldSet({MatrixXd::Identity(2, 2), a}), NotPositiveDefiniteError);
  }

  TEST(SpdField, LogCoefficientsReproduceSamples)
  {
    std::mt19937_64 rng(89);
    std::vector<MatrixXd> mats;
    for (int j = 0; j < 6; ++j) mats.push_back(random_spd(rng, 3));
    const SPDFieldSet f(mats);
    for (Index j = 0; j < 6; ++j)
      EXPECT_LE(rel_err(matrix_exp_sym(unpack_symmetric(f.log_coefficients().row(j).transpose(), 3)), mats[j]), 1e-10);
    EXPECT_LE((f.kernel_block(1, 2) - f.log_coefficients().row(1).transpose() * f.log_coefficients().row(2)).norm(), 1e-15);
  }

  TEST(SpdField, ConstantFieldIsMeanOnly)
  {
    std::mt19937_64 rng(90);
    const MatrixXd a0 = random_spd(rng, 3);
    const SPDFieldSet f(std::vector<MatrixXd>(5, a0));
    const auto grid = ParameterGrid::midpoint(5);
    const auto r = spd_field_reduce(f, grid, 2);
    EXPECT_EQ(r.model.truncation_rank, 0);
    EXPECT_TRUE(r.model.rank_clamped);
    for (Index j = 0; j < 5; ++j) EXPECT_LE(rel_err(r.evaluate(j), a0), 1e-12);

    const auto u = spd_field_reduce(f, grid, 1, false);
    EXPECT_EQ(u.model.truncation_rank, 1);
    for (Index j = 0; j < 5; ++j) EXPECT_LE(rel_err(u.evaluate(j), a0), 1e-12);
  }

  TEST(SpdField, DiagonalFieldHasOneMode)
  {
    const Index m = 8;
    std::vector<MatrixXd> mats;
    for (Index j = 0; j < m; ++j) mats.push_back(Eigen::Vector2d(std::exp(0.3 * double(j) - 1.0), 1.0).asDiagonal());
    const auto grid = ParameterGrid::midpoint(m);
    const auto r = spd_field_reduce(SPDFieldSet(mats), grid, 1);
    EXPECT_EQ(decompose(spd_log_snapshots(SPDFieldSet(mats), grid, true)).rank(), 1);
    for (Index j = 0; j < m; ++j) EXPECT_LE(rel_err(r.evaluate(j), mats[j]), 1e-12);
  }

  TEST(SpdField, PositiveAtEveryRank)
  {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 5; ++trial)
    {
      std::vector<MatrixXd> mats;
      for (int j = 0; j < 20; ++j) mats.push_back(random_spd(rng, 3));
      const ParameterGrid grid(random_points(rng, 20, 2), random_weights(rng, 20));
      const SPDFieldSet f(mats);
      for (Index n = 0; n <= packed_size(3); ++n)
      {
        const auto r = spd_field_reduce(f, grid, n);
        for (Index j = 0; j < 20; ++j)
        {
          const MatrixXd a = r.evaluate(j);
          EXPECT_LE((a - a.transpose()).norm(), 1e-14 * a.norm());
          EXPECT_GT(min_eigenvalue(a), 0.0);
          if (n == packed_size(3)) EXPECT_LE(rel_err(a, mats[j]), 1e-8);
        }
      }
    }
  }
}  // namespace
