#include "paramkl/error.hpp"
#include "paramkl/spectral.hpp"
#include "paramkl/tensor.hpp"
#include "../test_support.hpp"

#include <gtest/gtest.h>

namespace
{
  using namespace paramkl;
  using namespace paramkl::testing;

  FullTensor random_tensor(std::mt19937_64& rng, std::vector<Index> dims)
  {
    Index n = 1;
    for (Index d : dims) n *= d;
    const VectorXd v = random_vector(rng, n);
    return FullTensor(dims, std::vector<double>(v.data(), v.data() + n));
  }

  double diff_norm(const FullTensor& a, const FullTensor& b)
  {
    double s = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
      s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    return std::sqrt(s);
  }

  /// Random TT with the given interior ranks.
  TTRepresentation random_tt(std::mt19937_64& rng, const std::vector<Index>& dims, const std::vector<Index>& ranks)
  {
    TTRepresentation tt;
    for (std::size_t k = 0; k < dims.size(); ++k)
    {
      TTCore c;
      c.left_rank = k == 0 ? 1 : ranks[k - 1];
      c.mode_dim = dims[k];
      c.right_rank = k + 1 == dims.size() ? 1 : ranks[k];
      const VectorXd v = random_vector(rng, c.left_rank * c.mode_dim * c.right_rank);
      c.data.assign(v.data(), v.data() + v.size());
      tt.cores.push_back(std::move(c));
    }
    return tt;
  }

  std::vector<Index> unravel(Index lin, const std::vector<Index>& dims)
  {
    std::vector<Index> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;)
    {
      idx[k] = lin % dims[k];
      lin /= dims[k];
    }
    return idx;
  }

  TEST(FullTensor, Invariants)
  {
    EXPECT_THROW(FullTensor({3}, std::vector<double>(3)), InvalidArgument);
    EXPECT_THROW(FullTensor({2, 3}, std::vector<double>(5)), DimensionError);
    EXPECT_THROW(FullTensor({2, 2}, {1, 2, std::nan(""), 4}), InvalidArgument);
    const FullTensor t({2, 3}, {0, 1, 2, 3, 4, 5});
    const Index idx[] = {1, 2};
    EXPECT_EQ(t.linear_index(idx), 5);
    EXPECT_EQ(t.at(idx), 5.0);
  }

  TEST(AssembleTensor, IdentityFactors)
  {
    std::mt19937_64 rng(61);
    const auto c = random_tensor(rng, {2, 3, 4});
    const MatrixXd f[] = {MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3), MatrixXd::Identity(4, 4)};
    EXPECT_EQ(assemble_tensor(f, c).data(), c.data());
  }

  TEST(AssembleTensor, RankOneIsOuterProduct)
  {
    std::mt19937_64 rng(62);
    const MatrixXd f[] = {random_matrix(rng, 3, 1), random_matrix(rng, 4, 1)};
    const auto t = assemble_tensor(f, FullTensor({1, 1}, {2.0}));
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j)
      {
        const Index idx[] = {i, j};
        EXPECT_NEAR(t.at(idx), 2.0 * f[0](i, 0) * f[1](j, 0), 1e-15);
      }
  }

  TEST(AssembleTensor, NestedLoopOracle)
  {
    std::mt19937_64 rng(63);
    const auto c = random_tensor(rng, {2, 3, 2});
    const MatrixXd f[] = {random_matrix(rng, 4, 2), random_matrix(rng, 3, 3), random_matrix(rng, 5, 2)};
    const auto t = assemble_tensor(f, c);
    ASSERT_EQ(t.dims(), (std::vector<Index>{4, 3, 5}));
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 3; ++j)
        for (Index k = 0; k < 5; ++k)
        {
          double ref = 0;
          for (Index a = 0; a < 2; ++a)
            for (Index b = 0; b < 3; ++b)
              for (Index g = 0; g < 2; ++g)
              {
                const Index ci[] = {a, b, g};
                ref += c.at(ci) * f[0](i, a) * f[1](j, b) * f[2](k, g);
              }
          const Index idx[] = {i, j, k};
          EXPECT_NEAR(t.at(idx), ref, 1e-12);
        }
    const MatrixXd bad[] = {random_matrix(rng, 4, 3), f[1], f[2]};
    EXPECT_THROW(assemble_tensor(bad, c), DimensionError);
  }

  TEST(TTDecompose, RankOneTensor)
  {
    std::mt19937_64 rng(64);
    const MatrixXd f[] = {random_matrix(rng, 3, 1), random_matrix(rng, 4, 1), random_matrix(rng, 5, 1)};
    const auto t = assemble_tensor(f, FullTensor({1, 1, 1}, {1.0}));
    const auto tt = tt_decompose(t);
    EXPECT_EQ(tt.ranks(), (std::vector<Index>{1, 1}));
    EXPECT_LE(diff_norm(tt_reconstruct(tt), t), 1e-12 * t.norm());
    const Index idx[] = {2, 1, 3};
    EXPECT_NEAR(tt_eval(tt, idx), f[0](2, 0) * f[1](1, 0) * f[2](3, 0), 1e-12);
  }

  TEST(TTDecompose, ExactAtZeroTolerance)
  {
    std::mt19937_64 rng(65);
    const auto t = random_tensor(rng, {4, 5, 6});
    const auto tt = tt_decompose(t);
    tt.validate();
    EXPECT_LE(diff_norm(tt_reconstruct(tt), t), 1e-12 * t.norm());
    EXPECT_LE(tt.left_orthogonality_defect(), 1e-10);
  }

  TEST(TTDecompose, RecoversConstructedRanks)
  {
    std::mt19937_64 rng(66);
    const auto t = tt_reconstruct(random_tt(rng, {4, 5, 6}, {2, 3}));
    const auto tt = tt_decompose(t);
    const auto r = tt.ranks();
    EXPECT_LE(r[0], 2);
    EXPECT_LE(r[1], 3);
    EXPECT_LE(diff_norm(tt_reconstruct(tt), t), 1e-12 * t.norm());
  }

  TEST(TTDecompose, ToleranceAndBound)
  {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 30; ++trial)
    {
      const auto t = random_tensor(rng, {3, 4, 3, 4});
      const double tau = 0.05 + 0.1 * trial / 30.0;
      const auto tt = tt_decompose(t, {tau, std::nullopt, kRankCutoff});
      const double err = diff_norm(tt_reconstruct(tt), t);
      EXPECT_LE(err, tau * t.norm() * (1 + 1e-12));
      EXPECT_LE(err, tt_error_bound(tt.discarded) * (1 + 1e-12) + 1e-12 * t.norm());
    }
  }

  TEST(TTDecompose, ErrorMonotoneInMaxRank)
  {
    std::mt19937_64 rng(68);
    const auto t = random_tensor(rng, {5, 5, 5});
    double prev = std::numeric_limits<double>::infinity();
    for (Index r = 1; r <= 5; ++r)
    {
      const double err = diff_norm(tt_reconstruct(tt_decompose(t, {0.0, r, kRankCutoff})), t);
      EXPECT_LE(err, prev * (1 + 1e-12));
      prev = err;
    }
    EXPECT_LE(prev, 1e-12 * t.norm());
  }

  TEST(TTDecompose, MatrixCaseMatchesSpectral)
  {
    std::mt19937_64 rng(69);
    const MatrixXd a = random_matrix(rng, 6, 4);
    std::vector<double> data(24);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 4; ++j) data[i * 4 + j] = a(i, j);
    const auto tt = tt_decompose(FullTensor({6, 4}, data));
    EXPECT_EQ(tt.ranks()[0], 4);
    // second core holds Sigma V^T
    const TTCore& c = tt.cores[1];
    MatrixXd sv(c.left_rank, c.mode_dim);
    for (Index r = 0; r < c.left_rank; ++r)
      for (Index j = 0; j < c.mode_dim; ++j) sv(r, j) = c(r, j, 0);
    const VectorXd sigma = Eigen::JacobiSVD<MatrixXd>(sv).singularValues();
    const auto sd = decompose(unit_weight_snapshots(a));
    EXPECT_LE(rel_err(sigma, sd.eigenvalues.cwiseSqrt()), 1e-10);
  }

  TEST(TTReconstruct, DegenerateAndZero)
  {
    TTRepresentation tt;
    tt.cores.push_back(TTCore{1, 2, 1, {2.0, 3.0}});
    tt.cores.push_back(TTCore{1, 3, 1, {1.0, 0.5, -1.0}});
    const auto t = tt_reconstruct(tt);
    EXPECT_EQ(t.data(), (std::vector<double>{2, 1, -2, 3, 1.5, -3}));

    std::mt19937_64 rng(70);
    auto z = random_tt(rng, {2, 3, 2}, {2, 2});
    for (auto& c : z.cores) std::fill(c.data.begin(), c.data.end(), 0.0);
    EXPECT_EQ(tt_reconstruct(z).norm(), 0.0);
    const Index idx[] = {1, 2, 0};
    EXPECT_EQ(tt_eval(z, idx), 0.0);
  }

  TEST(TTReconstruct, MemoryGuard)
  {
    TTRepresentation tt;
    for (int k = 0; k < 3; ++k) tt.cores.push_back(TTCore{1, 1000, 1, std::vector<double>(1000, 1.0)});
    EXPECT_THROW(tt_reconstruct(tt), InvalidArgument);
    const Index idx[] = {999, 0, 5};
    EXPECT_EQ(tt_eval(tt, idx), 1.0);
  }

  TEST(TTEval, MatchesReconstruction)
  {
    std::mt19937_64 rng(71);
    const std::vector<Index> dims{3, 4, 2, 5};
    const auto tt = random_tt(rng, dims, {2, 3, 2});
    const auto full = tt_reconstruct(tt);
    std::uniform_int_distribution<Index> pick(0, full.size() - 1);
    for (int i = 0; i < 100; ++i)
    {
      const auto idx = unravel(pick(rng), dims);
      EXPECT_NEAR(tt_eval(tt, idx), full.at(idx), 1e-12 * std::max(1.0, std::abs(full.at(idx))));
    }
    const Index bad[] = {3, 0, 0, 0};
    EXPECT_THROW(tt_eval(tt, bad), InvalidArgument);
    const Index short_idx[] = {0, 0};
    EXPECT_THROW(tt_eval(tt, short_idx), InvalidArgument);
  }

  TEST(TTErrorBound, Examples)
  {
    EXPECT_EQ(tt_error_bound({}), 0.0);
    EXPECT_EQ(tt_error_bound({{}, {}}), 0.0);
    EXPECT_DOUBLE_EQ(tt_error_bound({{0.5}}), 0.5);
    EXPECT_DOUBLE_EQ(tt_error_bound({{0.3}, {0.4}}), 0.5);
  }

  TEST(TTRepresentation, ValidateRejectsBrokenRanks)
  {
    TTRepresentation tt;
    tt.cores.push_back(TTCore{1, 2, 2, std::vector<double>(4)});
    tt.cores.push_back(TTCore{3, 2, 1, std::vector<double>(6)});
    EXPECT_THROW(tt.validate(), DimensionError);
  }
}  // namespace
