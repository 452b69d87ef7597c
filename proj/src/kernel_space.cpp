#include "paramkl/kernel_space.hpp"

#include "paramkl/error.hpp"
#include "paramkl/random.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace paramkl
{

KernelFunction::KernelFunction(std::string name, Evaluator evaluator, bool symmetric)
    : name_(std::move(name)), evaluator_(std::move(evaluator)), symmetric_(symmetric)
{
  if (!evaluator_) throw InvalidArgument("kernel evaluator must be callable");
}

namespace
{

double squared_distance(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw DimensionError("kernel arguments have different dimensions");
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

std::span<const double> row_span(const MatrixXd& points, Index i, std::vector<double>& buffer)
{
  buffer.resize(static_cast<std::size_t>(points.cols()));
  for (Index k = 0; k < points.cols(); ++k) buffer[static_cast<std::size_t>(k)] = points(i, k);
  return buffer;
}

}  // namespace

KernelFunction KernelFunction::brownian()
{
  return KernelFunction("brownian", [](std::span<const double> p1, std::span<const double> p2) {
    if (p1.size() != 1 || p2.size() != 1)
      throw DimensionError("brownian kernel is defined on scalar parameters");
    return std::min(p1[0], p2[0]);
  });
}

KernelFunction KernelFunction::exponential(double a)
{
  return KernelFunction("exp", [a](std::span<const double> p1, std::span<const double> p2) {
    return std::exp(-a * std::sqrt(squared_distance(p1, p2)));
  });
}

KernelFunction KernelFunction::gaussian(double a)
{
  return KernelFunction("gauss", [a](std::span<const double> p1, std::span<const double> p2) {
    return std::exp(-a * squared_distance(p1, p2));
  });
}

KernelFunction KernelFunction::snapshot_induced(const SnapshotSet& s)
{
  struct Lookup
  {
    MatrixXd values;
    std::map<std::vector<double>, Index> index;
  };
  auto table = std::make_shared<Lookup>();
  table->values = s.values();
  const MatrixXd& points = s.grid().points();
  std::vector<double> buf;
  for (Index j = 0; j < points.rows(); ++j)
  {
    auto p = row_span(points, j, buf);
    table->index.emplace(std::vector<double>(p.begin(), p.end()), j);
  }
  return KernelFunction("snapshot", [table](std::span<const double> p1, std::span<const double> p2) {
    auto find = [&](std::span<const double> p) {
      auto it = table->index.find(std::vector<double>(p.begin(), p.end()));
      if (it == table->index.end())
        throw InvalidArgument("snapshot-induced kernel evaluated off the snapshot grid");
      return it->second;
    };
    return table->values.col(find(p1)).dot(table->values.col(find(p2)));
  });
}

KernelFunction KernelFunction::builtin(const std::string& name, double scale)
{
  if (name == "brownian") return brownian();
  if (name == "exp") return exponential(scale);
  if (name == "gauss") return gaussian(scale);
  throw InvalidArgument("unknown kernel '" + name + "' (expected brownian, exp or gauss)");
}

MatrixXd assemble_kernel(const KernelFunction& k, const ParameterGrid& grid)
{
  const Index m = grid.size();
  const MatrixXd& points = grid.points();
  MatrixXd out(m, m);
  std::vector<double> bi, bj;
  for (Index i = 0; i < m; ++i)
  {
    auto pi = row_span(points, i, bi);
    for (Index j = 0; j < m; ++j) out(i, j) = k(pi, row_span(points, j, bj));
  }
  if (!out.allFinite()) throw InvalidArgument("kernel '" + k.name() + "' produced non-finite values");
  return out;
}

double spot_check_symmetry(const KernelFunction& k, const ParameterGrid& grid, int pairs,
    unsigned long long seed)
{
  NormalStream rng(seed);
  const Index m = grid.size();
  std::vector<double> ba, bb;
  double worst = 0;
  for (int t = 0; t < pairs; ++t)
  {
    const auto i = std::min<Index>(static_cast<Index>(rng.uniform() * double(m)), m - 1);
    const auto j = std::min<Index>(static_cast<Index>(rng.uniform() * double(m)), m - 1);
    auto pi = row_span(grid.points(), i, ba);
    auto pj = row_span(grid.points(), j, bb);
    worst = std::max(worst, std::abs(k(pi, pj) - k(pj, pi)));
  }
  return worst;
}

NystromResult nystrom_eigensolve(const MatrixXd& gram, const ParameterGrid& grid, Index count)
{
  const Index m = grid.size();
  if (gram.rows() != m || gram.cols() != m)
    throw DimensionError("nystrom_eigensolve: Gram matrix must be M x M for the grid");
  if (count < 0 || count > m)
  {
    std::ostringstream msg;
    msg << "nystrom_eigensolve: requested " << count << " eigenpairs on a grid of " << m
        << " points";
    throw InvalidArgument(msg.str());
  }
  const double defect = linalg::symmetry_defect(gram);
  if (defect > 1e-12)
  {
    std::ostringstream msg;
    msg << "nystrom_eigensolve: kernel is not symmetric on the grid (relative defect " << defect
        << ")";
    throw InvalidArgument(msg.str());
  }

  const VectorXd sqrt_w = grid.weights().cwiseSqrt();
  const MatrixXd weighted = linalg::symmetrized(sqrt_w.asDiagonal() * gram * sqrt_w.asDiagonal());
  const auto eig = linalg::symmetric_eigen_descending(weighted);

  NystromResult result{VectorXd(0), MatrixXd(m, 0), grid, false};
  const double lmax = eig.values(0);
  const double lmin = eig.values(m - 1);
  if (lmin < 0)
  {
    if (lmin < -kRankCutoff * std::max(lmax, 0.0))
    {
      std::ostringstream msg;
      msg << "nystrom_eigensolve: kernel is not positive semi-definite on the grid (eigenvalue "
          << lmin << ", largest " << lmax << ")";
      throw NotPositiveDefiniteError(msg.str());
    }
    result.clamped_negative = true;
  }

  const Index r = std::min(count, linalg::numerical_rank(eig.values, kRankCutoff));
  result.eigenvalues = eig.values.head(r);
  result.eigenfunctions = sqrt_w.cwiseInverse().asDiagonal() * eig.vectors.leftCols(r);
  linalg::normalize_signs(result.eigenfunctions);
  return result;
}

NystromResult nystrom_eigensolve(const KernelFunction& k, const ParameterGrid& grid, Index count)
{
  return nystrom_eigensolve(assemble_kernel(k, grid), grid, count);
}

VectorXd nystrom_extend(const KernelFunction& k, const NystromResult& result,
    std::span<const double> p)
{
  const ParameterGrid& grid = result.grid;
  if (static_cast<Index>(p.size()) != grid.dimension())
    throw DimensionError("nystrom_extend: point has the wrong dimension");
  const Index m = grid.size();
  VectorXd kernel_row(m);
  std::vector<double> buf;
  for (Index j = 0; j < m; ++j) kernel_row(j) = k(p, row_span(grid.points(), j, buf));
  const VectorXd weighted = grid.weights().cwiseProduct(kernel_row);
  return (result.eigenfunctions.transpose() * weighted).cwiseQuotient(result.eigenvalues);
}

MatrixXd mercer_reconstruct(const VectorXd& eigenvalues, const MatrixXd& eigenfunctions, Index n)
{
  if (eigenfunctions.cols() != eigenvalues.size())
    throw DimensionError("mercer_reconstruct: eigenfunction count differs from eigenvalue count");
  if (n < 0 || n > eigenvalues.size())
  {
    std::ostringstream msg;
    msg << "mercer_reconstruct: requested " << n << " terms, " << eigenvalues.size()
        << " available";
    throw DimensionError(msg.str());
  }
  const auto s = eigenfunctions.leftCols(n);
  return s * eigenvalues.head(n).asDiagonal() * s.transpose();
}

double weighted_frobenius(const MatrixXd& a, const ParameterGrid& grid)
{
  if (a.rows() != grid.size() || a.cols() != grid.size())
    throw DimensionError("weighted_frobenius: matrix must be M x M");
  const VectorXd sqrt_w = grid.weights().cwiseSqrt();
  return (sqrt_w.asDiagonal() * a * sqrt_w.asDiagonal()).norm();
}

FeatureMapSamples::FeatureMapSamples(MatrixXd g_matrix, VectorXd x_weights)
    : g_(std::move(g_matrix)), nu_(std::move(x_weights))
{
  if (g_.cols() != nu_.size())
    throw DimensionError("feature samples: g has " + std::to_string(g_.cols()) +
                         " columns but there are " + std::to_string(nu_.size()) + " weights");
  if (!g_.allFinite()) throw InvalidArgument("feature samples must be finite");
  for (Index l = 0; l < nu_.size(); ++l)
    if (!(nu_(l) > 0) || !std::isfinite(nu_(l)))
      throw InvalidArgument("feature-space weights must be positive and finite");
}

MatrixXd FeatureFactorization::reconstruct_features() const
{
  if (!spatial_modes) throw InvalidArgument("feature factorization was built without snapshots");
  return *spatial_modes * eigenvalues.cwiseSqrt().asDiagonal() * chi_modes.transpose();
}

FeatureFactorization feature_factorize(const FeatureMapSamples& f, const ParameterGrid& grid,
    const SnapshotSet* snapshots)
{
  const Index m = grid.size();
  const MatrixXd& g = f.g_matrix();
  const VectorXd& nu = f.x_weights();
  if (g.rows() != m)
  {
    std::ostringstream msg;
    msg << "feature_factorize: g has " << g.rows() << " rows but the grid has " << m << " points";
    throw DimensionError(msg.str());
  }
  const VectorXd& w = grid.weights();
  const VectorXd sqrt_w = w.cwiseSqrt();
  const VectorXd sqrt_nu = nu.cwiseSqrt();

  FeatureFactorization out;
  out.kernel = linalg::symmetrized(g * nu.asDiagonal() * g.transpose());

  // Kernel side: C_Q = X X* in the weighted coordinates on the grid.
  const auto kernel_eig = linalg::symmetric_eigen_descending(
      linalg::symmetrized(sqrt_w.asDiagonal() * out.kernel * sqrt_w.asDiagonal()));
  const Index r = linalg::numerical_rank(kernel_eig.values, kRankCutoff);
  out.eigenvalues = kernel_eig.values.head(r);
  out.parameter_modes = sqrt_w.cwiseInverse().asDiagonal() * kernel_eig.vectors.leftCols(r);
  linalg::normalize_signs(out.parameter_modes);

  // Feature side: X* X in nu-orthonormal coordinates on X.
  const MatrixXd feature_op = linalg::symmetrized(
      sqrt_nu.asDiagonal() * g.transpose() * w.asDiagonal() * g * sqrt_nu.asDiagonal());
  const auto feature_eig = linalg::symmetric_eigen_descending(feature_op);
  const Index rf = linalg::numerical_rank(feature_eig.values, kRankCutoff);
  out.feature_eigenvalues = feature_eig.values.head(rf);

  if (r > 0)
  {
    const Index common = std::min(r, rf);
    double worst = 0;
    for (Index k = 0; k < std::max(r, rf); ++k)
    {
      const double a = k < r ? out.eigenvalues(k) : 0.0;
      const double b = k < rf ? out.feature_eigenvalues(k) : 0.0;
      worst = std::max(worst, std::abs(a - b));
    }
    out.spectrum_discrepancy = worst / out.eigenvalues(0);
    if (out.spectrum_discrepancy > 1e-8)
    {
      std::ostringstream msg;
      msg << "feature_factorize: kernel-side and feature-side spectra disagree (relative "
          << out.spectrum_discrepancy << ", common rank " << common << ")";
      throw Error(msg.str());
    }
  }

  const VectorXd inv_sqrt_lambda = out.eigenvalues.cwiseSqrt().cwiseInverse();
  out.chi_modes = g.transpose() * w.asDiagonal() * out.parameter_modes * inv_sqrt_lambda.asDiagonal();

  if (snapshots)
  {
    if (snapshots->sample_count() != m)
      throw DimensionError("feature_factorize: snapshot set and grid sizes differ");
    const MatrixXd k_snap = snapshots->values().transpose() * snapshots->values();
    const double mismatch = linalg::relative_difference(k_snap, out.kernel);
    if (mismatch > 1e-8)
    {
      std::ostringstream msg;
      msg << "feature_factorize: snapshot kernel differs from the feature kernel (relative "
          << mismatch << ")";
      throw CorrelationMismatchError(msg.str(), mismatch);
    }
    out.spatial_modes = snapshots->values() * w.asDiagonal() * out.parameter_modes *
                        inv_sqrt_lambda.asDiagonal();
  }
  return out;
}

}  // namespace paramkl
