#pragma once

#include "paramkl/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace paramkl
{

/// Sample points of the parameter set together with quadrature weights.
///
/// The weights realize the parameter-side inner product
/// <phi, psi>_Q = sum_j w_j phi(p_j) psi(p_j).
/// Points are stored one per row (M x d_p).
class ParameterGrid
{
 public:
  /// Throws InvalidArgument on non-positive weights, duplicate points or length mismatch.
  ParameterGrid(MatrixXd points, VectorXd weights);

  /// Uniform weights 1/M.
  static ParameterGrid with_uniform_weights(MatrixXd points);

  /// Tensor-product midpoint rule on [0,1]^dim with points_per_dim nodes per axis.
  static ParameterGrid midpoint(Index points_per_dim, Index dim = 1);

  Index size() const noexcept { return weights_.size(); }
  Index dimension() const noexcept { return points_.cols(); }
  const MatrixXd& points() const noexcept { return points_; }
  const VectorXd& weights() const noexcept { return weights_; }

  /// Weighted inner product on parameter-side functions sampled on the grid.
  double inner_product(const VectorXd& phi, const VectorXd& psi) const;

 private:
  MatrixXd points_;
  VectorXd weights_;
};

/// The sampled parametric map: column j of `values` is r(p_j) in U = R^N.
class SnapshotSet
{
 public:
  SnapshotSet(MatrixXd values, ParameterGrid grid, std::string name = {},
      std::vector<std::string> labels = {});

  Index state_dim() const noexcept { return values_.rows(); }
  Index sample_count() const noexcept { return values_.cols(); }
  const MatrixXd& values() const noexcept { return values_; }
  const ParameterGrid& grid() const noexcept { return grid_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  MatrixXd values_;
  ParameterGrid grid_;
  std::string name_;
  std::vector<std::string> labels_;
};

/// Re-express snapshots so that the Euclidean product equals the mass-matrix product:
/// values are pre-multiplied by L^T where mass = L L^T.
SnapshotSet apply_mass_matrix(const SnapshotSet& s, const MatrixXd& mass);

/// SHA-256 over dimensions, values, points and weights (little-endian float64).
std::string fingerprint(const SnapshotSet& s);

/// The correlation C = R*R as an N x N symmetric positive semi-definite matrix.
class CorrelationMatrix
{
 public:
  /// Validates symmetry (1e-12 relative) and semi-definiteness (eigenvalues >= -1e-12 lambda_max).
  explicit CorrelationMatrix(MatrixXd entries);

  const MatrixXd& entries() const noexcept { return entries_; }
  Index size() const noexcept { return entries_.rows(); }

 private:
  struct Trusted
  {
  };
  CorrelationMatrix(MatrixXd entries, Trusted);
  friend CorrelationMatrix correlation(const SnapshotSet& s);

  MatrixXd entries_;
};

/// Gram matrix of the reproducing kernel on the grid, K_ij = <r(p_i), r(p_j)>_U.
class KernelGram
{
 public:
  explicit KernelGram(MatrixXd entries);

  const MatrixXd& entries() const noexcept { return entries_; }
  Index size() const noexcept { return entries_.rows(); }

 private:
  struct Trusted
  {
  };
  KernelGram(MatrixXd entries, Trusted);
  friend KernelGram kernel_gram(const SnapshotSet& s);

  MatrixXd entries_;
};

/// Checks that `a` is symmetric and positive semi-definite within the shared tolerances.
/// Throws InvalidArgument / NotPositiveDefiniteError otherwise.
void validate_symmetric_psd(const MatrixXd& a, const char* what);

/// (Ru)(p_j) = <r(p_j), u>, sampled on the grid. Weights are not applied.
VectorXd apply_map(const SnapshotSet& s, const VectorXd& u);

/// R* phi = sum_j w_j phi_j r(p_j), the adjoint with respect to the weighted product.
VectorXd apply_adjoint(const SnapshotSet& s, const VectorXd& phi);

/// C = sum_j w_j r(p_j) r(p_j)^T.
CorrelationMatrix correlation(const SnapshotSet& s);

/// K = U^T U (unweighted).
KernelGram kernel_gram(const SnapshotSet& s);

/// Evaluates <kappa(p_i, .), phi>_R through minimum-norm preimages under R.
/// By the reproducing property the result equals phi_i.
/// Throws NotInRangeError when phi is not (numerically) in the range of R.
double rkhs_reproduce(const SnapshotSet& s, const VectorXd& phi, Index i);

}  // namespace paramkl
