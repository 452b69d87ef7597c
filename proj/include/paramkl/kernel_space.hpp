#pragma once

#include "paramkl/core_model.hpp"
#include "paramkl/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace paramkl
{

/// A kernel kappa(p1, p2) on the parameter set. The evaluator must be pure and re-entrant.
class KernelFunction
{
 public:
  using Evaluator = std::function<double(std::span<const double>, std::span<const double>)>;

  KernelFunction(std::string name, Evaluator evaluator, bool symmetric = true);

  double operator()(std::span<const double> p1, std::span<const double> p2) const
  {
    return evaluator_(p1, p2);
  }
  const std::string& name() const noexcept { return name_; }
  bool declared_symmetric() const noexcept { return symmetric_; }

  /// min(s, t) on scalar parameters.
  static KernelFunction brownian();
  /// exp(-a |p1 - p2|)
  static KernelFunction exponential(double a);
  /// exp(-a |p1 - p2|^2)
  static KernelFunction gaussian(double a);
  /// <r(p1), r(p2)>_U; defined on the snapshot grid points only.
  static KernelFunction snapshot_induced(const SnapshotSet& s);
  /// Built-in by name: "brownian", "exp", "gauss".
  static KernelFunction builtin(const std::string& name, double scale);

 private:
  std::string name_;
  Evaluator evaluator_;
  bool symmetric_;
};

/// Assembles K_ij = kappa(p_i, p_j).
MatrixXd assemble_kernel(const KernelFunction& k, const ParameterGrid& grid);

/// Max |kappa(p,q) - kappa(q,p)| over `pairs` random grid pairs (deterministic in seed).
double spot_check_symmetry(const KernelFunction& k, const ParameterGrid& grid, int pairs = 100,
    unsigned long long seed = 0);

struct NystromResult
{
  VectorXd eigenvalues;    ///< descending, non-negative
  MatrixXd eigenfunctions; ///< M x n samples, orthonormal in the weighted product
  ParameterGrid grid;
  bool clamped_negative = false;  ///< slightly negative eigenvalues were clamped to zero
};

/// Nystrom discretization of the Fredholm eigenproblem with the grid's own quadrature:
/// W^{1/2} K W^{1/2} q = lambda q, s = W^{-1/2} q. Returns at most `count` eigenpairs
/// above the shared rank cutoff.
NystromResult nystrom_eigensolve(const KernelFunction& k, const ParameterGrid& grid, Index count);

/// Same, from an assembled Gram matrix.
NystromResult nystrom_eigensolve(const MatrixXd& gram, const ParameterGrid& grid, Index count);

/// Off-grid extension s(p) = (1/lambda) sum_j w_j kappa(p, p_j) s(p_j) for every mode.
VectorXd nystrom_extend(const KernelFunction& k, const NystromResult& result,
    std::span<const double> p);

/// Mercer partial sum kappa_n(p_i, p_j) = sum_{m<n} lambda_m s_m(p_i) s_m(p_j).
MatrixXd mercer_reconstruct(const VectorXd& eigenvalues, const MatrixXd& eigenfunctions, Index n);

/// ||W^{1/2} A W^{1/2}||_F
double weighted_frobenius(const MatrixXd& a, const ParameterGrid& grid);

/// Samples g(p_i, x_l) of a feature map together with quadrature weights nu_l on X.
class FeatureMapSamples
{
 public:
  FeatureMapSamples(MatrixXd g_matrix, VectorXd x_weights);

  const MatrixXd& g_matrix() const noexcept { return g_; }
  const VectorXd& x_weights() const noexcept { return nu_; }
  Index feature_count() const noexcept { return nu_.size(); }

 private:
  MatrixXd g_;
  VectorXd nu_;
};

struct FeatureFactorization
{
  MatrixXd kernel;              ///< M x M, kappa(p_i,p_j) = sum_l nu_l g(p_i,x_l) g(p_j,x_l)
  VectorXd eigenvalues;         ///< kernel-side spectrum above cutoff
  MatrixXd parameter_modes;     ///< s_m, M x r
  MatrixXd chi_modes;           ///< chi_m(x_l), L x r, orthonormal in the nu-weighted product
  VectorXd feature_eigenvalues; ///< spectrum of X* X on the feature side
  double spectrum_discrepancy = 0;
  /// Present when snapshots were supplied: v_m for the table r(x) = sum sqrt(lambda_m) chi_m(x) v_m.
  std::optional<MatrixXd> spatial_modes;

  /// N x L matrix of r(x_l); requires spatial_modes.
  MatrixXd reconstruct_features() const;
};

/// Integral-transform factorization C_Q = X X* induced by a feature map.
/// When `snapshots` is given its kernel must agree with the feature kernel (1e-8 relative).
FeatureFactorization feature_factorize(const FeatureMapSamples& f, const ParameterGrid& grid,
    const SnapshotSet* snapshots = nullptr);

}  // namespace paramkl
