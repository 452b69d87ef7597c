#pragma once

#include "paramkl/core_model.hpp"
#include "paramkl/spectral.hpp"

#include <vector>

namespace paramkl
{

/// exp of a symmetric matrix through its eigendecomposition.
MatrixXd matrix_exp_sym(const MatrixXd& h);
/// log of a symmetric positive definite matrix; throws NotPositiveDefiniteError naming the
/// offending eigenvalue.
MatrixXd matrix_log_spd(const MatrixXd& a);
/// exp of a skew-symmetric matrix; the result is a rotation.
MatrixXd matrix_exp_skew(const MatrixXd& s);

/// Number of packed coordinates of an n x n symmetric matrix.
constexpr Index packed_size(Index n) noexcept { return n * (n + 1) / 2; }

/// Row-major upper triangle with off-diagonal entries scaled by sqrt(2), so that the
/// Euclidean norm of the packed vector equals the Frobenius norm.
VectorXd pack_symmetric(const MatrixXd& h);
MatrixXd unpack_symmetric(const VectorXd& packed, Index n);

/// Vector-valued snapshots, rows stacked node-major with the component index fastest
/// (row = node * components + k). Values are coefficients in `component_basis`.
class VectorFieldSet
{
 public:
  VectorFieldSet(SnapshotSet base, Index components, MatrixXd component_basis = {});

  const SnapshotSet& base() const noexcept { return base_; }
  Index components() const noexcept { return components_; }
  Index nodes() const noexcept { return base_.state_dim() / components_; }
  const MatrixXd& component_basis() const noexcept { return basis_; }

  /// Matrix-valued kernel kappa_E(p_i, p_j), components x components.
  MatrixXd kernel_block(Index i, Index j) const;
  /// Column j as nodes x components coefficients.
  MatrixXd unpack(const VectorXd& stacked) const;
  /// Physical vectors (basis applied) for a stacked column, nodes x components.
  MatrixXd physical(const VectorXd& stacked) const;

 private:
  SnapshotSet base_;
  Index components_;
  MatrixXd basis_;
};

/// KL of the stacked coefficient field.
SpectralData vector_kl(const VectorFieldSet& v, const DecomposeOptions& options = {});

/// M samples of n x n SPD matrices and their packed matrix logarithms.
class SPDFieldSet
{
 public:
  /// Throws NotPositiveDefiniteError / InvalidArgument on a non-SPD sample.
  explicit SPDFieldSet(std::vector<MatrixXd> matrices);

  Index matrix_dim() const noexcept { return n_; }
  Index sample_count() const noexcept { return static_cast<Index>(matrices_.size()); }
  const std::vector<MatrixXd>& matrices() const noexcept { return matrices_; }
  /// M x packed_size(n)
  const MatrixXd& log_coefficients() const noexcept { return log_coefficients_; }
  /// Tensor-kernel block between samples i and j in packed coordinates.
  MatrixXd kernel_block(Index i, Index j) const;

 private:
  Index n_ = 0;
  std::vector<MatrixXd> matrices_;
  MatrixXd log_coefficients_;
};

/// Reduced log-Euclidean model: A_n(p_j) = exp(unpack(mean + sum_m sqrt(lambda_m) s_m(p_j) v_m)).
struct ReducedSPDField
{
  Index matrix_dim = 0;
  bool centered = true;
  VectorXd mean;  ///< packed log-mean (zero when not centered)
  ReducedModel model;

  MatrixXd evaluate(Index j) const;
  /// Packed log-coefficients at grid index j.
  VectorXd evaluate_log(Index j) const;
};

/// KL on the (optionally centered) packed log-coefficients, truncated to `rank`
/// (clamped to the numerical rank, flagged in model.rank_clamped).
ReducedSPDField spd_field_reduce(const SPDFieldSet& f, const ParameterGrid& grid, Index rank,
    bool center = true);

/// Snapshot view of the packed log-coefficients (packed_size(n) x M).
SnapshotSet spd_log_snapshots(const SPDFieldSet& f, const ParameterGrid& grid, bool center,
    VectorXd* mean_out = nullptr);

}  // namespace paramkl
