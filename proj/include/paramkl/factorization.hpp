#pragma once

#include "paramkl/core_model.hpp"
#include "paramkl/spectral.hpp"

#include <string>
#include <string_view>

namespace paramkl
{

enum class FactorKind
{
  canonical_R,
  cholesky,
  square_root,
  user,
};

std::string_view to_string(FactorKind kind);
FactorKind factor_kind_from_string(std::string_view name);

/// A factorization C = B^T B with B : U -> H, stored as an H_dim x N matrix.
struct Factor
{
  MatrixXd matrix;
  FactorKind kind = FactorKind::user;
  /// Hash of the correlation this factor was built from; empty when unknown.
  std::string correlation_hash;

  Index codomain_dim() const noexcept { return matrix.rows(); }
  Index state_dim() const noexcept { return matrix.cols(); }
};

/// SHA-256 of a correlation's entries.
std::string fingerprint(const CorrelationMatrix& c);

/// B = W^{1/2} U^T, the associated map itself viewed as a factor (H = Q).
Factor canonical_factor(const SnapshotSet& s);

/// Upper-triangular B = L^T from C = L L^T. Rank-deficient correlations use a pivoted
/// Cholesky run for exactly rank(C) steps and yield an r x N factor.
Factor cholesky_factor(const CorrelationMatrix& c);

/// The unique symmetric positive semi-definite factor C^{1/2} = V sqrt(Lambda) V^T.
Factor square_root_factor(const CorrelationMatrix& c);

/// Relative Frobenius residual ||B^T B - C|| / ||C||.
double factorization_residual(const Factor& b, const CorrelationMatrix& c);

/// A map X : H1 -> H2 with B2 = X B1, isometric on range(B1).
struct UnitaryMap
{
  MatrixXd matrix;      ///< H2_dim x H1_dim
  MatrixXd range_basis; ///< H1_dim x r orthonormal basis of range(B1)

  Index domain_rank() const noexcept { return range_basis.cols(); }
  /// ||(X^T X - I) P||_F with P the projector onto range(B1).
  double isometry_defect() const;
};

/// Throws CorrelationMismatchError when the correlations differ by more than 1e-8 relative.
UnitaryMap unitary_equivalence(const Factor& b1, const Factor& b2);

/// h_m = B C^{-1/2} v_m = B v_m / sqrt(lambda_m); columns are an orthonormal eigenbasis of B B^T.
MatrixXd cons_transport(const Factor& b, const SpectralData& sd);

/// KL table re-indexed by the factor's codomain: r(a) = sum_m sqrt(lambda_m) h_m(a) v_m.
struct FactorRepresentation
{
  VectorXd singular_values;  ///< sqrt(lambda_m)
  MatrixXd h_modes;          ///< H_dim x r
  MatrixXd spatial_modes;    ///< N x r
  FactorKind kind = FactorKind::user;

  /// N x H_dim matrix whose column a is r(a).
  MatrixXd reconstruct() const;
};

FactorRepresentation represent_from_factor(const Factor& b, const SpectralData& sd);

}  // namespace paramkl
