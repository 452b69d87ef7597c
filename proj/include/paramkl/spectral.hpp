#pragma once

#include "paramkl/core_model.hpp"

#include <optional>
#include <string>

namespace paramkl
{

/// SVD triplet of the associated map: eigenvalues of the correlation (descending),
/// spatial modes v_m (N x r, orthonormal) and parameter modes s_m (M x r, orthonormal
/// in the weighted product) sampled on the grid.
struct SpectralData
{
  VectorXd eigenvalues;
  MatrixXd spatial_modes;
  MatrixXd parameter_modes;
  ParameterGrid grid;

  Index rank() const noexcept { return eigenvalues.size(); }
  Index state_dim() const noexcept { return spatial_modes.rows(); }
  Index sample_count() const noexcept { return parameter_modes.rows(); }
  double total_energy() const { return eigenvalues.sum(); }

  /// Rank-one projector v_m v_m^T.
  MatrixXd spectral_projector(Index m) const;
};

enum class DecompositionMethod
{
  snapshots,    ///< M x M weighted Gram eigenproblem
  correlation,  ///< N x N correlation eigenproblem
};

struct DecomposeOptions
{
  DecompositionMethod method = DecompositionMethod::snapshots;
  double rank_cutoff = kRankCutoff;
  /// Eigenvalues at or below this absolute energy are dropped as well.
  double energy_floor = 0;
};

/// Karhunen-Loeve / POD of a snapshot set. An all-zero set yields rank 0.
SpectralData decompose(const SnapshotSet& s, const DecomposeOptions& options = {});

/// Deviations of a SpectralData from its defining identities.
struct SpectralInvariantReport
{
  double spatial_orthonormality = 0;    ///< max |V^T V - I|
  double parameter_orthonormality = 0;  ///< max |S^T W S - I|
  double svd_consistency = 0;           ///< max_m ||R* s_m - sqrt(lambda_m) v_m|| / sqrt(lambda_1)
  bool descending = true;
  bool positive = true;

  bool ok(double ortho_tol = 1e-10, double svd_tol = 1e-8) const;
};

SpectralInvariantReport check_invariants(const SpectralData& sd, const SnapshotSet& s);

/// Best n-term truncation of a KL expansion.
struct ReducedModel
{
  SpectralData spectral;
  Index truncation_rank = 0;
  double tail_energy = 0;
  std::string source_name{};
  std::string source_hash{};
  /// Set when a requested rank exceeded the available rank and was clamped.
  bool rank_clamped = false;

  double retained_energy() const { return spectral.eigenvalues.sum(); }
  double total_energy() const { return retained_energy() + tail_energy; }
  /// sqrt of the discarded energy: the L2(w) x U approximation error.
  double error_estimate() const;
};

/// Either an explicit rank or a relative tail tolerance tau (smallest n with
/// sum_{m>n} lambda_m <= tau^2 sum_m lambda_m). Exactly one must be given.
struct TruncationRule
{
  std::optional<Index> rank;
  std::optional<double> tolerance;
};

ReducedModel truncate(const SpectralData& sd, const TruncationRule& rule,
    std::string source_name = {}, std::string source_hash = {});

/// Truncates an already reduced model further; the existing tail is carried over.
ReducedModel truncate(const ReducedModel& rm, const TruncationRule& rule);

/// Full-rank model wrapping a decomposition of `s`, with provenance filled in.
ReducedModel full_model(const SpectralData& sd, const SnapshotSet& s);

/// r_n(p_j) = sum_{m<=n} sqrt(lambda_m) S_jm v_m.
VectorXd evaluate(const ReducedModel& rm, Index j);

/// All grid reconstructions as an N x M matrix.
MatrixXd evaluate_all(const ReducedModel& rm);

/// sqrt(sum_j w_j ||r(p_j) - r_n(p_j)||^2).
double reconstruction_error(const ReducedModel& rm, const SnapshotSet& s);

/// Same weighted error for an arbitrary orthonormal basis (N x n): the projection error
/// of the snapshots onto span(basis).
double projection_error(const MatrixXd& orthonormal_basis, const SnapshotSet& s);

}  // namespace paramkl
