#pragma once

#include "paramkl/linalg.hpp"

#include <optional>
#include <span>
#include <vector>

namespace paramkl
{

/// Dense d-way tensor, row-major (last index fastest), zero-based indices.
class FullTensor
{
 public:
  FullTensor(std::vector<Index> dims, std::vector<double> data);
  static FullTensor zeros(std::vector<Index> dims);

  const std::vector<Index>& dims() const noexcept { return dims_; }
  Index order() const noexcept { return static_cast<Index>(dims_.size()); }
  Index size() const noexcept { return static_cast<Index>(data_.size()); }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Index linear_index(std::span<const Index> index) const;
  double at(std::span<const Index> index) const { return data_[linear_index(index)]; }
  double norm() const;

 private:
  std::vector<Index> dims_;
  std::vector<double> data_;
};

/// Contracts a coefficient tensor against one factor matrix per mode:
/// out(i_1..i_d) = sum_{l_1..l_d} coeff(l_1..l_d) prod_k factor_k(i_k, l_k).
FullTensor assemble_tensor(std::span<const MatrixXd> factors, const FullTensor& coefficients);

/// Core of shape (left_rank, mode_dim, right_rank), row-major.
struct TTCore
{
  Index left_rank = 1;
  Index mode_dim = 1;
  Index right_rank = 1;
  std::vector<double> data;

  double& operator()(Index a, Index i, Index b) { return data[(a * mode_dim + i) * right_rank + b]; }
  double operator()(Index a, Index i, Index b) const
  {
    return data[(a * mode_dim + i) * right_rank + b];
  }
  /// Slice for a fixed mode index as a left_rank x right_rank matrix.
  MatrixXd slice(Index i) const;
};

struct TTRepresentation
{
  std::vector<TTCore> cores;
  /// Singular values dropped at each split by the decomposition that produced this train.
  std::vector<std::vector<double>> discarded;

  Index order() const noexcept { return static_cast<Index>(cores.size()); }
  std::vector<Index> mode_dims() const;
  /// Interior ranks r_1..r_{d-1}.
  std::vector<Index> ranks() const;
  /// Throws InvalidArgument on inconsistent neighbouring ranks or boundary ranks != 1.
  void validate() const;
  /// max over cores 1..d-1 of |U^T U - I| for the left unfolding U.
  double left_orthogonality_defect() const;
};

struct TTOptions
{
  double tolerance = 0;            ///< relative Frobenius target
  std::optional<Index> max_rank;
  /// Singular values at or below rank_cutoff * ||t||_F count as numerically zero.
  double rank_cutoff = kRankCutoff;
};

/// Sequential-SVD sweep; each split discards at most tol^2 ||t||^2 / (d-1) of energy.
TTRepresentation tt_decompose(const FullTensor& t, const TTOptions& options = {});

/// Refuses (InvalidArgument) when the full tensor would exceed 1e8 entries.
FullTensor tt_reconstruct(const TTRepresentation& tt);

/// Product of core slices; never materializes the full tensor.
double tt_eval(const TTRepresentation& tt, std::span<const Index> index);

/// sqrt of the total discarded squared singular values.
double tt_error_bound(const std::vector<std::vector<double>>& discarded);

inline constexpr Index kMaxReconstructEntries = 100'000'000;

}  // namespace paramkl
