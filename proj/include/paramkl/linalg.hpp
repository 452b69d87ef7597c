#pragma once

#include <Eigen/Dense>

namespace paramkl
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Shared relative cutoff for numerical rank decisions (relative to the largest eigenvalue).
inline constexpr double kRankCutoff = 1e-12;

namespace linalg
{

/// Eigenpairs of a symmetric matrix sorted by descending eigenvalue.
struct SymmetricEigen
{
  VectorXd values;
  MatrixXd vectors;
};

SymmetricEigen symmetric_eigen_descending(const MatrixXd& a);

/// (A + A^T) / 2
MatrixXd symmetrized(const MatrixXd& a);

/// max |A - A^T| / max |A|; zero for the zero matrix.
double symmetry_defect(const MatrixXd& a);

/// Flip columns of `modes` so that each column's largest-magnitude entry is positive.
/// The same sign flip is applied to the matching column of `companion` when given.
void normalize_signs(MatrixXd& modes, MatrixXd* companion = nullptr);

/// Number of leading (descending) values strictly above cutoff * values(0).
Index numerical_rank(const VectorXd& descending_values, double cutoff = kRankCutoff);

/// Moore-Penrose pseudo-inverse with singular values below cutoff * sigma_max treated as zero.
MatrixXd pseudo_inverse(const MatrixXd& a, double cutoff = kRankCutoff);

/// ||a - b||_F / ||b||_F, or ||a||_F if b is zero.
double relative_difference(const MatrixXd& a, const MatrixXd& b);

}  // namespace linalg
}  // namespace paramkl
