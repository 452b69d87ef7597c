#include "paramkl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace paramkl::linalg
{

SymmetricEigen symmetric_eigen_descending(const MatrixXd& a)
{
  const Index n = a.rows();
  if (n == 0) return {VectorXd(0), MatrixXd(0, 0)};

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a);
  const VectorXd& ascending = solver.eigenvalues();
  const MatrixXd& vectors = solver.eigenvectors();

  SymmetricEigen out{VectorXd(n), MatrixXd(n, n)};
  for (Index k = 0; k < n; ++k)
  {
    out.values(k) = ascending(n - 1 - k);
    out.vectors.col(k) = vectors.col(n - 1 - k);
  }
  return out;
}

MatrixXd symmetrized(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double symmetry_defect(const MatrixXd& a)
{
  if (a.size() == 0) return 0;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

void normalize_signs(MatrixXd& modes, MatrixXd* companion)
{
  for (Index m = 0; m < modes.cols(); ++m)
  {
    Index arg = 0;
    modes.col(m).cwiseAbs().maxCoeff(&arg);
    if (modes(arg, m) < 0)
    {
      modes.col(m) *= -1;
      if (companion) companion->col(m) *= -1;
    }
  }
}

Index numerical_rank(const VectorXd& values, double cutoff)
{
  if (values.size() == 0 || !(values(0) > 0)) return 0;
  const double threshold = cutoff * values(0);
  Index r = 0;
  while (r < values.size() && values(r) > threshold) ++r;
  return r;
}

MatrixXd pseudo_inverse(const MatrixXd& a, double cutoff)
{
  if (a.size() == 0) return MatrixXd::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sigma = svd.singularValues();
  const Index r = numerical_rank(sigma, cutoff);
  if (r == 0) return MatrixXd::Zero(a.cols(), a.rows());
  return svd.matrixV().leftCols(r) * sigma.head(r).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

double relative_difference(const MatrixXd& a, const MatrixXd& b)
{
  const double scale = b.norm();
  const double diff = (a - b).norm();
  return scale > 0 ? diff / scale : diff;
}

}  // namespace paramkl::linalg
