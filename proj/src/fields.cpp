#include "paramkl/fields.hpp"

#include "paramkl/error.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace paramkl
{

namespace
{

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_square(const MatrixXd& a, const char* op)
{
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionError(std::string(op) + ": matrix must be square and non-empty");
  if (!a.allFinite()) throw InvalidArgument(std::string(op) + ": matrix must be finite");
}

void require_symmetric(const MatrixXd& a, const char* op)
{
  require_square(a, op);
  const double defect = linalg::symmetry_defect(a);
  if (defect > 1e-12)
  {
    std::ostringstream msg;
    msg << op << ": matrix is not symmetric (relative defect " << defect << ")";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

MatrixXd matrix_exp_sym(const MatrixXd& h)
{
  require_symmetric(h, "matrix_exp_sym");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(linalg::symmetrized(h));
  const VectorXd e = eig.eigenvalues().array().exp();
  return linalg::symmetrized(eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose());
}

MatrixXd matrix_log_spd(const MatrixXd& a)
{
  require_symmetric(a, "matrix_log_spd");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(linalg::symmetrized(a));
  const VectorXd& ev = eig.eigenvalues();
  const double lmax = ev.maxCoeff();
  const double lmin = ev.minCoeff();
  if (!(lmin > 1e-14 * lmax) || !(lmax > 0))
  {
    std::ostringstream msg;
    msg << "matrix_log_spd: matrix is not positive definite (eigenvalue " << lmin
        << ", largest " << lmax << ")";
    throw NotPositiveDefiniteError(msg.str());
  }
  const VectorXd l = ev.array().log();
  return linalg::symmetrized(eig.eigenvectors() * l.asDiagonal() * eig.eigenvectors().transpose());
}

MatrixXd matrix_exp_skew(const MatrixXd& s)
{
  require_square(s, "matrix_exp_skew");
  const double defect = (s + s.transpose()).norm();
  if (defect > 1e-12 * std::max(1.0, s.norm()))
  {
    std::ostringstream msg;
    msg << "matrix_exp_skew: matrix is not skew-symmetric (||S + S^T|| = " << defect << ")";
    throw InvalidArgument(msg.str());
  }
  // i S is Hermitian: i S = U D U^H, so exp(S) = U exp(-i D) U^H.
  using Complex = std::complex<double>;
  const Eigen::MatrixXcd skew = 0.5 * (s - s.transpose()).cast<Complex>();
  const Eigen::MatrixXcd hermitian = Complex(0, 1) * skew;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitian);
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * Complex(0, -1)).array().exp();
  const Eigen::MatrixXcd q = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  return q.real();
}

VectorXd pack_symmetric(const MatrixXd& h)
{
  require_square(h, "pack_symmetric");
  const Index n = h.rows();
  VectorXd out(packed_size(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) out(k++) = i == j ? h(i, j) : std::numbers::sqrt2 * h(i, j);
  return out;
}

MatrixXd unpack_symmetric(const VectorXd& packed, Index n)
{
  if (packed.size() != packed_size(n))
    throw DimensionError("unpack_symmetric: packed vector has the wrong length");
  MatrixXd h(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j)
    {
      const double v = i == j ? packed(k) : packed(k) / std::numbers::sqrt2;
      h(i, j) = v;
      h(j, i) = v;
      ++k;
    }
  return h;
}

VectorFieldSet::VectorFieldSet(SnapshotSet base, Index components, MatrixXd component_basis)
    : base_(std::move(base)), components_(components), basis_(std::move(component_basis))
{
  if (components_ < 1) throw InvalidArgument("vector field needs at least one component");
  if (base_.state_dim() % components_ != 0)
  {
    std::ostringstream msg;
    msg << "vector field: " << base_.state_dim() << " rows are not divisible by " << components_
        << " components";
    throw DimensionError(msg.str());
  }
  if (basis_.size() == 0) basis_ = MatrixXd::Identity(components_, components_);
  if (basis_.rows() != components_ || basis_.cols() != components_)
    throw DimensionError("vector field: component basis must be components x components");
  Eigen::JacobiSVD<MatrixXd> svd(basis_);
  const VectorXd& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
    throw InvalidArgument("vector field: component basis is not full rank");
}

MatrixXd VectorFieldSet::unpack(const VectorXd& stacked) const
{
  if (stacked.size() != base_.state_dim())
    throw DimensionError("vector field: stacked vector has the wrong length");
  return Eigen::Map<const RowMatrix>(stacked.data(), nodes(), components_);
}

MatrixXd VectorFieldSet::physical(const VectorXd& stacked) const
{
  return unpack(stacked) * basis_.transpose();
}

MatrixXd VectorFieldSet::kernel_block(Index i, Index j) const
{
  const Index m = base_.sample_count();
  if (i < 0 || j < 0 || i >= m || j >= m) throw InvalidArgument("kernel_block: index out of range");
  return unpack(base_.values().col(i)).transpose() * unpack(base_.values().col(j));
}

SpectralData vector_kl(const VectorFieldSet& v, const DecomposeOptions& options)
{
  return decompose(v.base(), options);
}

SPDFieldSet::SPDFieldSet(std::vector<MatrixXd> matrices) : matrices_(std::move(matrices))
{
  if (matrices_.empty()) throw InvalidArgument("SPD field needs at least one sample");
  n_ = matrices_.front().rows();
  log_coefficients_.resize(static_cast<Index>(matrices_.size()), packed_size(n_));
  for (std::size_t j = 0; j < matrices_.size(); ++j)
  {
    const MatrixXd& a = matrices_[j];
    if (a.rows() != n_ || a.cols() != n_)
      throw DimensionError("SPD field sample " + std::to_string(j) + " has the wrong shape");
    try
    {
      log_coefficients_.row(static_cast<Index>(j)) = pack_symmetric(matrix_log_spd(a)).transpose();
    }
    catch (const Error& e)
    {
      throw NotPositiveDefiniteError("SPD field sample " + std::to_string(j) + ": " + e.what());
    }
  }
}

MatrixXd SPDFieldSet::kernel_block(Index i, Index j) const
{
  const Index m = sample_count();
  if (i < 0 || j < 0 || i >= m || j >= m) throw InvalidArgument("kernel_block: index out of range");
  return log_coefficients_.row(i).transpose() * log_coefficients_.row(j);
}

VectorXd ReducedSPDField::evaluate_log(Index j) const { return mean + paramkl::evaluate(model, j); }

MatrixXd ReducedSPDField::evaluate(Index j) const
{
  return matrix_exp_sym(unpack_symmetric(evaluate_log(j), matrix_dim));
}

SnapshotSet spd_log_snapshots(const SPDFieldSet& f, const ParameterGrid& grid, bool center,
    VectorXd* mean_out)
{
  if (grid.size() != f.sample_count())
    throw DimensionError("SPD field: grid has " + std::to_string(grid.size()) + " points but there are " +
                         std::to_string(f.sample_count()) + " samples");
  MatrixXd values = f.log_coefficients().transpose();
  VectorXd mean = VectorXd::Zero(values.rows());
  if (center)
  {
    const VectorXd& w = grid.weights();
    mean = values * w / w.sum();
    values.colwise() -= mean;
  }
  if (mean_out) *mean_out = mean;
  return SnapshotSet(std::move(values), grid, "spd-log");
}

ReducedSPDField spd_field_reduce(const SPDFieldSet& f, const ParameterGrid& grid, Index rank,
    bool center)
{
  if (rank < 0) throw InvalidArgument("spd_field_reduce: rank must be non-negative");
  VectorXd mean;
  const SnapshotSet logs = spd_log_snapshots(f, grid, center, &mean);
  // floor relative to the uncentered log energy
  DecomposeOptions opt;
  opt.energy_floor =
      kRankCutoff * (f.log_coefficients().transpose() * grid.weights().asDiagonal() *
                     f.log_coefficients()).trace();
  const SpectralData sd = decompose(logs, opt);
  return ReducedSPDField{f.matrix_dim(), center, std::move(mean),
      truncate(sd, TruncationRule{rank, std::nullopt}, logs.name(), fingerprint(logs))};
}

}  // namespace paramkl
