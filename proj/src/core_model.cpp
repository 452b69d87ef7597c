#include "paramkl/core_model.hpp"

#include "paramkl/error.hpp"
#include "paramkl/hash.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace paramkl
{

namespace
{

constexpr double kPointTolerance = 1e-14;

void require_distinct(const MatrixXd& points)
{
  const Index m = points.rows();
  if (m < 2 || points.cols() == 0) return;
  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
      [&](Index a, Index b) { return points(a, 0) < points(b, 0); });
  for (Index a = 0; a < m; ++a)
  {
    for (Index b = a + 1; b < m; ++b)
    {
      const Index i = order[a];
      const Index j = order[b];
      if (points(j, 0) - points(i, 0) > kPointTolerance) break;
      if ((points.row(i) - points.row(j)).cwiseAbs().maxCoeff() <= kPointTolerance)
      {
        std::ostringstream msg;
        msg << "parameter grid points " << std::min(i, j) << " and " << std::max(i, j)
            << " coincide";
        throw InvalidArgument(msg.str());
      }
    }
  }
}

}  // namespace

ParameterGrid::ParameterGrid(MatrixXd points, VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights))
{
  if (points_.rows() != weights_.size())
  {
    std::ostringstream msg;
    msg << "parameter grid has " << points_.rows() << " points but " << weights_.size()
        << " weights";
    throw DimensionError(msg.str());
  }
  if (weights_.size() < 1) throw InvalidArgument("parameter grid must have at least one point");
  if (points_.cols() < 1) throw InvalidArgument("parameter dimension must be at least 1");
  if (!points_.allFinite()) throw InvalidArgument("parameter grid points must be finite");
  for (Index j = 0; j < weights_.size(); ++j)
  {
    if (!(weights_(j) > 0) || !std::isfinite(weights_(j)))
    {
      std::ostringstream msg;
      msg << "quadrature weight " << j << " must be positive and finite (got " << weights_(j)
          << ")";
      throw InvalidArgument(msg.str());
    }
  }
  require_distinct(points_);
}

ParameterGrid ParameterGrid::with_uniform_weights(MatrixXd points)
{
  const Index m = points.rows();
  VectorXd w = VectorXd::Constant(m, m > 0 ? 1.0 / static_cast<double>(m) : 0.0);
  return ParameterGrid(std::move(points), std::move(w));
}

ParameterGrid ParameterGrid::midpoint(Index points_per_dim, Index dim)
{
  if (points_per_dim < 1 || dim < 1)
    throw InvalidArgument("midpoint grid needs at least one node and dimension >= 1");
  Index total = 1;
  for (Index k = 0; k < dim; ++k) total *= points_per_dim;
  MatrixXd points(total, dim);
  const double h = 1.0 / static_cast<double>(points_per_dim);
  for (Index j = 0; j < total; ++j)
  {
    Index rest = j;
    for (Index k = dim - 1; k >= 0; --k)
    {
      points(j, k) = (static_cast<double>(rest % points_per_dim) + 0.5) * h;
      rest /= points_per_dim;
    }
  }
  VectorXd w = VectorXd::Constant(total, std::pow(h, static_cast<double>(dim)));
  return ParameterGrid(std::move(points), std::move(w));
}

double ParameterGrid::inner_product(const VectorXd& phi, const VectorXd& psi) const
{
  if (phi.size() != size() || psi.size() != size())
    throw DimensionError("parameter-side vectors must have one entry per grid point");
  return (weights_.array() * phi.array() * psi.array()).sum();
}

SnapshotSet::SnapshotSet(MatrixXd values, ParameterGrid grid, std::string name,
    std::vector<std::string> labels)
    : values_(std::move(values)), grid_(std::move(grid)), name_(std::move(name)),
      labels_(std::move(labels))
{
  if (values_.rows() < 1 || values_.cols() < 1)
    throw InvalidArgument("snapshot set needs N >= 1 and M >= 1");
  if (values_.cols() != grid_.size())
  {
    std::ostringstream msg;
    msg << "snapshot set has " << values_.cols() << " columns but the grid has " << grid_.size()
        << " points";
    throw DimensionError(msg.str());
  }
  if (!values_.allFinite()) throw InvalidArgument("snapshot values must be finite");
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != values_.rows())
    throw DimensionError("row labels must match the number of snapshot rows");
}

SnapshotSet apply_mass_matrix(const SnapshotSet& s, const MatrixXd& mass)
{
  if (mass.rows() != s.state_dim() || mass.cols() != s.state_dim())
    throw DimensionError("mass matrix must be N x N");
  Eigen::LLT<MatrixXd> llt(linalg::symmetrized(mass));
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("mass matrix is not symmetric positive definite");
  MatrixXd transformed = llt.matrixU() * s.values();
  return SnapshotSet(std::move(transformed), s.grid(), s.name(), s.labels());
}

std::string fingerprint(const SnapshotSet& s)
{
  Sha256 h;
  const double dims[] = {static_cast<double>(s.state_dim()), static_cast<double>(s.sample_count()),
      static_cast<double>(s.grid().dimension())};
  h.update(std::span<const double>(dims));
  h.update(std::span<const double>(s.values().data(), static_cast<std::size_t>(s.values().size())));
  const MatrixXd& p = s.grid().points();
  h.update(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  const VectorXd& w = s.grid().weights();
  h.update(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  return h.hex_digest();
}

void validate_symmetric_psd(const MatrixXd& a, const char* what)
{
  if (a.rows() != a.cols()) throw DimensionError(std::string(what) + " must be square");
  if (!a.allFinite()) throw InvalidArgument(std::string(what) + " must be finite");
  const double defect = linalg::symmetry_defect(a);
  if (defect > 1e-12)
  {
    std::ostringstream msg;
    msg << what << " is not symmetric (relative defect " << defect << ")";
    throw InvalidArgument(msg.str());
  }
  if (a.size() == 0) return;
  const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(linalg::symmetrized(a),
      Eigen::EigenvaluesOnly)
                          .eigenvalues();
  const double lmax = ev.maxCoeff();
  const double lmin = ev.minCoeff();
  if (lmin < -1e-12 * std::max(lmax, 0.0) && lmin < 0)
  {
    std::ostringstream msg;
    msg << what << " is indefinite (eigenvalue " << lmin << ", largest " << lmax << ")";
    throw NotPositiveDefiniteError(msg.str());
  }
}

CorrelationMatrix::CorrelationMatrix(MatrixXd entries) : entries_(std::move(entries))
{
  validate_symmetric_psd(entries_, "correlation matrix");
  entries_ = linalg::symmetrized(entries_);
}

CorrelationMatrix::CorrelationMatrix(MatrixXd entries, Trusted) : entries_(std::move(entries)) {}

KernelGram::KernelGram(MatrixXd entries) : entries_(std::move(entries))
{
  validate_symmetric_psd(entries_, "kernel Gram matrix");
  entries_ = linalg::symmetrized(entries_);
}

KernelGram::KernelGram(MatrixXd entries, Trusted) : entries_(std::move(entries)) {}

VectorXd apply_map(const SnapshotSet& s, const VectorXd& u)
{
  if (u.size() != s.state_dim())
  {
    std::ostringstream msg;
    msg << "apply_map: expected a vector of length N = " << s.state_dim() << ", got "
        << u.size();
    throw DimensionError(msg.str());
  }
  if (!u.allFinite()) throw InvalidArgument("apply_map: vector must be finite");
  return s.values().transpose() * u;
}

VectorXd apply_adjoint(const SnapshotSet& s, const VectorXd& phi)
{
  if (phi.size() != s.sample_count())
  {
    std::ostringstream msg;
    msg << "apply_adjoint: expected a vector of length M = " << s.sample_count() << ", got "
        << phi.size();
    throw DimensionError(msg.str());
  }
  if (!phi.allFinite()) throw InvalidArgument("apply_adjoint: vector must be finite");
  return s.values() * s.grid().weights().cwiseProduct(phi);
}

CorrelationMatrix correlation(const SnapshotSet& s)
{
  const MatrixXd& u = s.values();
  MatrixXd c = u * s.grid().weights().asDiagonal() * u.transpose();
  return CorrelationMatrix(linalg::symmetrized(c), CorrelationMatrix::Trusted{});
}

KernelGram kernel_gram(const SnapshotSet& s)
{
  const MatrixXd& u = s.values();
  MatrixXd k = u.transpose() * u;
  return KernelGram(linalg::symmetrized(k), KernelGram::Trusted{});
}

double rkhs_reproduce(const SnapshotSet& s, const VectorXd& phi, Index i)
{
  const Index m = s.sample_count();
  if (phi.size() != m)
  {
    std::ostringstream msg;
    msg << "rkhs_reproduce: expected a vector of length M = " << m << ", got " << phi.size();
    throw DimensionError(msg.str());
  }
  if (i < 0 || i >= m) throw InvalidArgument("rkhs_reproduce: grid index out of range");

  // R as a matrix is U^T (M x N); preimages are minimum-norm least-squares solutions.
  const MatrixXd map = s.values().transpose();
  const MatrixXd pinv = linalg::pseudo_inverse(map, kRankCutoff);

  const VectorXd u_phi = pinv * phi;
  const double residual = (map * u_phi - phi).norm();
  const double scale = phi.norm();
  if (residual > 1e-8 * scale)
  {
    std::ostringstream msg;
    msg << "rkhs_reproduce: function is not in the range of the associated map (relative "
           "residual "
        << residual / scale << ")";
    throw NotInRangeError(msg.str());
  }

  const VectorXd kernel_row = map * s.values().col(i);
  const VectorXd u_kernel = pinv * kernel_row;
  return u_kernel.dot(u_phi);
}

}  // namespace paramkl
