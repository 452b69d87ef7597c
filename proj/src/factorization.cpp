#include "paramkl/factorization.hpp"

#include "paramkl/error.hpp"
#include "paramkl/hash.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace paramkl
{

std::string_view to_string(FactorKind kind)
{
  switch (kind)
  {
    case FactorKind::canonical_R: return "canonical_R";
    case FactorKind::cholesky: return "cholesky";
    case FactorKind::square_root: return "square_root";
    case FactorKind::user: return "user";
  }
  return "user";
}

FactorKind factor_kind_from_string(std::string_view name)
{
  if (name == "canonical_R") return FactorKind::canonical_R;
  if (name == "cholesky") return FactorKind::cholesky;
  if (name == "square_root") return FactorKind::square_root;
  if (name == "user") return FactorKind::user;
  throw InvalidArgument("unknown factor kind '" + std::string(name) + "'");
}

std::string fingerprint(const CorrelationMatrix& c)
{
  Sha256 h;
  const double n = static_cast<double>(c.size());
  h.update(std::span<const double>(&n, 1));
  h.update(std::span<const double>(c.entries().data(), static_cast<std::size_t>(c.entries().size())));
  return h.hex_digest();
}

namespace
{

// Eigenvalues (descending) after the indefiniteness check shared by all factor constructors.
linalg::SymmetricEigen checked_spectrum(const CorrelationMatrix& c)
{
  auto eig = linalg::symmetric_eigen_descending(c.entries());
  if (eig.values.size() == 0) return eig;
  const double lmax = std::max(eig.values(0), 0.0);
  const double lmin = eig.values(eig.values.size() - 1);
  if (lmin < -kRankCutoff * lmax && lmin < 0)
  {
    std::ostringstream msg;
    msg << "correlation is indefinite: eigenvalue " << lmin << " below -1e-12 * " << lmax;
    throw NotPositiveDefiniteError(msg.str());
  }
  return eig;
}

// Outer-product pivoted Cholesky run for exactly `steps` pivots. Returns L (N x steps)
// with L L^T ~ C; row order is the original one.
MatrixXd pivoted_cholesky(const MatrixXd& c, Index steps)
{
  const Index n = c.rows();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  VectorXd diag = c.diagonal();
  MatrixXd l = MatrixXd::Zero(n, steps);

  for (Index k = 0; k < steps; ++k)
  {
    Index best = k;
    for (Index i = k + 1; i < n; ++i)
      if (diag(perm[i]) > diag(perm[best])) best = i;
    std::swap(perm[k], perm[best]);
    const Index pk = perm[k];
    const double pivot = diag(pk);
    if (!(pivot > 0)) return l.leftCols(k);
    const double root = std::sqrt(pivot);
    l(pk, k) = root;
    for (Index i = k + 1; i < n; ++i)
    {
      const Index pi = perm[i];
      double v = c(pi, pk);
      for (Index t = 0; t < k; ++t) v -= l(pi, t) * l(pk, t);
      l(pi, k) = v / root;
      diag(pi) -= l(pi, k) * l(pi, k);
    }
  }
  return l;
}

}  // namespace

Factor canonical_factor(const SnapshotSet& s)
{
  Factor b;
  b.matrix = s.grid().weights().cwiseSqrt().asDiagonal() * s.values().transpose();
  b.kind = FactorKind::canonical_R;
  b.correlation_hash = fingerprint(correlation(s));
  return b;
}

Factor cholesky_factor(const CorrelationMatrix& c)
{
  const auto eig = checked_spectrum(c);
  const Index n = c.size();
  const Index r = linalg::numerical_rank(eig.values, kRankCutoff);

  Factor b;
  b.kind = FactorKind::cholesky;
  b.correlation_hash = fingerprint(c);
  if (r == n)
  {
    Eigen::LLT<MatrixXd> llt(c.entries());
    if (llt.info() == Eigen::Success)
    {
      b.matrix = llt.matrixU();
      return b;
    }
  }
  b.matrix = pivoted_cholesky(c.entries(), r).transpose();
  return b;
}

Factor square_root_factor(const CorrelationMatrix& c)
{
  const auto eig = checked_spectrum(c);
  const Index r = linalg::numerical_rank(eig.values, kRankCutoff);
  VectorXd roots = VectorXd::Zero(eig.values.size());
  roots.head(r) = eig.values.head(r).cwiseSqrt();

  Factor b;
  b.kind = FactorKind::square_root;
  b.correlation_hash = fingerprint(c);
  b.matrix = linalg::symmetrized(eig.vectors * roots.asDiagonal() * eig.vectors.transpose());
  return b;
}

double factorization_residual(const Factor& b, const CorrelationMatrix& c)
{
  if (b.state_dim() != c.size()) throw DimensionError("factor and correlation sizes differ");
  return linalg::relative_difference(b.matrix.transpose() * b.matrix, c.entries());
}

double UnitaryMap::isometry_defect() const
{
  const Index h1 = matrix.cols();
  const MatrixXd projector = range_basis * range_basis.transpose();
  return ((matrix.transpose() * matrix - MatrixXd::Identity(h1, h1)) * projector).norm();
}

UnitaryMap unitary_equivalence(const Factor& b1, const Factor& b2)
{
  if (b1.state_dim() != b2.state_dim())
  {
    std::ostringstream msg;
    msg << "unitary_equivalence: factors act on spaces of dimension " << b1.state_dim()
        << " and " << b2.state_dim();
    throw DimensionError(msg.str());
  }
  const MatrixXd c1 = b1.matrix.transpose() * b1.matrix;
  const MatrixXd c2 = b2.matrix.transpose() * b2.matrix;
  const double discrepancy = linalg::relative_difference(c1, c2);
  if (discrepancy > 1e-8)
  {
    std::ostringstream msg;
    msg << "unitary_equivalence: factors induce different correlations (relative Frobenius "
           "discrepancy "
        << discrepancy << ")";
    throw CorrelationMismatchError(msg.str(), discrepancy);
  }

  // B1 = U1 S1 V1^T and B2 shares V1 as right singular vectors: X = B2 V1 S1^{-1} U1^T.
  UnitaryMap x;
  if (b1.matrix.size() == 0)
  {
    x.matrix = MatrixXd::Zero(b2.codomain_dim(), b1.codomain_dim());
    x.range_basis = MatrixXd(b1.codomain_dim(), 0);
    return x;
  }
  Eigen::BDCSVD<MatrixXd> svd(b1.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index r = linalg::numerical_rank(svd.singularValues(), kRankCutoff);
  const MatrixXd u1 = svd.matrixU().leftCols(r);
  const MatrixXd v1 = svd.matrixV().leftCols(r);
  const VectorXd inv_sigma = svd.singularValues().head(r).cwiseInverse();
  x.matrix = b2.matrix * v1 * inv_sigma.asDiagonal() * u1.transpose();
  x.range_basis = u1;
  return x;
}

MatrixXd cons_transport(const Factor& b, const SpectralData& sd)
{
  if (b.state_dim() != sd.state_dim())
  {
    std::ostringstream msg;
    msg << "cons_transport: factor acts on R^" << b.state_dim() << " but the spectrum lives in R^"
        << sd.state_dim();
    throw DimensionError(msg.str());
  }
  const Index r = sd.rank();
  if (r == 0) return MatrixXd(b.codomain_dim(), 0);

  const MatrixXd bv = b.matrix * sd.spatial_modes;
  const MatrixXd cv = b.matrix.transpose() * bv;
  const MatrixXd expected = sd.spatial_modes * sd.eigenvalues.asDiagonal();
  const double mismatch = (cv - expected).norm() / (sd.eigenvalues(0) * std::sqrt(double(r)));
  if (mismatch > 1e-8)
  {
    std::ostringstream msg;
    msg << "cons_transport: factor does not factor the correlation of this spectrum (relative "
           "eigen-residual "
        << mismatch << ")";
    throw CorrelationMismatchError(msg.str(), mismatch);
  }
  return bv * sd.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
}

MatrixXd FactorRepresentation::reconstruct() const
{
  return spatial_modes * singular_values.asDiagonal() * h_modes.transpose();
}

FactorRepresentation represent_from_factor(const Factor& b, const SpectralData& sd)
{
  FactorRepresentation rep;
  rep.h_modes = cons_transport(b, sd);
  rep.singular_values = sd.eigenvalues.cwiseSqrt();
  rep.spatial_modes = sd.spatial_modes;
  rep.kind = b.kind;
  return rep;
}

}  // namespace paramkl
