#include "paramkl/spectral.hpp"

#include "paramkl/error.hpp"

#include <cmath>
#include <sstream>

namespace paramkl
{

MatrixXd SpectralData::spectral_projector(Index m) const
{
  if (m < 0 || m >= rank()) throw InvalidArgument("spectral_projector: mode index out of range");
  return spatial_modes.col(m) * spatial_modes.col(m).transpose();
}

namespace
{

SpectralData empty_spectrum(const SnapshotSet& s)
{
  return SpectralData{VectorXd(0), MatrixXd(s.state_dim(), 0), MatrixXd(s.sample_count(), 0),
      s.grid()};
}

Index retained_rank(const VectorXd& values, const DecomposeOptions& opt)
{
  Index r = linalg::numerical_rank(values, opt.rank_cutoff);
  while (r > 0 && values(r - 1) <= opt.energy_floor) --r;
  return r;
}

SpectralData decompose_snapshots(const SnapshotSet& s, const DecomposeOptions& opt)
{
  const VectorXd& w = s.grid().weights();
  const VectorXd sqrt_w = w.cwiseSqrt();
  const MatrixXd gram = s.values().transpose() * s.values();
  const MatrixXd weighted =
      linalg::symmetrized(sqrt_w.asDiagonal() * gram * sqrt_w.asDiagonal());

  const auto eig = linalg::symmetric_eigen_descending(weighted);
  const Index r = retained_rank(eig.values, opt);
  if (r == 0) return empty_spectrum(s);

  const VectorXd lambda = eig.values.head(r);
  MatrixXd param = sqrt_w.cwiseInverse().asDiagonal() * eig.vectors.leftCols(r);
  MatrixXd spatial = s.values() * w.asDiagonal() * param *
                     lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  linalg::normalize_signs(spatial, &param);
  return SpectralData{lambda, std::move(spatial), std::move(param), s.grid()};
}

SpectralData decompose_correlation(const SnapshotSet& s, const DecomposeOptions& opt)
{
  const MatrixXd& u = s.values();
  const MatrixXd c = linalg::symmetrized(u * s.grid().weights().asDiagonal() * u.transpose());

  const auto eig = linalg::symmetric_eigen_descending(c);
  const Index r = retained_rank(eig.values, opt);
  if (r == 0) return empty_spectrum(s);

  const VectorXd lambda = eig.values.head(r);
  MatrixXd spatial = eig.vectors.leftCols(r);
  MatrixXd param = u.transpose() * spatial * lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  linalg::normalize_signs(spatial, &param);
  return SpectralData{lambda, std::move(spatial), std::move(param), s.grid()};
}

struct TruncationChoice
{
  Index n = 0;
  bool clamped = false;
};

// `base_tail` is energy already discarded upstream of `lambda`.
TruncationChoice choose_rank(const VectorXd& lambda, double base_tail, const TruncationRule& rule)
{
  if (rule.rank.has_value() == rule.tolerance.has_value())
    throw InvalidArgument("truncate: give exactly one of rank or tolerance");
  const Index r = lambda.size();
  if (rule.rank)
  {
    if (*rule.rank < 0) throw InvalidArgument("truncate: rank must be non-negative");
    if (*rule.rank > r) return {r, true};
    return {*rule.rank, false};
  }
  const double tau = *rule.tolerance;
  if (!(tau >= 0) || !std::isfinite(tau))
    throw InvalidArgument("truncate: tolerance must be a finite non-negative number");

  // tails[n] = energy discarded when keeping the first n modes, summed from the small end.
  VectorXd tails(r + 1);
  tails(r) = base_tail;
  for (Index m = r - 1; m >= 0; --m) tails(m) = tails(m + 1) + lambda(m);
  const double budget = tau * tau * tails(0);
  for (Index n = 0; n <= r; ++n)
    if (tails(n) <= budget) return {n, false};
  return {r, false};
}

ReducedModel make_reduced(const SpectralData& sd, Index n, double base_tail, bool clamped,
    std::string name, std::string hash)
{
  ReducedModel rm{SpectralData{sd.eigenvalues.head(n), sd.spatial_modes.leftCols(n),
      sd.parameter_modes.leftCols(n), sd.grid}};
  rm.truncation_rank = n;
  double tail = base_tail;
  for (Index m = sd.rank() - 1; m >= n; --m) tail += sd.eigenvalues(m);
  rm.tail_energy = tail;
  rm.source_name = std::move(name);
  rm.source_hash = std::move(hash);
  rm.rank_clamped = clamped;
  return rm;
}

}  // namespace

SpectralData decompose(const SnapshotSet& s, const DecomposeOptions& options)
{
  if (!(options.rank_cutoff >= 0)) throw InvalidArgument("decompose: rank cutoff must be >= 0");
  if (!(options.energy_floor >= 0)) throw InvalidArgument("decompose: energy floor must be >= 0");
  switch (options.method)
  {
    case DecompositionMethod::snapshots: return decompose_snapshots(s, options);
    case DecompositionMethod::correlation: return decompose_correlation(s, options);
  }
  throw InvalidArgument("decompose: unknown method");
}

bool SpectralInvariantReport::ok(double ortho_tol, double svd_tol) const
{
  return descending && positive && spatial_orthonormality <= ortho_tol &&
         parameter_orthonormality <= ortho_tol && svd_consistency <= svd_tol;
}

SpectralInvariantReport check_invariants(const SpectralData& sd, const SnapshotSet& s)
{
  SpectralInvariantReport rep;
  const Index r = sd.rank();
  if (sd.spatial_modes.rows() != s.state_dim() || sd.parameter_modes.rows() != s.sample_count() ||
      sd.spatial_modes.cols() != r || sd.parameter_modes.cols() != r)
    throw DimensionError("check_invariants: spectral data does not match snapshot set");
  if (r == 0) return rep;

  const MatrixXd eye = MatrixXd::Identity(r, r);
  rep.spatial_orthonormality =
      (sd.spatial_modes.transpose() * sd.spatial_modes - eye).cwiseAbs().maxCoeff();
  const VectorXd& w = s.grid().weights();
  rep.parameter_orthonormality =
      (sd.parameter_modes.transpose() * w.asDiagonal() * sd.parameter_modes - eye)
          .cwiseAbs()
          .maxCoeff();

  const double sigma1 = std::sqrt(sd.eigenvalues(0));
  for (Index m = 0; m < r; ++m)
  {
    if (!(sd.eigenvalues(m) > 0)) rep.positive = false;
    if (m > 0 && sd.eigenvalues(m) > sd.eigenvalues(m - 1) * (1 + 1e-12)) rep.descending = false;
    const VectorXd lhs = apply_adjoint(s, sd.parameter_modes.col(m));
    const VectorXd rhs = std::sqrt(std::max(sd.eigenvalues(m), 0.0)) * sd.spatial_modes.col(m);
    rep.svd_consistency = std::max(rep.svd_consistency, (lhs - rhs).norm() / sigma1);
  }
  return rep;
}

double ReducedModel::error_estimate() const { return std::sqrt(std::max(tail_energy, 0.0)); }

ReducedModel truncate(const SpectralData& sd, const TruncationRule& rule, std::string source_name,
    std::string source_hash)
{
  const auto choice = choose_rank(sd.eigenvalues, 0.0, rule);
  return make_reduced(sd, choice.n, 0.0, choice.clamped, std::move(source_name),
      std::move(source_hash));
}

ReducedModel truncate(const ReducedModel& rm, const TruncationRule& rule)
{
  const auto choice = choose_rank(rm.spectral.eigenvalues, rm.tail_energy, rule);
  return make_reduced(rm.spectral, choice.n, rm.tail_energy, choice.clamped || rm.rank_clamped,
      rm.source_name, rm.source_hash);
}

ReducedModel full_model(const SpectralData& sd, const SnapshotSet& s)
{
  return make_reduced(sd, sd.rank(), 0.0, false, s.name(), fingerprint(s));
}

VectorXd evaluate(const ReducedModel& rm, Index j)
{
  const SpectralData& sd = rm.spectral;
  if (j < 0 || j >= sd.sample_count())
  {
    std::ostringstream msg;
    msg << "evaluate: grid index " << j << " out of range [0, " << sd.sample_count() << ")";
    throw InvalidArgument(msg.str());
  }
  const VectorXd coeff = sd.eigenvalues.cwiseSqrt().cwiseProduct(sd.parameter_modes.row(j).transpose());
  return sd.spatial_modes * coeff;
}

MatrixXd evaluate_all(const ReducedModel& rm)
{
  const SpectralData& sd = rm.spectral;
  return sd.spatial_modes * sd.eigenvalues.cwiseSqrt().asDiagonal() *
         sd.parameter_modes.transpose();
}

double reconstruction_error(const ReducedModel& rm, const SnapshotSet& s)
{
  if (rm.spectral.state_dim() != s.state_dim() || rm.spectral.sample_count() != s.sample_count())
  {
    std::ostringstream msg;
    msg << "reconstruction_error: model is " << rm.spectral.state_dim() << " x "
        << rm.spectral.sample_count() << ", snapshots are " << s.state_dim() << " x "
        << s.sample_count();
    throw DimensionError(msg.str());
  }
  const MatrixXd residual = s.values() - evaluate_all(rm);
  const VectorXd col_sq = residual.colwise().squaredNorm().transpose();
  return std::sqrt(s.grid().weights().dot(col_sq));
}

double projection_error(const MatrixXd& basis, const SnapshotSet& s)
{
  if (basis.rows() != s.state_dim()) throw DimensionError("projection_error: basis has wrong N");
  const MatrixXd residual = s.values() - basis * (basis.transpose() * s.values());
  const VectorXd col_sq = residual.colwise().squaredNorm().transpose();
  return std::sqrt(s.grid().weights().dot(col_sq));
}

}  // namespace paramkl
