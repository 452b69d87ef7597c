#include "paramkl/stationary.hpp"

#include "paramkl/error.hpp"
#include "paramkl/log.hpp"
#include "paramkl/random.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

namespace paramkl
{

namespace
{

using Eigen::VectorXcd;
using Complex = std::complex<double>;

VectorXcd forward_dft(const VectorXcd& x)
{
  Eigen::FFT<double> fft;
  VectorXcd out(x.size());
  fft.fwd(out, x);
  return out;
}

// Includes the 1/M factor.
VectorXcd inverse_dft(const VectorXcd& x)
{
  Eigen::FFT<double> fft;
  VectorXcd out(x.size());
  fft.inv(out, x);
  return out;
}

}  // namespace

StationaryKernel1D::StationaryKernel1D(VectorXd samples, double spacing)
    : samples_(std::move(samples)), spacing_(spacing)
{
  if (samples_.size() < 1) throw InvalidArgument("stationary kernel needs at least one sample");
  if (!(spacing_ > 0) || !std::isfinite(spacing_))
    throw InvalidArgument("stationary kernel grid spacing must be positive");
  if (!samples_.allFinite()) throw InvalidArgument("stationary kernel samples must be finite");
  const Index m = samples_.size();
  const double scale = samples_.cwiseAbs().maxCoeff();
  double defect = 0;
  for (Index j = 1; j < m; ++j) defect = std::max(defect, std::abs(samples_(j) - samples_(m - j)));
  if (defect > 1e-12 * scale)
  {
    std::ostringstream msg;
    msg << "stationary kernel samples are not even on the periodic grid (defect " << defect
        << ")";
    throw InvalidArgument(msg.str());
  }
}

StationaryKernel1D StationaryKernel1D::periodized(const std::function<double(double)>& profile,
    double length, Index points, int images)
{
  if (points < 1 || !(length > 0)) throw InvalidArgument("periodic grid needs points >= 1, L > 0");
  const double spacing = length / static_cast<double>(points);
  VectorXd samples(points);
  for (Index j = 0; j < points; ++j)
  {
    const double d = static_cast<double>(std::min(j, points - j)) * spacing;
    double v = 0;
    for (int i = -images; i <= images; ++i) v += profile(d + i * length);
    samples(j) = v;
  }
  return StationaryKernel1D(std::move(samples), spacing);
}

StationaryKernel1D StationaryKernel1D::builtin(const std::string& name, double scale,
    double length, Index points)
{
  if (!(scale > 0)) throw InvalidArgument("kernel scale must be positive");
  if (name == "exp")
    return periodized([scale](double z) { return std::exp(-scale * std::abs(z)); }, length, points);
  if (name == "gauss")
    return periodized([scale](double z) { return std::exp(-scale * z * z); }, length, points);
  throw InvalidArgument("unknown stationary kernel '" + name + "' (expected exp or gauss)");
}

MatrixXd StationaryKernel1D::circulant() const
{
  const Index m = size();
  MatrixXd a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = spacing_ * samples_(((i - j) % m + m) % m);
  return a;
}

double SpectralDensity::frequency(Index k) const
{
  const Index m = size();
  const Index shifted = k <= m / 2 ? k : k - m;
  return static_cast<double>(shifted) / length();
}

bool SpectralDensity::admissible() const
{
  const double top = values.size() ? values.maxCoeff() : 0.0;
  return max_clamped <= 1e-6 * top;
}

SpectralDensity spectral_density(const StationaryKernel1D& k)
{
  const VectorXcd transformed = forward_dft(k.samples().cast<Complex>()) * k.spacing();
  const double scale = transformed.cwiseAbs().maxCoeff();
  const double imag = transformed.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-10 * scale)
  {
    std::ostringstream msg;
    msg << "spectral density has a non-negligible imaginary part (" << imag << ")";
    throw InvalidArgument(msg.str());
  }

  SpectralDensity d;
  d.spacing = k.spacing();
  d.values = transformed.real();
  for (Index i = 0; i < d.values.size(); ++i)
  {
    if (d.values(i) < 0)
    {
      d.max_clamped = std::max(d.max_clamped, -d.values(i));
      d.values(i) = 0;
    }
  }
  if (!d.admissible())
  {
    std::ostringstream msg;
    msg << "kernel is not admissible on this grid: clamped spectral mass " << d.max_clamped
        << " exceeds 1e-6 of the maximum";
    log::warn(msg.str());
  }
  return d;
}

VectorXd kernel_samples(const SpectralDensity& d)
{
  return inverse_dft(d.values.cast<Complex>()).real() / d.spacing;
}

SqrtMultiplierFactor::SqrtMultiplierFactor(SpectralDensity density)
    : density_(std::move(density)), sqrt_values_(density_.values.cwiseMax(0.0).cwiseSqrt())
{
}

Eigen::VectorXcd SqrtMultiplierFactor::apply(const VectorXd& phi) const
{
  if (phi.size() != density_.size()) throw DimensionError("factor applied to a vector of wrong size");
  const double norm = 1.0 / std::sqrt(static_cast<double>(phi.size()));
  return (forward_dft(phi.cast<Complex>()) * norm).cwiseProduct(sqrt_values_.cast<Complex>());
}

VectorXd SqrtMultiplierFactor::apply_adjoint(const Eigen::VectorXcd& psi) const
{
  if (psi.size() != density_.size()) throw DimensionError("adjoint applied to a vector of wrong size");
  const double norm = std::sqrt(static_cast<double>(psi.size()));
  return (inverse_dft(psi.cwiseProduct(sqrt_values_.cast<Complex>())) * norm).real();
}

VectorXd SqrtMultiplierFactor::apply_correlation(const VectorXd& phi) const
{
  return apply_adjoint(apply(phi));
}

MatrixXd synthesize_realizations(const SpectralDensity& d, Index count, std::uint64_t seed)
{
  if (count < 1) throw InvalidArgument("synthesize_realizations: count must be >= 1");
  const Index m = d.size();
  const double inv_length = 1.0 / d.length();
  const VectorXd amplitude = (d.values.cwiseMax(0.0) * inv_length).cwiseSqrt();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  MatrixXd out(count, m);
  VectorXcd noise(m);
  for (Index r = 0; r < count; ++r)
  {
    auto stream = NormalStream::substream(seed, static_cast<std::uint64_t>(r));
    noise(0) = stream.normal();
    for (Index k = 1; k < m - k; ++k)
    {
      const double re = stream.normal();
      const double im = stream.normal();
      noise(k) = Complex(re, im) * inv_sqrt2;
      noise(m - k) = std::conj(noise(k));
    }
    if (m % 2 == 0 && m > 1) noise(m / 2) = stream.normal();

    const VectorXcd field =
        inverse_dft(noise.cwiseProduct(amplitude.cast<Complex>())) * static_cast<double>(m);
    out.row(r) = field.real().transpose();
  }
  return out;
}

}  // namespace paramkl
