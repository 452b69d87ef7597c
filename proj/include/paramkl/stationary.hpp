#pragma once

#include "paramkl/linalg.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <string>

namespace paramkl
{

/// A shift-invariant kernel sampled on the uniform periodic grid z_j = j * spacing,
/// j = 0..M-1, with period L = M * spacing. Samples must be even: k(z_j) = k(z_{M-j}).
class StationaryKernel1D
{
 public:
  /// Throws InvalidArgument if the samples are not even to 1e-12 relative.
  StationaryKernel1D(VectorXd samples, double spacing);

  /// Periodization sum_{|i|<=images} f(d_j + i L) of an even profile f, d_j = min(j, M-j) spacing.
  static StationaryKernel1D periodized(const std::function<double(double)>& profile,
      double length, Index points, int images = 1);

  /// Built-in profiles: "exp" -> exp(-a|z|), "gauss" -> exp(-a z^2).
  static StationaryKernel1D builtin(const std::string& name, double scale, double length,
      Index points);

  const VectorXd& samples() const noexcept { return samples_; }
  double spacing() const noexcept { return spacing_; }
  double length() const noexcept { return spacing_ * static_cast<double>(samples_.size()); }
  Index size() const noexcept { return samples_.size(); }

  /// Circulant matrix A_ij = spacing * k(z_{(i-j) mod M}): the Nystrom matrix of C_Q.
  MatrixXd circulant() const;

 private:
  VectorXd samples_;
  double spacing_;
};

/// Values of the spectral density at the DFT frequencies zeta_k (see frequency()).
struct SpectralDensity
{
  VectorXd values;
  double spacing = 1;
  /// Largest negative magnitude clamped to zero.
  double max_clamped = 0;

  Index size() const noexcept { return values.size(); }
  double length() const noexcept { return spacing * static_cast<double>(values.size()); }
  /// zeta_k = k / L for k <= M/2, (k - M) / L otherwise.
  double frequency(Index k) const;
  /// False when clamping exceeded 1e-6 * max: the kernel is not positive on this grid.
  bool admissible() const;
};

/// k_hat(zeta_k) = spacing * sum_j k(z_j) exp(-2 pi i z_j zeta_k).
SpectralDensity spectral_density(const StationaryKernel1D& k);

/// Inverse transform back to kernel samples.
VectorXd kernel_samples(const SpectralDensity& d);

/// C_Q = (M_sqrt(k_hat) F)^* (M_sqrt(k_hat) F) with F the unitary DFT.
class SqrtMultiplierFactor
{
 public:
  explicit SqrtMultiplierFactor(SpectralDensity density);

  /// sqrt(k_hat) * F phi
  Eigen::VectorXcd apply(const VectorXd& phi) const;
  /// F^* (sqrt(k_hat) * psi); real part of the result (input should be Hermitian-symmetric).
  VectorXd apply_adjoint(const Eigen::VectorXcd& psi) const;
  /// Action of C_Q, i.e. circular convolution with spacing * k.
  VectorXd apply_correlation(const VectorXd& phi) const;

  const SpectralDensity& density() const noexcept { return density_; }

 private:
  SpectralDensity density_;
  VectorXd sqrt_values_;
};

/// `count` real stationary sequences (count x M) whose ensemble covariance is the kernel.
/// Realization i draws its spectral noise from NormalStream::substream(seed, i).
MatrixXd synthesize_realizations(const SpectralDensity& d, Index count, std::uint64_t seed);

}  // namespace paramkl
