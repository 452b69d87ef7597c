#pragma once

#include "paramkl/linalg.hpp"

#include <string>
#include <vector>

namespace paramkl
{

struct SpectrumRow
{
  Index m = 0;  ///< one-based mode number
  double eigenvalue = 0;
  double singular_value = 0;
  double cumulative_fraction = 0;
};

/// Cumulative energy fractions are relative to the sum of the reported eigenvalues.
std::vector<SpectrumRow> spectrum_report(const VectorXd& eigenvalues);

/// Header line "m,lambda,sigma,cumulative_fraction" followed by one row per mode.
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);

/// Semilog-y decay plot of lambda_m as a standalone SVG document.
std::string spectrum_svg(const std::vector<SpectrumRow>& rows, const std::string& title = {});

}  // namespace paramkl
