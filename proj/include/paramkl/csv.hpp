#pragma once

#include "paramkl/linalg.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace paramkl::csv
{

/// Shortest-safe round-trip text for a float64: 17 significant digits.
std::string format_double(double x);

/// RFC-4180 numeric CSV: no header, '.' decimal, LF line endings.
std::string to_string(const MatrixXd& m);
void write(const std::filesystem::path& file, const MatrixXd& m);

/// Parses a numeric CSV. When expected dimensions are given they are enforced; an empty
/// file is accepted for a matrix with zero rows or columns. Throws FormatError.
MatrixXd parse(const std::string& text, std::optional<Index> rows = {},
    std::optional<Index> cols = {}, const std::string& origin = "<csv>");
MatrixXd read(const std::filesystem::path& file, std::optional<Index> rows = {},
    std::optional<Index> cols = {});

}  // namespace paramkl::csv
