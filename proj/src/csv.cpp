#include "paramkl/csv.hpp"

#include "paramkl/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace paramkl::csv
{

std::string format_double(double x)
{
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string to_string(const MatrixXd& m)
{
  std::string out;
  if (m.cols() == 0) return out;
  out.reserve(static_cast<std::size_t>(m.size()) * 24);
  for (Index i = 0; i < m.rows(); ++i)
  {
    for (Index j = 0; j < m.cols(); ++j)
    {
      if (j) out.push_back(',');
      out += format_double(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

void write(const std::filesystem::path& file, const MatrixXd& m)
{
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + file.string());
  const std::string text = to_string(m);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("failed writing " + file.string());
}

namespace
{

double parse_field(std::string_view field, const std::string& origin, std::size_t line)
{
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  if (field.size() >= 2 && field.front() == '"' && field.back() == '"')
    field = field.substr(1, field.size() - 2);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
  {
    std::ostringstream msg;
    msg << origin << ":" << line << ": not a number: '" << field << "'";
    throw FormatError(msg.str());
  }
  if (!std::isfinite(v))
  {
    std::ostringstream msg;
    msg << origin << ":" << line << ": non-finite value '" << field << "'";
    throw FormatError(msg.str());
  }
  return v;
}

}  // namespace

MatrixXd parse(const std::string& text, std::optional<Index> rows, std::optional<Index> cols,
    const std::string& origin)
{
  std::vector<std::vector<double>> table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size())
  {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = end + 1;
    if (line.empty())
    {
      if (pos >= text.size()) break;
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": empty line";
      throw FormatError(msg.str());
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true)
    {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_field(line.substr(start, comma == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : comma - start),
          origin, line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!table.empty() && row.size() != table.front().size())
    {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": expected " << table.front().size() << " columns, got "
          << row.size();
      throw FormatError(msg.str());
    }
    table.push_back(std::move(row));
  }

  if (table.empty())
  {
    const Index r = rows.value_or(0);
    const Index c = cols.value_or(0);
    if (r != 0 && c != 0)
    {
      std::ostringstream msg;
      msg << origin << ": empty file, expected " << r << " x " << c << " values";
      throw FormatError(msg.str());
    }
    return MatrixXd(r, c);
  }

  const auto nr = static_cast<Index>(table.size());
  const auto nc = static_cast<Index>(table.front().size());
  if ((rows && *rows != nr) || (cols && *cols != nc))
  {
    std::ostringstream msg;
    msg << origin << ": expected " << (rows ? std::to_string(*rows) : "?") << " x "
        << (cols ? std::to_string(*cols) : "?") << " values, got " << nr << " x " << nc;
    throw FormatError(msg.str());
  }
  MatrixXd m(nr, nc);
  for (Index i = 0; i < nr; ++i)
    for (Index j = 0; j < nc; ++j) m(i, j) = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

MatrixXd read(const std::filesystem::path& file, std::optional<Index> rows, std::optional<Index> cols)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), rows, cols, file.string());
}

}  // namespace paramkl::csv
