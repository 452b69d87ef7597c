#include "paramkl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace paramkl
{

namespace
{

std::string fmt(const char* pattern, double v)
{
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, pattern, v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<SpectrumRow> spectrum_report(const VectorXd& eigenvalues)
{
  std::vector<SpectrumRow> rows;
  const double total = eigenvalues.sum();
  double running = 0;
  for (Index m = 0; m < eigenvalues.size(); ++m)
  {
    running += eigenvalues(m);
    SpectrumRow row;
    row.m = m + 1;
    row.eigenvalue = eigenvalues(m);
    row.singular_value = std::sqrt(std::max(eigenvalues(m), 0.0));
    row.cumulative_fraction = total > 0 ? running / total : 1.0;
    rows.push_back(row);
  }
  // Guard against the last partial sum differing from `total` in the final ulp.
  if (!rows.empty() && total > 0) rows.back().cumulative_fraction = 1.0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    rows[k].cumulative_fraction = std::max(rows[k].cumulative_fraction, rows[k - 1].cumulative_fraction);
  return rows;
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows)
{
  std::string out = "m,lambda,sigma,cumulative_fraction\n";
  for (const auto& r : rows)
  {
    out += std::to_string(r.m);
    out += ',' + fmt("%.17g", r.eigenvalue);
    out += ',' + fmt("%.17g", r.singular_value);
    out += ',' + fmt("%.17g", r.cumulative_fraction);
    out += '\n';
  }
  return out;
}

std::string spectrum_svg(const std::vector<SpectrumRow>& rows, const std::string& title)
{
  constexpr double width = 640, height = 400;
  constexpr double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         escape(title.empty() ? std::string("Spectrum decay") : title) + "</text>\n";
  svg += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top) + "\" width=\"" +
         fmt("%.1f", plot_w) + "\" height=\"" + fmt("%.1f", plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  std::vector<SpectrumRow> positive;
  for (const auto& r : rows)
    if (r.eigenvalue > 0) positive.push_back(r);

  if (positive.empty())
  {
    svg += "<text x=\"320\" y=\"200\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">no modes</text>\n</svg>\n";
    return svg;
  }

  double lo = positive.front().eigenvalue, hi = lo;
  for (const auto& r : positive)
  {
    lo = std::min(lo, r.eigenvalue);
    hi = std::max(hi, r.eigenvalue);
  }
  const double dec_lo = std::floor(std::log10(lo));
  double dec_hi = std::ceil(std::log10(hi));
  if (dec_hi <= dec_lo) dec_hi = dec_lo + 1;
  const double m_max = static_cast<double>(std::max<Index>(positive.back().m, 2));

  auto x_of = [&](double m) { return left + (m - 1) / (m_max - 1) * plot_w; };
  auto y_of = [&](double v) { return top + (dec_hi - std::log10(v)) / (dec_hi - dec_lo) * plot_h; };

  for (double d = dec_lo; d <= dec_hi + 0.5; d += 1)
  {
    const double y = top + (dec_hi - d) / (dec_hi - dec_lo) * plot_h;
    svg += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" +
           fmt("%.1f", left + plot_w) + "\" y2=\"" + fmt("%.2f", y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.2f", y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">1e" +
           fmt("%.0f", d) + "</text>\n";
  }
  svg += "<text x=\"320\" y=\"392\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">mode m</text>\n";
  svg += "<text x=\"16\" y=\"200\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 200)\">eigenvalue</text>\n";
  svg += "<text x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top + plot_h + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">1</text>\n";
  svg += "<text x=\"" + fmt("%.1f", left + plot_w) + "\" y=\"" + fmt("%.1f", top + plot_h + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
         fmt("%.0f", m_max) + "</text>\n";

  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < positive.size(); ++k)
  {
    if (k) svg += ' ';
    svg += fmt("%.2f", x_of(static_cast<double>(positive[k].m))) + "," +
           fmt("%.2f", y_of(positive[k].eigenvalue));
  }
  svg += "\"/>\n";
  for (const auto& r : positive)
    svg += "<circle cx=\"" + fmt("%.2f", x_of(static_cast<double>(r.m))) + "\" cy=\"" +
           fmt("%.2f", y_of(r.eigenvalue)) + "\" r=\"2\" fill=\"#1f77b4\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace paramkl
