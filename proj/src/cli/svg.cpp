#include <algorithm>
#include <cstdio>
#include <string>

#include "colourrisk/cli.hpp"
#include "colourrisk/csv.hpp"

namespace colourrisk::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

// One panel per coefficient, stacked vertically.
std::string histogram_svg(const CoefficientDistributions& dist, int bins) {
  constexpr double width = 480, panel_h = 160, margin = 30;
  const double height = panel_h * static_cast<double>(dist.parameters.size()) + margin;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                    num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<text x=\"10\" y=\"18\">" + dist.region + "</text>\n";
  for (std::size_t p = 0; p < dist.parameters.size(); ++p) {
    const auto& s = dist.samples[p];
    const double top = margin + panel_h * static_cast<double>(p);
    svg += "<text x=\"10\" y=\"" + num(top + 14) + "\">" + dist.parameters[p] + "</text>\n";
    if (s.empty()) continue;
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    const double lo = *mn, hi = *mx;
    const int nb = hi > lo ? bins : 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(nb), 0);
    for (double v : s) {
      const int b = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * nb) : 0;
      counts[static_cast<std::size_t>(std::clamp(b, 0, nb - 1))]++;
    }
    const double peak = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
    const double plot_w = width - 2 * margin, plot_h = panel_h - 50, base = top + panel_h - 25;
    const double bar_w = plot_w / nb;
    for (int b = 0; b < nb; ++b) {
      const double h = plot_h * static_cast<double>(counts[static_cast<std::size_t>(b)]) / peak;
      svg += "<rect x=\"" + num(margin + bar_w * b) + "\" y=\"" + num(base - h) + "\" width=\"" + num(bar_w * 0.9) +
             "\" height=\"" + num(h) + "\" fill=\"#4a78b0\"/>\n";
    }
    svg += "<text x=\"" + num(margin) + "\" y=\"" + num(base + 14) + "\">" + format_fixed(lo, 3) + "</text>\n";
    svg += "<text x=\"" + num(width - margin) + "\" y=\"" + num(base + 14) + "\" text-anchor=\"end\">" +
           format_fixed(hi, 3) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace colourrisk::cli
