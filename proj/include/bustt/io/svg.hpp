#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>

namespace bustt::io {

namespace detail {

// Stem panel for lag-indexed values in [-1, 1] with a confidence band.
inline void svg_stem_panel(std::ostream& os, std::span<const double> values, double band,
                           double x0, double y0, double width, double height,
                           const std::string& title) {
  const double mid = y0 + height / 2.0;
  const double half = height / 2.0;
  const auto n = static_cast<double>(values.size());
  const double step = width / std::max(1.0, n);
  os << "<text x='" << x0 << "' y='" << y0 - 6 << "' font-size='12'>" << title << "</text>\n";
  os << "<line x1='" << x0 << "' y1='" << mid << "' x2='" << x0 + width << "' y2='" << mid
     << "' stroke='black' stroke-width='0.5'/>\n";
  for (const double s : {band, -band}) {
    const double y = mid - s * half;
    os << "<line x1='" << x0 << "' y1='" << y << "' x2='" << x0 + width << "' y2='" << y
       << "' stroke='steelblue' stroke-width='0.5' stroke-dasharray='4,3'/>\n";
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values[i], -1.0, 1.0);
    const double x = x0 + (static_cast<double>(i) + 0.5) * step;
    os << "<line x1='" << x << "' y1='" << mid << "' x2='" << x << "' y2='" << mid - v * half
       << "' stroke='"
       << (std::abs(values[i]) > band && i > 0 ? "crimson" : "gray") << "' stroke-width='2'/>\n";
  }
}

}  // namespace detail

/// Two-panel ACF/PACF stem chart. Purely a renderer: the numbers live
/// in the report CSVs.
inline void write_correlogram_svg(std::ostream& os, std::span<const double> acf_values,
                                  std::span<const double> pacf_values, double band,
                                  const std::string& title) {
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420' "
        "viewBox='0 0 640 420'>\n";
  os << "<text x='20' y='20' font-size='14' font-weight='bold'>" << title << "</text>\n";
  detail::svg_stem_panel(os, acf_values, band, 40, 60, 560, 140, "ACF");
  detail::svg_stem_panel(os, pacf_values, band, 40, 250, 560, 140, "PACF");
  os << "</svg>\n";
}

}  // namespace bustt::io
