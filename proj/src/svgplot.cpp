#include "afdmsense/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace afdmsense {

namespace {

constexpr double kWidth = 840.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

// Evenly spaced "nice" tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= mult * mag) {
      step = mult * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(std::log10(lo)));
       e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
    const double t = std::pow(10.0, e);
    if (t >= lo / 1.001 && t <= hi * 1.001) ticks.push_back(t);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

}  // namespace

std::string render_line_plot(const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series,
                             bool log_y) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (log_y && s.y[i] <= 0.0) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (!(x_min <= x_max)) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = log_y ? 0.1 : 0.0;
    y_max = 1.0;
  }
  if (x_min == x_max) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_min == y_max) {
    if (log_y) {
      y_min /= 2.0;
      y_max *= 2.0;
    } else {
      y_min -= 0.5;
      y_max += 0.5;
    }
  }
  if (!log_y) {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  } else {
    y_min /= 1.2;
    y_max *= 1.2;
  }

  const double px0 = kLeft;
  const double px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom;
  const double py1 = kTop;
  const auto map_x = [&](double v) {
    return px0 + (v - x_min) / (x_max - x_min) * (px1 - px0);
  };
  const auto map_y = [&](double v) {
    const double t = log_y ? (std::log10(v) - std::log10(y_min)) /
                                 (std::log10(y_max) - std::log10(y_min))
                           : (v - y_min) / (y_max - y_min);
    return py0 + t * (py1 - py0);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << esc(title) << "</text>\n";

  const std::vector<double> xt = linear_ticks(x_min, x_max);
  const std::vector<double> yt =
      log_y ? decade_ticks(y_min, y_max) : linear_ticks(y_min, y_max);
  for (double t : xt) {
    const double x = map_x(t);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << py0 << "\" x2=\"" << num(x)
        << "\" y2=\"" << py1 << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << py0 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << num(t) << "</text>\n";
  }
  for (double t : yt) {
    const double y = map_y(t);
    svg << "<line x1=\"" << px0 << "\" y1=\"" << num(y) << "\" x2=\"" << px1
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << px0 - 6 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << num(t) << "</text>\n";
  }
  svg << "<rect x=\"" << px0 << "\" y=\"" << py1 << "\" width=\"" << px1 - px0
      << "\" height=\"" << py0 - py1
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << esc(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (py0 + py1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << (py0 + py1) / 2 << ")\">" << esc(y_label) << "</text>\n";

  bool any_label = false;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    std::ostringstream pts;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (log_y && s.y[i] <= 0.0) continue;
      pts << num(map_x(s.x[i])) << "," << num(map_y(s.y[i])) << " ";
      svg << "<circle cx=\"" << num(map_x(s.x[i])) << "\" cy=\""
          << num(map_y(s.y[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      ++count;
    }
    if (count >= 2)
      svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
          << color << "\" stroke-width=\"1.8\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    if (!s.label.empty()) any_label = true;
  }

  if (any_label) {
    double ly = py1 + 14;
    for (std::size_t si = 0; si < series.size(); ++si) {
      if (series[si].label.empty()) continue;
      const char* color =
          kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
      svg << "<line x1=\"" << px1 - 150 << "\" y1=\"" << ly - 4 << "\" x2=\""
          << px1 - 126 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"2\""
          << (series[si].dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
      svg << "<text x=\"" << px1 - 120 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << esc(series[si].label) << "</text>\n";
      ly += 16;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace afdmsense
