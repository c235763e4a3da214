#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "moseac/errors.hpp"
#include "moseac/num.hpp"

namespace moseac {

struct Series {
  std::string label;
  std::vector<double> xs, ys;
};

struct BoxStats {
  std::string label;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Trailing moving average; output i covers the window ending at input
// i + window - 1. A window longer than the series collapses to one point.
inline std::vector<double> moving_average(std::span<const double> xs, int window) {
  if (window < 1) throw config_error("moving_average: window must be >= 1");
  if (xs.empty()) return {};
  const int n = static_cast<int>(xs.size());
  const int w = std::min(window, n);
  std::vector<double> out;
  out.reserve(n - w + 1);
  double acc = 0.0;
  for (int i = 0; i < w; ++i) acc += xs[i];
  out.push_back(acc / w);
  for (int i = w; i < n; ++i) {
    acc += xs[i] - xs[i - w];
    out.push_back(acc / w);
  }
  return out;
}

// Linear-interpolated quantile of a sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw insufficient_data_error("quantile of empty sample");
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline BoxStats box_stats(std::string label, std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxStats b;
  b.label = std::move(label);
  b.min = s.front();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  b.max = s.back();
  return b;
}

namespace detail {

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f6fb2", "#d1495b", "#3a9d5d", "#8c5aa8",
                                  "#c58a00", "#4db3b3"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt_tick(double v) {
  // short human-readable tick label
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Multi-series line chart as a standalone <svg> fragment. Axes carry min/max
// tick labels; the legend sits top-right.
inline std::string render_line_chart(const std::string& title, const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<Series>& series, int width = 960,
                                     int height = 420) {
  const double ml = 70, mr = 20, mt = 34, mb = 46;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (!any) {
        xmin = xmax = s.xs[i];
        ymin = ymax = s.ys[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"15\">" + detail::svg_escape(title) + "</text>\n";
  // axes
  svg += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(mt) + "\" x2=\"" +
         fmt_double(ml) + "\" y2=\"" + fmt_double(mt + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(mt + ph) + "\" x2=\"" +
         fmt_double(ml + pw) + "\" y2=\"" + fmt_double(mt + ph) + "\" stroke=\"black\"/>\n";
  auto tick = [&](double x, double y, const std::string& text, const char* anchor) {
    svg += "<text x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) + "\" font-size=\"11\" "
           "text-anchor=\"" + std::string(anchor) + "\">" + detail::svg_escape(text) +
           "</text>\n";
  };
  tick(ml, mt + ph + 16, detail::fmt_tick(xmin), "middle");
  tick(ml + pw, mt + ph + 16, detail::fmt_tick(xmax), "middle");
  tick(ml - 6, mt + ph + 4, detail::fmt_tick(ymin), "end");
  tick(ml - 6, mt + 10, detail::fmt_tick(ymax), "end");
  tick(ml + pw / 2, height - 8.0, x_label, "middle");
  svg += "<text x=\"16\" y=\"" + fmt_double(mt + ph / 2) + "\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 " + fmt_double(mt + ph / 2) +
         ")\">" + detail::svg_escape(y_label) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string points;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      points += fmt_double(px(s.xs[i])) + "," + fmt_double(py(s.ys[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(detail::series_color(si)) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    // legend entry
    const double ly = mt + 14.0 + 16.0 * si;
    svg += "<line x1=\"" + fmt_double(ml + pw - 130) + "\" y1=\"" + fmt_double(ly - 4) +
           "\" x2=\"" + fmt_double(ml + pw - 108) + "\" y2=\"" + fmt_double(ly - 4) +
           "\" stroke=\"" + detail::series_color(si) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_double(ml + pw - 102) + "\" y=\"" + fmt_double(ly) +
           "\" font-size=\"12\">" + detail::svg_escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Side-by-side box plots (min/q1/median/q3/max whisker boxes).
inline std::string render_box_chart(const std::string& title,
                                    const std::vector<BoxStats>& boxes, int width = 480,
                                    int height = 420) {
  const double ml = 70, mr = 20, mt = 34, mb = 46;
  double ymin = boxes.empty() ? 0.0 : boxes[0].min;
  double ymax = boxes.empty() ? 1.0 : boxes[0].max;
  for (const auto& b : boxes) {
    ymin = std::min(ymin, b.min);
    ymax = std::max(ymax, b.max);
  }
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"15\">" + detail::svg_escape(title) + "</text>\n";
  svg += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(mt) + "\" x2=\"" +
         fmt_double(ml) + "\" y2=\"" + fmt_double(mt + ph) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt_double(ml - 6) + "\" y=\"" + fmt_double(mt + ph + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + detail::fmt_tick(ymin) + "</text>\n";
  svg += "<text x=\"" + fmt_double(ml - 6) + "\" y=\"" + fmt_double(mt + 10) +
         "\" font-size=\"11\" text-anchor=\"end\">" + detail::fmt_tick(ymax) + "</text>\n";

  const double slot = pw / std::max<std::size_t>(1, boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = ml + slot * (i + 0.5);
    const double bw = std::min(60.0, slot * 0.5);
    const char* color = detail::series_color(i);
    auto line = [&](double x1, double y1, double x2, double y2) {
      svg += "<line x1=\"" + fmt_double(x1) + "\" y1=\"" + fmt_double(y1) + "\" x2=\"" +
             fmt_double(x2) + "\" y2=\"" + fmt_double(y2) + "\" stroke=\"" + color + "\"/>\n";
    };
    line(cx, py(b.min), cx, py(b.q1));
    line(cx, py(b.q3), cx, py(b.max));
    line(cx - bw / 4, py(b.min), cx + bw / 4, py(b.min));
    line(cx - bw / 4, py(b.max), cx + bw / 4, py(b.max));
    svg += "<rect x=\"" + fmt_double(cx - bw / 2) + "\" y=\"" + fmt_double(py(b.q3)) +
           "\" width=\"" + fmt_double(bw) + "\" height=\"" +
           fmt_double(std::max(1.0, py(b.q1) - py(b.q3))) + "\" fill=\"none\" stroke=\"" +
           color + "\"/>\n";
    line(cx - bw / 2, py(b.median), cx + bw / 2, py(b.median));
    svg += "<text x=\"" + fmt_double(cx) + "\" y=\"" + fmt_double(mt + ph + 16) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + detail::svg_escape(b.label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace moseac
