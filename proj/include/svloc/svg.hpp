#pragma once

// Minimal SVG 1.1 writers: singular-vector profile bars and line charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svloc/io.hpp"

namespace svloc::svg {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string num(double x) {
  // Fixed precision keeps the files short and diffable.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
}

inline std::string text(double x, double y, std::string_view s, std::string_view anchor = "middle", int size = 12) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\">" + escape(s) + "</text>\n";
}

// Bars of |u_i| in index order (top panel) and sorted descending (bottom
// panel), with the threshold line drawn when positive. One <rect> per bar and
// panel, each tagged class="bar".
inline std::string profile(std::span<const double> u, std::string_view title, double threshold = 0.0) {
  const double w = 800.0, panel_h = 220.0, margin = 50.0;
  const double h = 2.0 * panel_h + 3.0 * margin;
  const std::size_t n = u.size();
  double mx = threshold;
  for (double v : u) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) mx = 1.0;

  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = std::abs(u[i]);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  std::string out = header(w, h);
  out += text(w / 2, 24, title, "middle", 14);
  const double plot_w = w - 2 * margin;
  const double bar_w = n ? plot_w / static_cast<double>(n) : 0.0;

  auto panel = [&](const std::vector<double>& vals, double top, std::string_view label) {
    const double base = top + panel_h;
    out += "<g class=\"panel\">\n";
    out += text(margin, top - 6, label, "start");
    out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(base) + "\" x2=\"" + num(w - margin) + "\" y2=\"" +
           num(base) + "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double bh = panel_h * vals[i] / mx;
      out += "<rect class=\"bar\" x=\"" + num(margin + bar_w * static_cast<double>(i)) + "\" y=\"" +
             num(base - bh) + "\" width=\"" + num(std::max(bar_w * 0.9, 0.1)) + "\" height=\"" + num(bh) +
             "\" fill=\"steelblue\"/>\n";
    }
    if (threshold > 0.0) {
      const double ty = base - panel_h * threshold / mx;
      out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(ty) + "\" x2=\"" + num(w - margin) + "\" y2=\"" +
             num(ty) + "\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n";
    }
    out += "</g>\n";
  };

  std::vector<double> unsorted(n);
  for (std::size_t i = 0; i < n; ++i) unsorted[i] = std::abs(u[i]);
  panel(unsorted, margin + 10, "|u_i| by index");
  panel(sorted, 2 * margin + panel_h + 10, "|u_i| sorted");
  out += "</svg>\n";
  return out;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Polyline chart; log10 axes when requested (nonpositive values dropped).
inline std::string lines(std::span<const Series> series, std::string_view title, std::string_view x_label,
                         std::string_view y_label, bool log_x = false, bool log_y = false) {
  const double w = 640.0, h = 420.0, left = 70.0, right = 150.0, top = 40.0, bottom = 50.0;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + pw * (tx(x) - x0) / (x1 - x0); };
  auto py = [&](double y) { return top + ph * (1.0 - (ty(y) - y0) / (y1 - y0)); };

  static constexpr const char* kColors[] = {"steelblue", "firebrick", "darkgreen", "darkorange",
                                            "purple",    "teal",      "saddlebrown", "black"};
  std::string out = header(w, h);
  out += text(w / 2, 22, title, "middle", 14);
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += text(left + pw / 2, h - 12, std::string(x_label) + (log_x ? " (log10)" : ""));
  out += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" font-family=\"sans-serif\" font-size=\"12\" " +
         "text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(top + ph / 2) + ")\">" +
         escape(std::string(y_label) + (log_y ? " (log10)" : "")) + "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
    out += text(left + pw * t / 4.0, top + ph + 16, format_double(std::round(fx * 1000) / 1000), "middle", 10);
    out += text(left - 6, top + ph * (1.0 - t / 4.0) + 4, format_double(std::round(fy * 1000) / 1000), "end", 10);
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (const auto& [x, y] : series[k].points) {
      if (!usable(x, y)) continue;
      pts += num(px(x)) + "," + num(py(y)) + " ";
      out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    if (!pts.empty()) out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(w - right + 10) + "\" y=\"" + num(top + 16.0 * (k + 1)) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" + escape(series[k].label) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace svloc::svg
