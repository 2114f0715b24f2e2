// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qns {

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label,
                 int width, int height)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      width_(width),
      height_(height) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& label) {
  series_.push_back({x, y, {}, color, label, Series::Kind::Line});
}

void SvgPlot::add_points(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, const std::string& label) {
  series_.push_back({x, y, {}, color, label, Series::Kind::Points});
}

void SvgPlot::add_error_bars(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& err,
                             const std::string& color) {
  series_.push_back({x, y, err, color, "", Series::Kind::ErrorBars});
}

std::string SvgPlot::render() const {
  const double ml = 70, mr = 20, mt = 40, mb = 55;  // margins
  const double pw = width_ - ml - mr, ph = height_ - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double yv = s.y[i];
      double lo = yv, hi = yv;
      if (s.kind == Series::Kind::ErrorBars && i < s.err.size()) {
        lo -= s.err[i];
        hi += s.err[i];
      }
      if (log_y_ && yv <= 0) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, log_y_ ? std::max(lo, 1e-12) : lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  if (log_y_) ymin = std::max(ymin, 1e-12);

  auto tx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto ty = [&](double y) {
    if (log_y_)
      return mt + ph - (std::log10(std::max(y, 1e-12)) - std::log10(ymin)) /
                           (std::log10(ymax) - std::log10(ymin)) * ph;
    return mt + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream out;
  out.precision(8);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width_
      << "' height='" << height_ << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << width_ / 2 << "' y='22' text-anchor='middle' "
      << "font-family='sans-serif' font-size='15'>" << title_ << "</text>\n";

  // Axes box and ticks.
  out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='"
      << ph << "' fill='none' stroke='black'/>\n";
  const int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double fx = xmin + (xmax - xmin) * t / ticks;
    out << "<line x1='" << tx(fx) << "' y1='" << mt + ph << "' x2='" << tx(fx)
        << "' y2='" << mt + ph + 5 << "' stroke='black'/>\n";
    out << "<text x='" << tx(fx) << "' y='" << mt + ph + 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << fx << "</text>\n";
    double fy;
    if (log_y_)
      fy = std::pow(10.0, std::log10(ymin) +
                              (std::log10(ymax) - std::log10(ymin)) * t / ticks);
    else
      fy = ymin + (ymax - ymin) * t / ticks;
    out << "<line x1='" << ml - 5 << "' y1='" << ty(fy) << "' x2='" << ml
        << "' y2='" << ty(fy) << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << ty(fy) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << fy
        << "</text>\n";
  }
  out << "<text x='" << ml + pw / 2 << "' y='" << height_ - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='13'>"
      << x_label_ << "</text>\n";
  out << "<text x='18' y='" << mt + ph / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
      << "transform='rotate(-90 18 " << mt + ph / 2 << ")'>" << y_label_
      << "</text>\n";

  double legend_y = mt + 14;
  for (const auto& s : series_) {
    if (s.kind == Series::Kind::Line) {
      out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (log_y_ && s.y[i] <= 0) continue;
        out << tx(s.x[i]) << "," << ty(s.y[i]) << " ";
      }
      out << "'/>\n";
    } else if (s.kind == Series::Kind::Points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (log_y_ && s.y[i] <= 0) continue;
        out << "<circle cx='" << tx(s.x[i]) << "' cy='" << ty(s.y[i])
            << "' r='3' fill='" << s.color << "'/>\n";
      }
    } else {
      for (std::size_t i = 0; i < s.x.size() && i < s.err.size(); ++i) {
        const double lo = s.y[i] - s.err[i], hi = s.y[i] + s.err[i];
        if (log_y_ && lo <= 0) continue;
        out << "<line x1='" << tx(s.x[i]) << "' y1='" << ty(lo) << "' x2='"
            << tx(s.x[i]) << "' y2='" << ty(hi) << "' stroke='" << s.color
            << "'/>\n";
      }
    }
    if (!s.label.empty()) {
      out << "<line x1='" << ml + pw - 150 << "' y1='" << legend_y << "' x2='"
          << ml + pw - 130 << "' y2='" << legend_y << "' stroke='" << s.color
          << "' stroke-width='2'/>\n";
      out << "<text x='" << ml + pw - 124 << "' y='" << legend_y + 4
          << "' font-family='sans-serif' font-size='12'>" << s.label
          << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace qns
