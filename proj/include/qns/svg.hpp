// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace qns {

// Minimal static vector-graphics plotter: polylines and scatter markers on
// auto-scaled axes with tick labels. Output is deterministic for identical
// input (no timestamps).
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label,
          int width = 760, int height = 480);

  void add_line(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, const std::string& label = "");
  void add_points(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, const std::string& label = "");
  // Vertical error bars centered on (x, y) with half-width err.
  void add_error_bars(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& err, const std::string& color);
  void set_log_y(bool log_y) { log_y_ = log_y; }

  std::string render() const;

 private:
  struct Series {
    std::vector<double> x, y, err;
    std::string color;
    std::string label;
    enum class Kind { Line, Points, ErrorBars } kind;
  };
  std::string title_, x_label_, y_label_;
  int width_, height_;
  bool log_y_ = false;
  std::vector<Series> series_;
};

}  // namespace qns
