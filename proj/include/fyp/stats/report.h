#pragma once

#include <string>
#include <vector>

#include "fyp/stats/stats.h"

namespace fyp::stats {

// A delimited text table. Cells must not contain tabs or newlines.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void AddRow(std::vector<std::string> row);
  std::string ToTsv() const;
};

// Renders a number for tables: integers exactly, everything else with
// `digits` significant digits.
std::string FormatNumber(double value, int digits = 6);

struct Series {
  std::string label;
  std::vector<double> values;  // y at x = 1, 2, ...
};

// Line plot of series sharing one x axis (cumulative delivery curves).
std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Series>& series);

struct IntervalBar {
  std::string label;
  double point = 0;
  Interval interval;
};

// Point estimates with confidence-interval whiskers, one row per bar.
std::string IntervalChartSvg(const std::string& title, const std::vector<IntervalBar>& bars);

}  // namespace fyp::stats
