#include "fyp/stats/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fyp/common/error.h"

namespace fyp::stats {
namespace {

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void Table::AddRow(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::kConfig, "table row has " + std::to_string(row.size()) +
                                        " cells, expected " + std::to_string(columns.size()));
  }
  for (const auto& cell : row) {
    if (cell.find_first_of("\t\n") != std::string::npos) {
      throw Error(ErrorCode::kConfig, "table cell contains a tab or newline");
    }
  }
  rows.push_back(std::move(row));
}

std::string Table::ToTsv() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back('\t');
      out += cells[i];
    }
    out.push_back('\n');
  };
  emit(columns);
  for (const auto& r : rows) emit(r);
  return out;
}

std::string FormatNumber(double value, int digits) {
  if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", value);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Series>& series) {
  const double width = 640, height = 400, left = 60, right = 170, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  std::size_t max_len = 1;
  double max_y = 1;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.values.size());
    for (double v : s.values) max_y = std::max(max_y, v);
  }
  auto x_at = [&](std::size_t i) { return left + plot_w * static_cast<double>(i) / max_len; };
  auto y_at = [&](double v) { return top + plot_h * (1.0 - v / max_y); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                    "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Fixed(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         Escape(title) + "</text>\n";
  svg += "<line x1=\"" + Fixed(left) + "\" y1=\"" + Fixed(top + plot_h) + "\" x2=\"" +
         Fixed(left + plot_w) + "\" y2=\"" + Fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + Fixed(left) + "\" y1=\"" + Fixed(top) + "\" x2=\"" + Fixed(left) +
         "\" y2=\"" + Fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = max_y * k / 4.0;
    svg += "<text x=\"" + Fixed(left - 6) + "\" y=\"" + Fixed(y_at(v) + 4) +
           "\" text-anchor=\"end\">" + FormatNumber(std::round(v)) + "</text>\n";
    double xi = static_cast<double>(max_len) * k / 4.0;
    svg += "<text x=\"" + Fixed(x_at(static_cast<std::size_t>(xi))) + "\" y=\"" +
           Fixed(top + plot_h + 16) + "\" text-anchor=\"middle\">" +
           FormatNumber(std::round(xi)) + "</text>\n";
  }
  svg += "<text x=\"" + Fixed(left + plot_w / 2) + "\" y=\"" + Fixed(height - 10) +
         "\" text-anchor=\"middle\">" + Escape(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + Fixed(top + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + Fixed(top + plot_h / 2) +
         ")\">" + Escape(y_label) + "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points = Fixed(x_at(0)) + "," + Fixed(y_at(0));
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      points += " " + Fixed(x_at(i + 1)) + "," + Fixed(y_at(series[s].values[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    double ly = top + 14.0 * static_cast<double>(s);
    svg += "<line x1=\"" + Fixed(width - right + 10) + "\" y1=\"" + Fixed(ly) + "\" x2=\"" +
           Fixed(width - right + 28) + "\" y2=\"" + Fixed(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + Fixed(width - right + 32) + "\" y=\"" + Fixed(ly + 4) + "\">" +
           Escape(series[s].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string IntervalChartSvg(const std::string& title, const std::vector<IntervalBar>& bars) {
  const double width = 640, left = 190, right = 30, top = 40, row_h = 24;
  const double height = top + row_h * static_cast<double>(bars.size()) + 40;
  const double plot_w = width - left - right;
  auto x_at = [&](double p) { return left + plot_w * p; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"" +
                    Fixed(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"" + Fixed(height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + Escape(title) +
         "</text>\n";
  for (int k = 0; k <= 5; ++k) {
    double p = k / 5.0;
    svg += "<line x1=\"" + Fixed(x_at(p)) + "\" y1=\"" + Fixed(top - 6) + "\" x2=\"" +
           Fixed(x_at(p)) + "\" y2=\"" + Fixed(height - 34) +
           "\" stroke=\"#dddddd\"/>\n<text x=\"" + Fixed(x_at(p)) + "\" y=\"" +
           Fixed(height - 20) + "\" text-anchor=\"middle\">" + FormatNumber(p, 2) + "</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    double y = top + row_h * (static_cast<double>(i) + 0.5);
    svg += "<text x=\"" + Fixed(left - 8) + "\" y=\"" + Fixed(y + 4) + "\" text-anchor=\"end\">" +
           Escape(b.label) + "</text>\n";
    svg += "<line x1=\"" + Fixed(x_at(b.interval.lo)) + "\" y1=\"" + Fixed(y) + "\" x2=\"" +
           Fixed(x_at(b.interval.hi)) + "\" y2=\"" + Fixed(y) +
           "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg += "<circle cx=\"" + Fixed(x_at(b.point)) + "\" cy=\"" + Fixed(y) +
           "\" r=\"3.5\" fill=\"#d62728\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fyp::stats
