#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bilat {

enum class LineStyle { Solid, Dashed, DashDot };

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  LineStyle style = LineStyle::Solid;
  std::string color = "#1f4e79";
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  bool equal_aspect = false;  // same scale on both axes, for region plots
  int width = 720;
  int height = 480;
};

/// Polylines with axes, ticks and a legend. Non-finite points split a series.
void write_svg(const SvgPlot& plot, std::ostream& os);

}  // namespace bilat
