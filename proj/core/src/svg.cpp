#include "bilat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace bilat {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* dash(LineStyle s) {
  switch (s) {
    case LineStyle::Dashed: return " stroke-dasharray=\"8,5\"";
    case LineStyle::DashDot: return " stroke-dasharray=\"9,4,2,4\"";
    case LineStyle::Solid: break;
  }
  return "";
}

// Round step for roughly `target` ticks over span.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void write_svg(const SvgPlot& plot, std::ostream& os) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, s.y[k]);
      y_hi = std::max(y_hi, s.y[k]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (x_hi - x_lo <= 0.0) x_hi = x_lo + 1.0;
  if (y_hi - y_lo <= 0.0) y_hi = y_lo + 1.0;
  const double pad_y = 0.05 * (y_hi - y_lo);
  y_lo -= pad_y;
  y_hi += pad_y;

  const double left = 70, right = 20, top = 40, bottom = 50;
  double pw = plot.width - left - right;
  double ph = plot.height - top - bottom;
  if (plot.equal_aspect) {
    const double scale = std::min(pw / (x_hi - x_lo), ph / (y_hi - y_lo));
    pw = scale * (x_hi - x_lo);
    ph = scale * (y_hi - y_lo);
  }
  auto X = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto Y = [&](double y) { return top + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
     << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!plot.title.empty()) {
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(plot.title) << "</text>\n";
  }
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = tick_step(x_hi - x_lo, 8);
  for (double v = std::ceil(x_lo / xs) * xs; v <= x_hi + 1e-9 * xs; v += xs) {
    os << "<line x1=\"" << num(X(v)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(X(v)) << "\" y2=\""
       << num(top + ph + 5) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(X(v)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
       << num(std::abs(v) < 1e-12 * xs ? 0.0 : v) << "</text>\n";
  }
  const double ys = tick_step(y_hi - y_lo, 6);
  for (double v = std::ceil(y_lo / ys) * ys; v <= y_hi + 1e-9 * ys; v += ys) {
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(Y(v)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(Y(v)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(Y(v) + 4) << "\" text-anchor=\"end\">"
       << num(std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
  }
  if (!plot.x_label.empty()) {
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(top + ph + 38) << "\" text-anchor=\"middle\">"
       << escape(plot.x_label) << "</text>\n";
  }
  if (!plot.y_label.empty()) {
    os << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(plot.y_label) << "</text>\n";
  }

  for (const auto& s : plot.series) {
    std::string points;
    auto flush = [&] {
      if (points.empty()) return;
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << dash(s.style)
         << " points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(X(s.x[k])) + ',' + num(Y(s.y[k]));
    }
    flush();
  }

  double ly = top + 14;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    const double lx = left + pw - 150;
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 30) << "\" y2=\"" << num(ly)
       << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << dash(s.style) << "/>";
    os << "<text x=\"" << num(lx + 36) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
}

}  // namespace bilat
