#include "patsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace patsim::svg {

namespace {

constexpr double kPanelWidth = 480;
constexpr double kPanelHeight = 320;
constexpr double kTitleHeight = 40;
constexpr double kLeft = 64, kRight = 16, kTop = 36, kBottom = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

void draw_panel(std::ostringstream& out, const Panel& panel, double ox, double oy) {
  const double pw = kPanelWidth - kLeft - kRight;
  const double ph = kPanelHeight - kTop - kBottom;
  out << "<g transform=\"translate(" << num(ox) << ',' << num(oy) << ")\">\n";
  out << "<text x=\"" << num(kPanelWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(panel.title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kPanelHeight - 8)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape_xml(panel.x_label) << "</text>\n";
  out << "<text transform=\"translate(14," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << escape_xml(panel.y_label) << "</text>\n";

  Range xr, yr;
  for (const Series& s : panel.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.add(s.x[i]);
        yr.add(s.y[i]);
      }
  }
  if (xr.empty()) {
    out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kTop + ph / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#888\">no data</text>\n</g>\n";
    return;
  }
  if (panel.kind == PanelKind::Bar) yr.add(0.0);
  double bar_step = std::numeric_limits<double>::infinity();
  if (panel.kind == PanelKind::Bar) {
    std::vector<double> xs;
    for (const Series& s : panel.series) xs.insert(xs.end(), s.x.begin(), s.x.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) bar_step = std::min(bar_step, xs[i] - xs[i - 1]);
    if (!std::isfinite(bar_step)) bar_step = 1.0;
    xr.add(xr.lo - bar_step / 2);
    xr.add(xr.hi + bar_step / 2);
  }
  xr.pad();
  yr.pad();
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  for (int t = 0; t <= 4; ++t) {
    const double xv = xr.lo + t * (xr.hi - xr.lo) / 4;
    const double yv = yr.lo + t * (yr.hi - yr.lo) / 4;
    out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 4) << "\" y=\"" << num(sy(yv) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(yv) << "</text>\n";
    out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(sy(yv)) << "\" y2=\""
        << num(sy(yv)) << "\" stroke=\"#ddd\"/>\n";
  }

  const std::size_t nseries = panel.series.size();
  for (std::size_t k = 0; k < nseries; ++k) {
    const Series& s = panel.series[k];
    const std::size_t m = std::min(s.x.size(), s.y.size());
    if (panel.kind == PanelKind::Line) {
      out << "<polyline fill=\"none\" stroke=\"" << escape_xml(s.color) << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << (first ? "" : " ") << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
        first = false;
      }
      out << "\"/>\n";
    } else {
      const double group = 0.8 * bar_step / (xr.hi - xr.lo) * pw;
      const double width = group / static_cast<double>(nseries);
      for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        const double x0 = sx(s.x[i]) - group / 2 + width * static_cast<double>(k);
        const double y0 = std::min(sy(s.y[i]), sy(0.0));
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(width) << "\" height=\""
            << num(std::abs(sy(s.y[i]) - sy(0.0))) << "\" fill=\"" << escape_xml(s.color) << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = kTop + 12 + 14 * static_cast<double>(k);
      out << "<line x1=\"" << num(kLeft + pw - 110) << "\" x2=\"" << num(kLeft + pw - 94) << "\" y1=\"" << num(ly - 4)
          << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << escape_xml(s.color) << "\" stroke-width=\"3\""
          << (s.dashed ? " stroke-dasharray=\"4,2\"" : "") << "/>\n";
      out << "<text x=\"" << num(kLeft + pw - 90) << "\" y=\"" << num(ly) << "\" font-size=\"10\">"
          << escape_xml(s.label) << "</text>\n";
    }
  }
  out << "</g>\n";
}

}  // namespace

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const std::string& title, const std::vector<Panel>& panels, int columns) {
  columns = std::max(1, std::min<int>(columns, std::max<int>(1, static_cast<int>(panels.size()))));
  const int rows = std::max(1, static_cast<int>((panels.size() + columns - 1) / columns));
  const double width = kPanelWidth * columns;
  const double height = kTitleHeight + kPanelHeight * rows;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(width / 2) << "\" y=\"26\" text-anchor=\"middle\" font-size=\"17\">"
      << escape_xml(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = kPanelWidth * static_cast<double>(i % columns);
    const double oy = kTitleHeight + kPanelHeight * static_cast<double>(i / columns);
    draw_panel(out, panels[i], ox, oy);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace patsim::svg
