#pragma once

#include <string>
#include <vector>

namespace patsim::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

enum class PanelKind { Line, Bar };

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  PanelKind kind = PanelKind::Line;
  std::vector<Series> series;
};

/// Self-contained SVG document laying panels out on a grid. Panels without
/// any data points carry a "no data" annotation.
std::string render(const std::string& title, const std::vector<Panel>& panels, int columns = 2);

std::string escape_xml(const std::string& text);

}  // namespace patsim::svg
