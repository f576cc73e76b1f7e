#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace eqins::svg {

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

// Standalone SVG with the panels laid out in a grid of `cols` columns.
// Line plots only; no external renderer involved. Throws IoError.
void write_panel_grid(const std::filesystem::path& path,
                      const std::vector<Panel>& panels, int cols,
                      int panel_width = 460, int panel_height = 300);

}  // namespace eqins::svg
