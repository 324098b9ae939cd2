#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mcps {

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart (one polyline per series, with legend) as a standalone SVG file.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

}  // namespace mcps
