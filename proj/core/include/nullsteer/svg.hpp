#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nullsteer/charge.hpp"

namespace nullsteer {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f77b4";
  bool markers = false;  // markers instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 400;
};

std::string line_plot_svg(const PlotSpec& spec, const std::vector<Series>& series);

/// Unit-disk picture: charges as filled circles sized by p_k on the circle,
/// stationary points as crosses.
std::string disk_plot_svg(const std::string& title, const ChargeConfiguration& config,
                          const std::vector<cplx>& roots, int size = 420);

/// Several panels laid out in one row.
std::string side_by_side_svg(const std::vector<std::string>& panels, int panel_width, int panel_height);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nullsteer
