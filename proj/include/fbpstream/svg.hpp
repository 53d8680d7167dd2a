#pragma once

#include <string>

#include "fbpstream/fboxplot.hpp"

namespace fbpstream {

struct SvgStyle {
  int width = 640;
  int height = 400;
  std::string envelope_color = "blue";
  std::string region_color = "magenta";
  std::string median_color = "yellow";
  double region_opacity = 0.5;
  std::string title;
};

// Standalone SVG figure of one functional boxplot: the central region as a
// filled polygon, the five component curves as polylines, and axes with
// numeric ticks. Output depends only on the inputs.
std::string render_fbp_svg(const FunctionalBoxplot& fbp, const SvgStyle& style = {});

}  // namespace fbpstream
