#pragma once

// SVG output of a region and, optionally, its frontier.

#include <map>
#include <string>
#include <vector>

#include "growth.hpp"

namespace fractile {

struct RenderStyle {
  std::string background = "#ffffff";
  std::string region_fill = "#000000";
  // Frontier colour: by type name when listed, otherwise by the number of boundary
  // edges the tile carries (index clamped to the ramp).
  std::map<std::string, std::string> frontier_by_type;
  std::vector<std::string> frontier_ramp = {"#d6d6d6", "#bdbdbd", "#9e9e9e", "#7a7a7a",
                                            "#5c5c5c", "#424242", "#2e2e2e"};
  std::string stroke = "#ffffff";
  double stroke_width = 0.5;
  int width = 800;
  int height = 800;
  int margin = 20;

  void validate() const;
};

// One polygon per tile of K_m, then one per frontier tile (coloured by type), inside a
// background rect. Elements are emitted in tile order so equal inputs give equal bytes.
std::string render_svg(const Region& region, int m, const Frontier* frontier, const RenderStyle& style);

bool valid_color(const std::string& c);

}  // namespace fractile
