#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace fractile {

bool valid_color(const std::string& c) {
  if (c.size() != 7 || c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(), [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)); });
}

void RenderStyle::validate() const {
  require(width > 0 && height > 0, Errc::invalid_argument, "render: canvas must be positive");
  require(margin >= 0 && 2 * margin < width && 2 * margin < height, Errc::invalid_argument,
          "render: margin leaves no room on the canvas");
  require(stroke_width >= 0 && std::isfinite(stroke_width), Errc::invalid_argument,
          "render: stroke width must be finite and non-negative");
  require(!frontier_ramp.empty(), Errc::invalid_argument, "render: frontier colour ramp is empty");
  for (const auto& c : frontier_ramp)
    require(valid_color(c), Errc::invalid_argument, "render: bad colour '" + c + "' in the frontier ramp");
  for (const auto* c : {&background, &region_fill, &stroke})
    require(valid_color(*c), Errc::invalid_argument, "render: bad colour '" + *c + "' (want #rrggbb)");
  for (const auto& [name, c] : frontier_by_type)
    require(valid_color(c), Errc::invalid_argument, "render: bad colour '" + c + "' for type " + name);
}

namespace {

struct XY {
  double x, y;
};

XY to_plane(Kind k, const Point& p, double scale) {
  if (k == Kind::square) return {p.x * scale, p.y * scale};
  return {(p.x + 0.5 * p.y) * scale, p.y * (std::sqrt(3.0) / 2.0) * scale};
}

}  // namespace

std::string render_svg(const Region& region, int m, const Frontier* frontier, const RenderStyle& style) {
  style.validate();
  const Kind kind = region.kind();
  auto tiles = region.tiles(m);
  require(!tiles.empty(), Errc::invalid_argument, "render: region is empty");
  std::sort(tiles.begin(), tiles.end());
  const double scale = std::pow(static_cast<double>(region.lambda()), -m);

  std::vector<std::vector<XY>> polys;
  std::vector<std::string> fills;
  auto add = [&](const Tile& t, const std::string& fill) {
    std::vector<XY> poly;
    for (const auto& p : vertices(kind, t)) poly.push_back(to_plane(kind, p, scale));
    polys.push_back(std::move(poly));
    fills.push_back(fill);
  };
  for (const auto& t : tiles) add(t, style.region_fill);
  if (frontier) {
    require(frontier->level == m, Errc::contract, "render: frontier level differs from the region level");
    for (const auto& e : frontier->entries) {
      auto it = style.frontier_by_type.find(type_name(kind, e.type));
      if (it != style.frontier_by_type.end()) {
        add(e.tile, it->second);
      } else {
        const auto i = std::min<std::size_t>(edge_count(e.type), style.frontier_ramp.size() - 1);
        add(e.tile, style.frontier_ramp[i]);
      }
    }
  }

  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& poly : polys)
    for (const auto& q : poly) {
      x0 = std::min(x0, q.x);
      x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y);
      y1 = std::max(y1, q.y);
    }
  const double w = style.width - 2.0 * style.margin, h = style.height - 2.0 * style.margin;
  const double s = std::min(w / (x1 - x0), h / (y1 - y0));
  // Centre the drawing; the y axis points down in SVG.
  const double ox = style.margin + (w - s * (x1 - x0)) / 2, oy = style.margin + (h - s * (y1 - y0)) / 2;

  std::ostringstream os;
  char buf[64];
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width << "\" height=\""
     << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height << "\" fill=\""
     << style.background << "\"/>\n";
  std::snprintf(buf, sizeof buf, "%.3f", style.stroke_width);
  os << "<g stroke=\"" << style.stroke << "\" stroke-width=\"" << buf << "\" stroke-linejoin=\"round\">\n";
  for (std::size_t i = 0; i < polys.size(); ++i) {
    os << "<polygon points=\"";
    for (std::size_t j = 0; j < polys[i].size(); ++j) {
      const double px = ox + (polys[i][j].x - x0) * s;
      const double py = oy + (y1 - polys[i][j].y) * s;
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", j ? " " : "", px, py);
      os << buf;
    }
    os << "\" fill=\"" << fills[i] << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace fractile
