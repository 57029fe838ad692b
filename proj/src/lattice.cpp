#include "lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <array>
#include <map>
#include <memory>
#include <mutex>

#include "error.hpp"

namespace fractile {

namespace {

constexpr std::int64_t kTileLimit = std::int64_t{1} << 56;
constexpr std::int64_t kPointLimit = std::int64_t{1} << 60;
constexpr int kMaxLambda = 64;

constexpr std::array<std::array<int, 2>, 6> kHexVertex{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};
constexpr std::array<std::array<int, 2>, 6> kHexEdgeStep{{{0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}}};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::int64_t limit) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r) || r > limit || r < -limit)
    fail(Errc::overflow, "lattice coordinates exceed the 64-bit budget; lower the level");
  return r;
}

void check_tile_range(const Tile& t) {
  if (t.a > kTileLimit || t.a < -kTileLimit || t.b > kTileLimit || t.b < -kTileLimit)
    fail(Errc::overflow, "tile coordinates exceed the 64-bit budget; lower the level");
}

int shape_of(Kind k, const Tile& t) { return k == Kind::triangular ? t.o : 0; }

// Same-level offsets of the tiles meeting vertex i of a tile, found once by scanning.
const std::vector<SubOffset>& vertex_star(Kind k, int shape, int vertex) {
  static const auto tables = [] {
    std::array<std::array<std::vector<std::vector<SubOffset>>, 2>, 3> out;
    for (Kind kk : {Kind::hexagonal, Kind::square, Kind::triangular}) {
      int n = sides(kk);
      for (int s = 0; s < (kk == Kind::triangular ? 2 : 1); ++s) {
        Tile t{0, 0, 0, static_cast<std::uint8_t>(s)};
        auto tv = vertices(kk, t);
        auto& dst = out[static_cast<int>(kk)][s];
        dst.resize(n);
        for (int i = 0; i < n; ++i) {
          for (std::int64_t da = -3; da <= 3; ++da)
            for (std::int64_t db = -3; db <= 3; ++db)
              for (std::uint8_t o = 0; o < (kk == Kind::triangular ? 2 : 1); ++o) {
                Tile u{0, da, db, o};
                if (u == t) continue;
                if (contains_point(vertices(kk, u), tv[i])) dst[i].push_back({da, db, o});
              }
        }
      }
    }
    return out;
  }();
  return tables[static_cast<int>(k)][shape][vertex];
}

std::unique_ptr<Refinement> build_refinement(Kind k, int lambda) {
  auto r = std::make_unique<Refinement>();
  r->kind = k;
  r->lambda = lambda;
  const int l = lambda;
  const int shapes = k == Kind::triangular ? 2 : 1;
  if (k == Kind::square) {
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) r->sub[0].push_back({i, j, 0});
  } else if (k == Kind::triangular) {
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        if (i + j <= l - 1) r->sub[0].push_back({i, j, 0});
        if (i + j <= l - 2) r->sub[0].push_back({i, j, 1});
        if (i + j >= l) r->sub[1].push_back({i, j, 0});
        if (i + j >= l - 1) r->sub[1].push_back({i, j, 1});
      }
  } else {
    Tile big{0, 0, 0, 0};
    auto bv = vertices_at(k, big, l, 1);
    for (int u = -l - 2; u <= l + 2; ++u)
      for (int v = -l - 2; v <= l + 2; ++v)
        if (interiors_overlap(bv, vertices(k, Tile{1, u, v, 0}))) r->sub[0].push_back({u, v, 0});
    r->super.resize(static_cast<std::size_t>(l) * l);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        auto sv = vertices(k, Tile{1, i, j, 0});
        for (int dq = -3; dq <= 3; ++dq)
          for (int dr = -3; dr <= 3; ++dr)
            if (interiors_overlap(vertices_at(k, Tile{0, dq, dr, 0}, l, 1), sv))
              r->super[static_cast<std::size_t>(i) * l + j].push_back({dq, dr, 0});
      }
  }
  const int n = sides(k);
  for (int s = 0; s < shapes; ++s) {
    Tile big{0, 0, 0, static_cast<std::uint8_t>(s)};
    auto bv = vertices_at(k, big, l, 1);
    r->strip[s].assign(n, {});
    r->fan[s].assign(n, {});
    for (const auto& off : r->sub[s]) {
      auto tv = vertices(k, r->child(big, off));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (segment_within(tv[j], tv[(j + 1) % n], bv[i], bv[(i + 1) % n]))
            r->strip[s][i].push_back({off, static_cast<std::uint8_t>(j)});
      for (int i = 0; i < n; ++i)
        if (contains_point(tv, bv[i])) r->fan[s][i].push_back(off);
    }
  }
  return r;
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::hexagonal: return "hexagonal";
    case Kind::square: return "square";
    case Kind::triangular: return "triangular";
  }
  return "?";
}

Kind parse_kind(std::string_view s) {
  if (s == "hexagonal" || s == "hex" || s == "h") return Kind::hexagonal;
  if (s == "square" || s == "sq" || s == "s") return Kind::square;
  if (s == "triangular" || s == "tri" || s == "t") return Kind::triangular;
  fail(Errc::invalid_argument, "unknown tessellation kind '" + std::string(s) + "'");
}

int sides(Kind k) { return k == Kind::hexagonal ? 6 : (k == Kind::square ? 4 : 3); }
int sectors(Kind k) { return sides(k); }
int min_lambda(Kind k) { return k == Kind::hexagonal ? 2 : 3; }

void check_lambda(Kind k, int lambda) {
  require(lambda >= min_lambda(k) && lambda <= kMaxLambda, Errc::invalid_argument,
          std::string("lambda out of range for ") + kind_name(k) + ": " + std::to_string(lambda));
}

std::size_t TileHash::operator()(const Tile& t) const noexcept {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(static_cast<std::uint64_t>(t.a));
  h = mix(h ^ static_cast<std::uint64_t>(t.b));
  h = mix(h ^ (static_cast<std::uint64_t>(t.level) << 8 | t.o));
  return static_cast<std::size_t>(h);
}

EdgeRef make_edge(Point p, Point q, int level) {
  if (q < p) std::swap(p, q);
  return EdgeRef{p, q, level};
}

__int128 cross(Point o, Point a, Point b) {
  return static_cast<__int128>(a.x - o.x) * (b.y - o.y) - static_cast<__int128>(a.y - o.y) * (b.x - o.x);
}

bool interiors_overlap(const std::vector<Point>& p, const std::vector<Point>& q) {
  // Separating axis on edge lines: interiors are disjoint iff some edge line has the
  // other polygon weakly on its outer side.
  auto separated = [](const std::vector<Point>& a, const std::vector<Point>& b) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& o = a[i];
      const Point& e = a[(i + 1) % n];
      bool all_out = std::all_of(b.begin(), b.end(), [&](const Point& x) { return cross(o, e, x) <= 0; });
      if (all_out) return true;
    }
    return false;
  };
  return !separated(p, q) && !separated(q, p);
}

bool contains_point(const std::vector<Point>& poly, Point x) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cross(poly[i], poly[(i + 1) % n], x) < 0) return false;
  return true;
}

bool contains_polygon(const std::vector<Point>& outer, const std::vector<Point>& inner) {
  return std::all_of(inner.begin(), inner.end(), [&](const Point& x) { return contains_point(outer, x); });
}

bool segment_within(Point p, Point q, Point a, Point b) {
  if (cross(a, b, p) != 0 || cross(a, b, q) != 0) return false;
  auto inside = [&](const Point& x) {
    return std::min(a.x, b.x) <= x.x && x.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= x.y &&
           x.y <= std::max(a.y, b.y);
  };
  return inside(p) && inside(q);
}

__int128 twice_area(const std::vector<Point>& poly) {
  __int128 s = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& u = poly[i];
    const Point& v = poly[(i + 1) % n];
    s += static_cast<__int128>(u.x) * v.y - static_cast<__int128>(u.y) * v.x;
  }
  return s;
}

__int128 norm2(Kind k, std::int64_t dx, std::int64_t dy) {
  __int128 x = dx, y = dy;
  return k == Kind::square ? x * x + y * y : x * x + x * y + y * y;
}

std::vector<Point> vertices(Kind k, const Tile& t) {
  const std::int64_t a = t.a, b = t.b;
  switch (k) {
    case Kind::square: return {{a, b}, {a + 1, b}, {a + 1, b + 1}, {a, b + 1}};
    case Kind::triangular:
      if (t.o == 0) return {{a, b}, {a + 1, b}, {a, b + 1}};
      return {{a + 1, b}, {a + 1, b + 1}, {a, b + 1}};
    case Kind::hexagonal: {
      std::vector<Point> v;
      v.reserve(6);
      for (const auto& d : kHexVertex) v.push_back({2 * a + b + d[0], b - a + d[1]});
      return v;
    }
  }
  return {};
}

std::vector<Point> vertices_at(Kind k, const Tile& t, int lambda, int level) {
  require(level >= t.level, Errc::contract, "vertices_at: target level is coarser than the tile");
  check_tile_range(t);
  std::int64_t s = 1;
  for (int i = t.level; i < level; ++i) s = checked_mul(s, lambda, kPointLimit);
  auto v = vertices(k, t);
  for (auto& p : v) {
    p.x = checked_mul(p.x, s, kPointLimit);
    p.y = checked_mul(p.y, s, kPointLimit);
  }
  return v;
}

Tile edge_neighbor(Kind k, const Tile& t, int edge) {
  Tile u = t;
  switch (k) {
    case Kind::square: {
      static constexpr int d[4][2] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
      u.a += d[edge][0];
      u.b += d[edge][1];
      return u;
    }
    case Kind::triangular: {
      static constexpr int up[3][2] = {{0, -1}, {0, 0}, {-1, 0}};
      static constexpr int down[3][2] = {{1, 0}, {0, 1}, {0, 0}};
      const auto& d = t.o == 0 ? up[edge] : down[edge];
      u.a += d[0];
      u.b += d[1];
      u.o = t.o ^ 1;
      return u;
    }
    case Kind::hexagonal:
      u.a += kHexEdgeStep[edge][0];
      u.b += kHexEdgeStep[edge][1];
      return u;
  }
  return u;
}

std::vector<Tile> edge_adjacent_tiles(Kind k, const Tile& t) {
  std::vector<Tile> out;
  for (int i = 0; i < sides(k); ++i) out.push_back(edge_neighbor(k, t, i));
  return out;
}

std::vector<Tile> tiles_at_vertex(Kind k, const Tile& t, int vertex) {
  std::vector<Tile> out;
  for (const auto& d : vertex_star(k, shape_of(k, t), vertex))
    out.push_back(Tile{t.level, t.a + d.da, t.b + d.db, d.o});
  return out;
}

std::vector<Tile> vertex_adjacent_tiles(Kind k, const Tile& t) {
  std::vector<Tile> out;
  for (int i = 0; i < sides(k); ++i) {
    auto s = tiles_at_vertex(k, t, i);
    out.insert(out.end(), s.begin(), s.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const Refinement& refinement(Kind k, int lambda) {
  check_lambda(k, lambda);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Refinement>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{static_cast<int>(k), lambda}];
  if (!slot) slot = build_refinement(k, lambda);
  return *slot;
}

std::vector<Tile> subtiles(Kind k, const Tile& parent, int lambda) {
  check_tile_range(parent);
  checked_mul(std::max(std::abs(parent.a), std::abs(parent.b)) + 1, lambda, kTileLimit);
  const auto& r = refinement(k, lambda);
  std::vector<Tile> out;
  const auto& offs = r.sub[shape_of(k, parent)];
  out.reserve(offs.size());
  for (const auto& s : offs) out.push_back(r.child(parent, s));
  return out;
}

std::vector<Tile> supertiles(Kind k, const Tile& t, int lambda) {
  require(t.level > 0, Errc::contract, "supertiles: level-0 tile has no coarser level");
  const std::int64_t l = lambda;
  const std::int64_t a0 = floor_div(t.a, l), b0 = floor_div(t.b, l);
  const std::int64_t i = t.a - a0 * l, j = t.b - b0 * l;
  switch (k) {
    case Kind::square: return {Tile{t.level - 1, a0, b0, 0}};
    case Kind::triangular: {
      bool up = t.o == 0 ? (i + j <= l - 1) : (i + j <= l - 2);
      return {Tile{t.level - 1, a0, b0, static_cast<std::uint8_t>(up ? 0 : 1)}};
    }
    case Kind::hexagonal: {
      const auto& r = refinement(k, lambda);
      std::vector<Tile> out;
      for (const auto& d : r.super[static_cast<std::size_t>(i * l + j)])
        out.push_back(Tile{t.level - 1, a0 + d.da, b0 + d.db, 0});
      return out;
    }
  }
  return {};
}

bool tile_contains(Kind k, const Tile& outer, const Tile& inner, int lambda) {
  require(inner.level >= outer.level, Errc::contract, "tile_contains: inner tile is coarser");
  return contains_polygon(vertices_at(k, outer, lambda, inner.level), vertices(k, inner));
}

bool tiles_overlap(Kind k, const Tile& s, const Tile& t, int lambda) {
  int level = std::max(s.level, t.level);
  return interiors_overlap(vertices_at(k, s, lambda, level), vertices_at(k, t, lambda, level));
}

BoundaryRelation boundary_relation(Kind k, const Tile& t, const std::function<bool(const Tile&)>& in_region) {
  BoundaryRelation rel;
  rel.touches_interior = in_region(t);
  const int n = sides(k);
  auto v = vertices(k, t);
  for (int i = 0; i < n; ++i)
    if (in_region(edge_neighbor(k, t, i))) {
      rel.edge_mask |= 1u << i;
      rel.shared_edges.push_back(make_edge(v[i], v[(i + 1) % n], t.level));
    }
  for (int i = 0; i < n; ++i) {
    auto star = tiles_at_vertex(k, t, i);
    if (std::any_of(star.begin(), star.end(), in_region)) rel.vertex_mask |= 1u << i;
  }
  for (int i = 0; i < n; ++i) {
    bool on_edge = (rel.edge_mask >> i & 1u) || (rel.edge_mask >> ((i + n - 1) % n) & 1u);
    if ((rel.vertex_mask >> i & 1u) && !on_edge) ++rel.shared_vertices;
  }
  return rel;
}

std::string to_string(Kind k, const Tile& t) {
  std::string s = k == Kind::hexagonal ? "H" : (k == Kind::square ? "S" : (t.o ? "D" : "U"));
  return s + "(" + std::to_string(t.level) + ";" + std::to_string(t.a) + "," + std::to_string(t.b) + ")";
}

}  // namespace fractile
