#pragma once

// Integer lattice geometry for the square, triangular and hexagonal tessellations.
//
// Square tiles use the orthonormal grid. Triangles and hexagons use the 60 degree
// rhombic basis e1 = (1, 0), e2 = (1/2, sqrt(3)/2), in which every vertex is an
// integer point:
//   up triangle   (i, j): (i, j), (i+1, j), (i, j+1)
//   down triangle (i, j): (i+1, j), (i+1, j+1), (i, j+1)
//   hexagon (q, r): centre (2q + r, r - q), vertices centre + {(1,0), (0,1), (-1,1),
//   (-1,0), (0,-1), (1,-1)} (edge length one rhombic unit).
// A level-n tile lives on the lattice scaled by lambda^-n, so comparing tiles of
// different levels only needs a multiplication by a power of lambda.

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace fractile {

enum class Kind : std::uint8_t { hexagonal = 0, square = 1, triangular = 2 };

const char* kind_name(Kind k);
Kind parse_kind(std::string_view s);

int sides(Kind k);     // edges (and vertices) per tile
int sectors(Kind k);   // number of i.i.d. frontier sectors around the initial tile
int min_lambda(Kind k);
void check_lambda(Kind k, int lambda);

struct Tile {
  std::int32_t level = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::uint8_t o = 0;  // 0 = up, 1 = down; always 0 for squares and hexagons

  auto operator<=>(const Tile&) const = default;
};

struct TileHash {
  std::size_t operator()(const Tile& t) const noexcept;
};

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const Point&) const = default;
};

struct EdgeRef {
  Point p;
  Point q;
  std::int32_t level = 0;
  auto operator<=>(const EdgeRef&) const = default;
};

EdgeRef make_edge(Point p, Point q, int level);  // endpoints stored in sorted order

// Exact predicates. Polygons are convex and counter-clockwise.
__int128 cross(Point o, Point a, Point b);
bool interiors_overlap(const std::vector<Point>& p, const std::vector<Point>& q);
bool contains_point(const std::vector<Point>& poly, Point x);
bool contains_polygon(const std::vector<Point>& outer, const std::vector<Point>& inner);
bool segment_within(Point p, Point q, Point a, Point b);  // [p,q] lies on [a,b]
__int128 twice_area(const std::vector<Point>& poly);
// Squared Euclidean length of a lattice vector in the tile kind's basis.
__int128 norm2(Kind k, std::int64_t dx, std::int64_t dy);

std::vector<Point> vertices(Kind k, const Tile& t);
// Vertices expressed on the finer lattice of `level` (>= t.level).
std::vector<Point> vertices_at(Kind k, const Tile& t, int lambda, int level);

Tile edge_neighbor(Kind k, const Tile& t, int edge);  // edge i joins vertex i and i+1
std::vector<Tile> edge_adjacent_tiles(Kind k, const Tile& t);
std::vector<Tile> tiles_at_vertex(Kind k, const Tile& t, int vertex);  // excluding t
std::vector<Tile> vertex_adjacent_tiles(Kind k, const Tile& t);        // sorted, excluding t

// Tiles one level finer whose intersection with the parent has positive area.
std::vector<Tile> subtiles(Kind k, const Tile& parent, int lambda);
// Tiles one level coarser with positive-area intersection with t.
std::vector<Tile> supertiles(Kind k, const Tile& t, int lambda);
bool tile_contains(Kind k, const Tile& outer, const Tile& inner, int lambda);
bool tiles_overlap(Kind k, const Tile& s, const Tile& t, int lambda);

// Per-(kind, lambda) refinement data used by the growth step. Offsets are relative to
// (lambda * a, lambda * b) of the coarse tile; `shape` is the coarse orientation.
struct SubOffset {
  std::int64_t da;
  std::int64_t db;
  std::uint8_t o;
};
struct StripEntry {
  SubOffset sub;
  std::uint8_t edge;  // index of the fine tile's edge lying on the coarse edge
};
struct Refinement {
  Kind kind;
  int lambda;
  std::vector<SubOffset> sub[2];
  std::vector<std::vector<StripEntry>> strip[2];  // [shape][coarse edge]
  std::vector<std::vector<SubOffset>> fan[2];     // [shape][coarse vertex]
  std::vector<std::vector<SubOffset>> super;      // hexagons: by residue (a mod l, b mod l)

  Tile child(const Tile& parent, const SubOffset& s) const {
    return Tile{parent.level + 1, parent.a * lambda + s.da, parent.b * lambda + s.db, s.o};
  }
};
const Refinement& refinement(Kind k, int lambda);

// What a same-level tile shares with a region.
struct BoundaryRelation {
  std::vector<EdgeRef> shared_edges;
  int shared_vertices = 0;  // contact vertices that are not endpoints of a shared edge
  bool touches_interior = false;
  unsigned edge_mask = 0;    // bit i: edge i lies on the region boundary
  unsigned vertex_mask = 0;  // bit i: vertex i belongs to the region
};
BoundaryRelation boundary_relation(Kind k, const Tile& t,
                                   const std::function<bool(const Tile&)>& in_region);

std::string to_string(Kind k, const Tile& t);

}  // namespace fractile
