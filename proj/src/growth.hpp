#pragma once

// The random growth process on a tessellation: K_{n+1} is the refinement of K_n plus
// independently drawn boundary tiles. A region is kept as its initial tiles plus the
// tiles added at each step; membership at any level is resolved through the coarser
// levels, so the cost of a step scales with the boundary and not with the area.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lattice.hpp"
#include "types.hpp"

namespace fractile {

struct GrowthParams {
  Kind kind = Kind::square;
  int lambda = 4;
  double p = 0.5;
  int p_star = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

class Region {
 public:
  Region(Kind kind, int lambda, std::vector<Tile> base);

  Kind kind() const { return kind_; }
  int lambda() const { return lambda_; }
  int level() const { return static_cast<int>(layers_.size()) - 1; }

  // Layer 0 holds the initial tiles, layer m the tiles added by step m. Sorted.
  const std::vector<Tile>& layer(int m) const { return layers_.at(m); }
  void push_layer(std::vector<Tile> added);

  // Membership in K_m for a tile of level m <= level(). Not thread-safe (memoized).
  bool contains(const Tile& t) const;

  // Level-m tiles outside K_m sharing at least a vertex with K_m, sorted. Cached.
  const std::vector<Tile>& touching(int m) const;

  // Explicit tile set of K_m; throws a capacity error beyond `cap` tiles.
  std::vector<Tile> tiles(int m, std::size_t cap = 60'000'000) const;
  std::uint64_t tile_count(int m) const;

 private:
  Kind kind_;
  int lambda_;
  std::vector<std::vector<Tile>> layers_;
  std::vector<std::unordered_set<Tile, TileHash>> sets_;
  mutable std::vector<std::unordered_map<Tile, bool, TileHash>> memo_;
  mutable std::vector<std::unique_ptr<std::vector<Tile>>> touching_;
};

Region initial_region(const GrowthParams& params);

// A tile outside the refined region that borders the boundary of K_n.
struct Candidate {
  Tile tile;
  int shared_edges = 0;   // fine edges lying on boundary edges of K_n
  bool holds_end = false;  // contains an endpoint of a boundary edge of K_n
  int group = 0;          // 1: drawn with p, 2: drawn with p_star, 0: never added
};

// Candidates for the step from region.level(), sorted by tile.
std::vector<Candidate> classify_candidates(const Region& region);

// One growth step: appends layer level()+1.
void grow(Region& region, const GrowthParams& params);

struct FrontierEntry {
  Tile tile;
  TypeId type;
  unsigned edge_mask = 0;
  unsigned vertex_mask = 0;
};

struct Frontier {
  int level = 0;
  std::vector<FrontierEntry> entries;  // sorted by tile
};

// R_m: with p_star = 0 the tiles outside K_m sharing a full edge with it, with
// p_star = 1 all tiles outside K_m meeting it.
Frontier frontier(const Region& region, int m, int p_star);
TypeId classify_type(const Region& region, const Tile& t, int p_star);
BoundaryRelation boundary_relation(const Tile& t, const Region& region);

struct GrowthStats {
  int n = 0;
  std::map<TypeId, std::uint64_t> frontier_counts;
  std::uint64_t frontier_total = 0;
  std::uint64_t boundary_edges = 0;  // level-n edges between K_n and its complement
  double perimeter_L = 0.0;
  std::optional<std::uint64_t> added_tiles;  // |K_{n+1} \ refined K_n| when known
  double added_area_A = 0.0;
  std::optional<std::int64_t> holes;  // squares only
  std::uint64_t ring_births = 0;      // frontier tiles with every edge on the boundary
};

GrowthStats region_stats(const Region& region, const Frontier& front, bool with_holes);

// Bounded components of the complement of K_m (squares), by flood fill in the
// bounding box of K_m widened by two tiles.
std::int64_t count_holes(const Region& region, int m);

// Nesting of consecutive frontiers R_m and R_{m+1}.
struct NestingReport {
  std::uint64_t children = 0;
  std::uint64_t strict_violations = 0;   // not contained in exactly one R_m tile
  std::uint64_t straddlers = 0;          // overlaps several coarse tiles, all in R_m
  std::uint64_t split_violations = 0;    // some overlapped coarse tile is not in R_m
  std::uint64_t parents = 0;
  std::uint64_t p2_strict_violations = 0;  // contains no R_{m+1} tile
  std::uint64_t p2_split_violations = 0;   // overlaps no R_{m+1} tile
};
NestingReport check_nesting(const Region& region, int m, int p_star);

// A grown trajectory with frontiers and statistics for levels 0..generations. The
// region is grown one level further so the last added-area value is defined.
struct Trajectory {
  GrowthParams params;
  Region region;
  std::vector<Frontier> frontiers;
  std::vector<GrowthStats> stats;
};
Trajectory run_growth(const GrowthParams& params, int generations, bool with_holes);

std::string region_snapshot_json(const Region& region, int m);

}  // namespace fractile
