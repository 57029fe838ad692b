#pragma once

// Frontier tile types: the pattern of edges and vertices a tile shares with the region,
// taken up to the symmetries of the tile.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace fractile {

struct TypeId {
  std::uint8_t edges = 0;  // bit i: edge i on the boundary
  std::uint8_t verts = 0;  // bit i: vertex i in the region (kept only when p_star = 1)
  auto operator<=>(const TypeId&) const = default;
};

// Canonical representative under rotations and reflections. With p_star = 0 the
// vertex mask is dropped. Throws when the masks are inconsistent (an edge without
// its endpoints) or empty.
TypeId canonical_type(Kind k, unsigned edges, unsigned verts, int p_star);
bool is_canonical(Kind k, TypeId t);

std::string type_name(Kind k, TypeId t);
int edge_count(TypeId t);   // v0: boundary edges carried by the tile
int extra_vertices(Kind k, TypeId t);

// Survivor types in matrix order: T1, T2 and, for squares with p_star = 1, T0.
std::vector<TypeId> survivor_types(Kind k, int p_star);
TypeId type_t1(Kind k, int p_star);
TypeId type_t2(Kind k, int p_star);
TypeId type_t0(Kind k);

// Coefficients expressing a type's offspring row through the survivor rows. Each
// maximal run of m consecutive boundary edges counts as (2 - m) T1 + (m - 1) T2, a
// closed ring of n edges as -n T1 + n T2, and every contact vertex away from the
// edges as one T0. Survivors map to unit vectors.
std::vector<double> reduction_coefficients(Kind k, int p_star, TypeId t);

}  // namespace fractile
