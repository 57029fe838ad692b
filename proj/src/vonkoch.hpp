#pragma once

// Two checkable special cases of the growth rule: the random von Koch curve on the
// triangular lattice and the deterministic edge patterns on the square lattice.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "growth.hpp"
#include "matrices.hpp"

namespace fractile {

struct Pattern {
  int lambda = 0;
  std::vector<std::uint8_t> bits;  // positions 2..lambda-1 along an edge
  int beta = 0;   // blocks of consecutive ones
  int gamma = 0;  // zeros with a one on both sides
  int sigma = 0;  // number of ones
};

// From an explicit bit vector of length lambda - 2.
Pattern make_pattern(int lambda, std::vector<std::uint8_t> bits);
// Literal such as "10011". lambda = 0 infers lambda from the length. Bad characters
// and length mismatches are reported with their 1-based position.
Pattern parse_pattern(std::string_view literal, int lambda = 0);
std::string pattern_literal(const Pattern& p);

struct KochRho {
  double rho = 0.0;
  double d = 0.0;
};
KochRho random_koch_rho(int lambda, double p);

// M1 + M2 over the types T1..T4 (number of boundary edges).
ReproMatrix pattern_matrix(const Pattern& pattern);
// Eigenvalues of the pattern matrix, sorted ascending (real parts; the spectrum is real).
std::vector<double> pattern_spectrum(const Pattern& pattern);
// {0, 0, 1 + p2 p_{lambda-1}, lambda + 2 beta}, sorted. The trace of M1 + M2 equals
// lambda + 2 beta + 1 + p2 p_{lambda-1}, which leaves no room for an eigenvalue 1
// besides these.
std::vector<double> pattern_expected_spectrum(const Pattern& pattern);

struct PatternStats {
  double perimeter = 0.0;   // L(K_n)
  double added_area = 0.0;  // A(K_{n+1} minus K_n)
  std::uint64_t boundary_edges = 0;  // lambda^n L(K_n), exact
  std::uint64_t added_tiles = 0;     // lambda^{2(n+1)} A, exact
};
PatternStats pattern_stats(const Pattern& pattern, int n);

struct PatternRun {
  Region region;
  std::vector<std::uint64_t> boundary_edges;  // levels 0..n
  std::vector<std::uint64_t> added_tiles;     // steps 0..n-1
};

// Grows the unit square n times, adding on every boundary edge of K_m (clockwise,
// positions counted from the edge start) the fine squares selected by the pattern.
// A selected square must share exactly one edge with the boundary and hold no edge
// end. Throws a capacity error when a level would exceed `max_edges` boundary edges.
// Frontier census by number of boundary edges (T1..T4) at every level of a run.
std::vector<std::vector<std::uint64_t>> pattern_census(const PatternRun& run);

PatternRun simulate_pattern(const Pattern& pattern, int n, std::uint64_t max_edges = 20'000'000);

// Random von Koch growth: triangular lattice, only the ceil(lambda/2)-th fine tile
// along each boundary edge is a candidate, drawn with probability p.
void grow_random_koch(Region& region, double p, std::uint64_t seed);

// Frontier size (tiles sharing an edge with K_m) for m = 0..level.
std::vector<std::uint64_t> edge_frontier_sizes(const Region& region);
std::uint64_t boundary_edge_count(const Region& region, int m);

struct KochMean {
  double mean = 0.0;    // children per parent edge
  double stderr_ = 0.0;
  std::size_t samples = 0;
};
// One step from the unit triangle, repeated: the frontier of K_1 divided by 3.
KochMean random_koch_mean(int lambda, double p, std::size_t samples, std::uint64_t seed, int threads = 1);

// Position (1..lambda) of fine tile `c` along the coarse edge `edge` of `w`, walking from
// vertex `edge` to vertex `edge`+1; 0 when c has no edge on it.
int strip_position(Kind kind, const Tile& w, int edge, const Tile& c, int lambda);

}  // namespace fractile
