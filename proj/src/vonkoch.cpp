#include "vonkoch.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace fractile {

Pattern make_pattern(int lambda, std::vector<std::uint8_t> bits) {
  require(lambda >= 3, Errc::invalid_argument, "pattern: lambda must be at least 3");
  require(static_cast<int>(bits.size()) == lambda - 2, Errc::invalid_argument,
          "pattern: expected " + std::to_string(lambda - 2) + " bits for lambda = " + std::to_string(lambda) +
              ", got " + std::to_string(bits.size()));
  Pattern p;
  p.lambda = lambda;
  p.bits = std::move(bits);
  const int m = static_cast<int>(p.bits.size());
  for (int i = 0; i < m; ++i) {
    require(p.bits[i] <= 1, Errc::invalid_argument, "pattern: bits must be 0 or 1");
    p.sigma += p.bits[i];
    if (p.bits[i] && (i == 0 || !p.bits[i - 1])) ++p.beta;
    if (!p.bits[i] && i > 0 && i + 1 < m && p.bits[i - 1] && p.bits[i + 1]) ++p.gamma;
  }
  return p;
}

Pattern parse_pattern(std::string_view literal, int lambda) {
  require(!literal.empty(), Errc::invalid_argument, "pattern literal is empty");
  std::vector<std::uint8_t> bits;
  for (std::size_t i = 0; i < literal.size(); ++i) {
    const char ch = literal[i];
    require(ch == '0' || ch == '1', Errc::invalid_argument,
            "pattern literal: unexpected character '" + std::string(1, ch) + "' at position " +
                std::to_string(i + 1) + " (only 0 and 1 allowed)");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  if (lambda == 0) lambda = static_cast<int>(bits.size()) + 2;
  if (static_cast<int>(bits.size()) > lambda - 2)
    fail(Errc::invalid_argument, "pattern literal: position " + std::to_string(lambda - 1) +
                                     " is past the end; lambda = " + std::to_string(lambda) + " takes " +
                                     std::to_string(lambda - 2) + " bits");
  if (static_cast<int>(bits.size()) < lambda - 2)
    fail(Errc::invalid_argument, "pattern literal: missing bit at position " + std::to_string(bits.size() + 1) +
                                     "; lambda = " + std::to_string(lambda) + " takes " +
                                     std::to_string(lambda - 2) + " bits");
  return make_pattern(lambda, std::move(bits));
}

std::string pattern_literal(const Pattern& p) {
  std::string s;
  for (auto b : p.bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

KochRho random_koch_rho(int lambda, double p) {
  require(lambda >= 3, Errc::invalid_argument, "random von Koch: lambda must be at least 3");
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "random von Koch: p must lie in [0, 1]");
  KochRho r;
  r.rho = lambda + p;
  r.d = std::log(r.rho) / std::log(static_cast<double>(lambda));
  return r;
}

ReproMatrix pattern_matrix(const Pattern& pat) {
  const double l = pat.lambda, b = pat.beta, g = pat.gamma;
  const double p2 = pat.bits.front(), pl = pat.bits.back();
  const double c[4] = {0, 2, 4, 8};
  const double scale2[4] = {0, 1, 2, 4};
  const double m2[4] = {p2 + pl, -p2 - pl + (1 - p2) * (1 - pl), p2 * (1 - pl) + (1 - p2) * pl, p2 * pl};
  std::vector<double> a(16, 0.0);
  for (int k = 1; k <= 4; ++k) {
    const int r = k - 1;
    a[r * 4 + 0] = k * (l - 2 * b + g) - c[r];
    a[r * 4 + 1] = k * (2 * b - 2 * g);
    a[r * 4 + 2] = k * g;
    for (int j = 0; j < 4; ++j) a[r * 4 + j] += scale2[r] * m2[j];
  }
  return ReproMatrix({"T1", "T2", "T3", "T4"}, std::move(a));
}

std::vector<double> pattern_spectrum(const Pattern& pattern) {
  const auto m = pattern_matrix(pattern);
  Eigen::Matrix4d e;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) e(r, c) = m(r, c);
  Eigen::EigenSolver<Eigen::Matrix4d> solver(e, false);
  require(solver.info() == Eigen::Success, Errc::no_convergence, "pattern spectrum: eigen solver failed");
  std::vector<double> out;
  for (int i = 0; i < 4; ++i) {
    const auto z = solver.eigenvalues()[i];
    require(std::abs(z.imag()) < 1e-9, Errc::contract, "pattern spectrum: complex eigenvalue");
    out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> pattern_expected_spectrum(const Pattern& pat) {
  std::vector<double> v = {0.0, 0.0, 1.0 + pat.bits.front() * pat.bits.back(),
                           static_cast<double>(pat.lambda + 2 * pat.beta)};
  std::sort(v.begin(), v.end());
  return v;
}

PatternStats pattern_stats(const Pattern& pat, int n) {
  require(n >= 0, Errc::invalid_argument, "pattern_stats: n must be non-negative");
  const std::uint64_t k = static_cast<std::uint64_t>(pat.lambda + 2 * pat.beta);
  PatternStats s;
  std::uint64_t e = 4;
  for (int i = 0; i < n; ++i) {
    require(e <= UINT64_MAX / k, Errc::overflow, "pattern_stats: edge count overflows");
    e *= k;
  }
  s.boundary_edges = e;
  s.added_tiles = e * static_cast<std::uint64_t>(pat.sigma);
  const double l = pat.lambda;
  s.perimeter = 4.0 * std::pow((l + 2 * pat.beta) / l, n);
  s.added_area = 4.0 * pat.sigma / (l * l) * std::pow((l + 2 * pat.beta) / (l * l), n);
  return s;
}

int strip_position(Kind kind, const Tile& w, int edge, const Tile& c, int lambda) {
  const int n = sides(kind);
  const auto wv = vertices_at(kind, w, lambda, c.level);
  const Point p = wv[edge], q = wv[(edge + 1) % n];
  const std::int64_t ux = (q.x - p.x) / lambda, uy = (q.y - p.y) / lambda;
  int best = -1, on = 0;
  for (const auto& x : vertices(kind, c)) {
    if (!segment_within(x, x, p, q)) continue;
    ++on;
    const std::int64_t t = ux != 0 ? (x.x - p.x) / ux : (x.y - p.y) / uy;
    if (best < 0 || t < best) best = static_cast<int>(t);
  }
  return on >= 2 ? best + 1 : 0;
}

namespace {

// Position of a candidate along the boundary edge it sits on (the first one found).
int candidate_position(const Region& region, const Tile& c) {
  const Kind kind = region.kind();
  const auto sup = supertiles(kind, c, region.lambda());
  for (const auto& w : sup)
    for (int i = 0; i < sides(kind); ++i) {
      if (!region.contains(edge_neighbor(kind, w, i))) continue;
      if (int pos = strip_position(kind, w, i, c, region.lambda())) return pos;
    }
  return 0;
}

}  // namespace

std::uint64_t boundary_edge_count(const Region& region, int m) {
  std::uint64_t e = 0;
  for (const auto& t : region.touching(m))
    for (int i = 0; i < sides(region.kind()); ++i)
      if (region.contains(edge_neighbor(region.kind(), t, i))) ++e;
  return e;
}

std::vector<std::uint64_t> edge_frontier_sizes(const Region& region) {
  std::vector<std::uint64_t> out;
  for (int m = 0; m <= region.level(); ++m) {
    std::uint64_t c = 0;
    for (const auto& t : region.touching(m))
      for (int i = 0; i < sides(region.kind()); ++i)
        if (region.contains(edge_neighbor(region.kind(), t, i))) {
          ++c;
          break;
        }
    out.push_back(c);
  }
  return out;
}

PatternRun simulate_pattern(const Pattern& pat, int n, std::uint64_t max_edges) {
  require(n >= 0, Errc::invalid_argument, "simulate_pattern: n must be non-negative");
  PatternRun run{Region(Kind::square, pat.lambda, {Tile{0, 0, 0, 0}}), {}, {}};
  auto& region = run.region;
  for (int m = 0;; ++m) {
    const auto predicted = pattern_stats(pat, m).boundary_edges;
    require(predicted <= max_edges, Errc::capacity,
            "simulate_pattern: level " + std::to_string(m) + " would carry " + std::to_string(predicted) +
                " boundary edges (budget " + std::to_string(max_edges) + ")");
    run.boundary_edges.push_back(boundary_edge_count(region, m));
    if (m == n) break;
    std::vector<Tile> added;
    for (const auto& c : classify_candidates(region)) {
      if (c.shared_edges != 1 || c.holds_end) continue;
      const int pos = candidate_position(region, c.tile);
      if (pos >= 2 && pos <= pat.lambda - 1 && pat.bits[pos - 2]) added.push_back(c.tile);
    }
    run.added_tiles.push_back(added.size());
    region.push_layer(std::move(added));
  }
  return run;
}

std::vector<std::vector<std::uint64_t>> pattern_census(const PatternRun& run) {
  std::vector<std::vector<std::uint64_t>> out;
  for (int m = 0; m <= run.region.level(); ++m) {
    std::vector<std::uint64_t> c(4, 0);
    for (const auto& e : frontier(run.region, m, 0).entries) ++c[edge_count(e.type) - 1];
    out.push_back(std::move(c));
  }
  return out;
}

void grow_random_koch(Region& region, double p, std::uint64_t seed) {
  require(region.kind() == Kind::triangular, Errc::invalid_argument, "random von Koch runs on triangles");
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "random von Koch: p must lie in [0, 1]");
  const int target = (region.lambda() + 1) / 2;
  const std::uint64_t next = static_cast<std::uint64_t>(region.level()) + 1;
  KeyedRng rng(seed);
  std::vector<Tile> added;
  for (const auto& c : classify_candidates(region)) {
    if (c.group != 1 || candidate_position(region, c.tile) != target) continue;
    if (rng.bernoulli(p, {next, static_cast<std::uint64_t>(c.tile.a), static_cast<std::uint64_t>(c.tile.b),
                          c.tile.o}))
      added.push_back(c.tile);
  }
  region.push_layer(std::move(added));
}

KochMean random_koch_mean(int lambda, double p, std::size_t samples, std::uint64_t seed, int threads) {
  random_koch_rho(lambda, p);  // validates
  require(samples >= 2, Errc::invalid_argument, "random von Koch: need at least two samples");
  std::vector<double> v(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    Region r(Kind::triangular, lambda, {Tile{0, 0, 0, 0}});
    grow_random_koch(r, p, mix64(seed ^ mix64(i + 1)));
    v[i] = static_cast<double>(edge_frontier_sizes(r).back()) / 3.0;
  });
  KochMean m;
  m.samples = samples;
  double s = 0, s2 = 0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  m.mean = s / samples;
  const double var = std::max(0.0, (s2 - samples * m.mean * m.mean) / (samples - 1));
  m.stderr_ = std::sqrt(var / samples);
  return m;
}

}  // namespace fractile
