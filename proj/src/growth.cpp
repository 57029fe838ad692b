#include "growth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace fractile {

void GrowthParams::validate() const {
  check_lambda(kind, lambda);
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "p must lie in [0, 1]");
  require(p_star == 0 || p_star == 1, Errc::invalid_argument, "p_star must be 0 or 1");
  require(!(kind == Kind::triangular && p_star == 1), Errc::unsupported,
          "triangular tessellation with p_star = 1 is not supported");
}

Region::Region(Kind kind, int lambda, std::vector<Tile> base) : kind_(kind), lambda_(lambda) {
  check_lambda(kind, lambda);
  require(!base.empty(), Errc::invalid_argument, "region needs at least one tile");
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  for (const auto& t : base) require(t.level == 0, Errc::contract, "initial tiles must have level 0");
  layers_.push_back(std::move(base));
  sets_.emplace_back(layers_[0].begin(), layers_[0].end());
  memo_.emplace_back();
  touching_.emplace_back();
}

void Region::push_layer(std::vector<Tile> added) {
  std::sort(added.begin(), added.end());
  added.erase(std::unique(added.begin(), added.end()), added.end());
  const int m = level() + 1;
  for (const auto& t : added) require(t.level == m, Errc::contract, "added tile has the wrong level");
  layers_.push_back(std::move(added));
  sets_.emplace_back(layers_.back().begin(), layers_.back().end());
  memo_.emplace_back();
  touching_.emplace_back();
}

bool Region::contains(const Tile& t) const {
  const int m = t.level;
  require(m >= 0 && m <= level(), Errc::contract, "membership query above the region level");
  if (sets_[m].count(t)) return true;
  if (m == 0) return false;
  auto& memo = memo_[m];
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  bool in = false;
  for (const auto& s : supertiles(kind_, t, lambda_))
    if (contains(s)) {
      in = true;
      break;
    }
  memo.emplace(t, in);
  return in;
}

const std::vector<Tile>& Region::touching(int m) const {
  require(m >= 0 && m <= level(), Errc::contract, "frontier query above the region level");
  if (touching_[m]) return *touching_[m];
  std::vector<Tile> cand;
  if (m == 0) {
    for (const auto& t : layers_[0]) {
      auto nb = vertex_adjacent_tiles(kind_, t);
      cand.insert(cand.end(), nb.begin(), nb.end());
    }
  } else {
    // A level-m tile outside K_m that touches K_m lies inside tiles that touched
    // K_{m-1}: fine tiles are too small to bridge a gap between non-touching coarse
    // tiles. Hexagons at lambda = 2 are the exception, so widen the search there.
    std::vector<Tile> coarse = touching(m - 1);
    if (kind_ == Kind::hexagonal && lambda_ == 2) {
      std::vector<Tile> ring;
      for (const auto& w : coarse)
        for (const auto& u : edge_adjacent_tiles(kind_, w))
          if (!contains(u)) ring.push_back(u);
      coarse.insert(coarse.end(), ring.begin(), ring.end());
      std::sort(coarse.begin(), coarse.end());
      coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
    }
    for (const auto& w : coarse) {
      auto sub = subtiles(kind_, w, lambda_);
      cand.insert(cand.end(), sub.begin(), sub.end());
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto out = std::make_unique<std::vector<Tile>>();
  for (const auto& t : cand) {
    if (contains(t)) continue;
    auto nb = vertex_adjacent_tiles(kind_, t);
    if (std::any_of(nb.begin(), nb.end(), [&](const Tile& u) { return contains(u); })) out->push_back(t);
  }
  touching_[m] = std::move(out);
  return *touching_[m];
}

std::vector<Tile> Region::tiles(int m, std::size_t cap) const {
  require(m >= 0 && m <= level(), Errc::contract, "tiles: level above the region level");
  std::vector<Tile> cur = layers_[0];
  const std::size_t per = refinement(kind_, lambda_).sub[0].size();
  for (int l = 1; l <= m; ++l) {
    require(cur.size() * per <= cap, Errc::capacity, "explicit region exceeds the tile budget");
    std::vector<Tile> next;
    next.reserve(cur.size() * per + layers_[l].size());
    for (const auto& t : cur) {
      auto sub = subtiles(kind_, t, lambda_);
      next.insert(next.end(), sub.begin(), sub.end());
    }
    next.insert(next.end(), layers_[l].begin(), layers_[l].end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = std::move(next);
  }
  return cur;
}

std::uint64_t Region::tile_count(int m) const {
  if (kind_ == Kind::hexagonal) return tiles(m).size();
  std::uint64_t total = 0;
  for (int l = 0; l <= m; ++l) {
    std::uint64_t w = 1;
    for (int i = l; i < m; ++i) w *= static_cast<std::uint64_t>(lambda_) * lambda_;
    total += w * layers_[l].size();
  }
  return total;
}

Region initial_region(const GrowthParams& params) {
  params.validate();
  return Region(params.kind, params.lambda, {Tile{0, 0, 0, 0}});
}

std::vector<Candidate> classify_candidates(const Region& region) {
  const Kind kind = region.kind();
  const int lambda = region.lambda();
  const int n = sides(kind);
  const auto& ref = refinement(kind, lambda);
  const auto& outside = region.touching(region.level());

  std::unordered_map<Tile, bool, TileHash> kb_memo;
  auto in_kb = [&](const Tile& t) {
    if (auto it = kb_memo.find(t); it != kb_memo.end()) return it->second;
    bool in = false;
    for (const auto& s : supertiles(kind, t, lambda))
      if (region.contains(s)) {
        in = true;
        break;
      }
    kb_memo.emplace(t, in);
    return in;
  };

  // Boundary edges seen from the outside tile that carries them.
  std::vector<unsigned> bmask(outside.size(), 0);
  std::set<Point> ends;
  for (std::size_t idx = 0; idx < outside.size(); ++idx) {
    const Tile& w = outside[idx];
    auto wv = vertices(kind, w);
    for (int i = 0; i < n; ++i)
      if (region.contains(edge_neighbor(kind, w, i))) {
        bmask[idx] |= 1u << i;
        ends.insert(wv[i]);
        ends.insert(wv[(i + 1) % n]);
      }
  }

  struct Mark {
    unsigned edges = 0;
    bool end = false;
  };
  std::unordered_map<Tile, Mark, TileHash> marks;
  for (std::size_t idx = 0; idx < outside.size(); ++idx) {
    const Tile& w = outside[idx];
    const int shape = kind == Kind::triangular ? w.o : 0;
    auto wv = vertices(kind, w);
    for (int i = 0; i < n; ++i) {
      if (bmask[idx] >> i & 1u)
        for (const auto& e : ref.strip[shape][i]) {
          Tile t = ref.child(w, e.sub);
          if (!in_kb(t)) marks[t].edges |= 1u << e.edge;
        }
      if (ends.count(wv[i]))
        for (const auto& f : ref.fan[shape][i]) {
          Tile t = ref.child(w, f);
          if (!in_kb(t)) marks[t].end = true;
        }
    }
  }

  std::vector<Candidate> out;
  out.reserve(marks.size());
  for (const auto& [t, mk] : marks) {
    Candidate c;
    c.tile = t;
    c.shared_edges = std::popcount(mk.edges);
    c.holds_end = mk.end;
    if ((c.shared_edges == 1 && !c.holds_end) || c.shared_edges == 2) {
      c.group = 1;
    } else if (c.holds_end && c.shared_edges == 1) {
      c.group = 2;
    } else if (c.holds_end && c.shared_edges == 0) {
      // A tile at an edge end that shares no boundary edge but borders the refined
      // region. Only hexagons produce these (fine hexagons overhang coarse edges).
      auto nb = edge_adjacent_tiles(kind, t);
      if (std::any_of(nb.begin(), nb.end(), in_kb)) c.group = 2;
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.tile < y.tile; });
  return out;
}

void grow(Region& region, const GrowthParams& params) {
  params.validate();
  require(region.kind() == params.kind && region.lambda() == params.lambda, Errc::contract,
          "grow: parameters do not match the region");
  const std::uint64_t next = static_cast<std::uint64_t>(region.level()) + 1;
  KeyedRng rng(params.seed);
  std::vector<Tile> added;
  for (const auto& c : classify_candidates(region)) {
    double prob = c.group == 1 ? params.p : (c.group == 2 ? static_cast<double>(params.p_star) : 0.0);
    if (rng.bernoulli(prob, {next, static_cast<std::uint64_t>(c.tile.a), static_cast<std::uint64_t>(c.tile.b),
                             c.tile.o}))
      added.push_back(c.tile);
  }
  region.push_layer(std::move(added));
}

BoundaryRelation boundary_relation(const Tile& t, const Region& region) {
  require(t.level <= region.level(), Errc::contract, "boundary_relation: tile level above the region level");
  return boundary_relation(region.kind(), t, [&](const Tile& u) { return region.contains(u); });
}

Frontier frontier(const Region& region, int m, int p_star) {
  const Kind kind = region.kind();
  const int n = sides(kind);
  Frontier f;
  f.level = m;
  for (const auto& t : region.touching(m)) {
    unsigned em = 0, vm = 0;
    for (int i = 0; i < n; ++i)
      if (region.contains(edge_neighbor(kind, t, i))) em |= 1u << i;
    if (p_star == 0 && em == 0) continue;
    for (int i = 0; i < n; ++i)
      for (const auto& u : tiles_at_vertex(kind, t, i))
        if (region.contains(u)) {
          vm |= 1u << i;
          break;
        }
    f.entries.push_back(FrontierEntry{t, canonical_type(kind, em, vm, p_star), em, vm});
  }
  return f;
}

TypeId classify_type(const Region& region, const Tile& t, int p_star) {
  auto rel = boundary_relation(t, region);
  require(!rel.touches_interior, Errc::contract, "classify_type: tile belongs to the region");
  if ((p_star == 0 && rel.edge_mask == 0) || (rel.edge_mask | rel.vertex_mask) == 0)
    fail(Errc::contract, "classify_type: tile " + to_string(region.kind(), t) +
                             " has no qualifying contact (edges " + std::to_string(rel.edge_mask) +
                             ", vertices " + std::to_string(rel.vertex_mask) + ")");
  return canonical_type(region.kind(), rel.edge_mask, rel.vertex_mask, p_star);
}

GrowthStats region_stats(const Region& region, const Frontier& front, bool with_holes) {
  const Kind kind = region.kind();
  const int n = sides(kind);
  const int m = front.level;
  const double lam = region.lambda();
  GrowthStats s;
  s.n = m;
  for (const auto& e : front.entries) {
    ++s.frontier_counts[e.type];
    if (e.type.edges == (1u << n) - 1) ++s.ring_births;
  }
  s.frontier_total = front.entries.size();

  // Boundary edges collected from the region side as point pairs.
  std::set<EdgeRef> edges;
  for (const auto& w : region.touching(m))
    for (int i = 0; i < n; ++i) {
      Tile u = edge_neighbor(kind, w, i);
      if (!region.contains(u)) continue;
      auto uv = vertices(kind, u);
      auto wv = vertices(kind, w);
      for (int j = 0; j < n; ++j) {
        Point p = uv[j], q = uv[(j + 1) % n];
        if (std::find(wv.begin(), wv.end(), p) != wv.end() && std::find(wv.begin(), wv.end(), q) != wv.end())
          edges.insert(make_edge(p, q, m));
      }
    }
  s.boundary_edges = edges.size();
  s.perimeter_L = static_cast<double>(s.boundary_edges) * std::pow(lam, -m);
  if (region.level() > m) {
    s.added_tiles = region.layer(m + 1).size();
    s.added_area_A = static_cast<double>(*s.added_tiles) * std::pow(lam, -2.0 * (m + 1));
  }
  if (with_holes && kind == Kind::square) s.holes = count_holes(region, m);
  return s;
}

std::int64_t count_holes(const Region& region, int m) {
  if (region.kind() != Kind::square) return 0;
  const std::int64_t lam = region.lambda();
  std::int64_t x0 = INT64_MAX, y0 = INT64_MAX, x1 = INT64_MIN, y1 = INT64_MIN;
  auto scale = [&](int l) {
    std::int64_t s = 1;
    for (int i = l; i < m; ++i) s *= lam;
    return s;
  };
  for (int l = 0; l <= m; ++l) {
    const std::int64_t s = scale(l);
    for (const auto& t : region.layer(l)) {
      x0 = std::min(x0, t.a * s);
      y0 = std::min(y0, t.b * s);
      x1 = std::max(x1, (t.a + 1) * s - 1);
      y1 = std::max(y1, (t.b + 1) * s - 1);
    }
  }
  x0 -= 2;
  y0 -= 2;
  x1 += 2;
  y1 += 2;
  const std::int64_t w = x1 - x0 + 1, h = y1 - y0 + 1;
  require(w * h <= 400'000'000, Errc::capacity, "hole count: bounding box exceeds the cell budget");
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(w * h), 0);
  auto at = [&](std::int64_t x, std::int64_t y) -> std::uint8_t& {
    return grid[static_cast<std::size_t>((y - y0) * w + (x - x0))];
  };
  for (int l = 0; l <= m; ++l) {
    const std::int64_t s = scale(l);
    for (const auto& t : region.layer(l))
      for (std::int64_t y = t.b * s; y < (t.b + 1) * s; ++y)
        for (std::int64_t x = t.a * s; x < (t.a + 1) * s; ++x) at(x, y) = 1;
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> stack;
  auto fill = [&](std::int64_t sx, std::int64_t sy) {
    at(sx, sy) = 2;
    stack.push_back({sx, sy});
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      const std::int64_t nx[4] = {x + 1, x - 1, x, x};
      const std::int64_t ny[4] = {y, y, y + 1, y - 1};
      for (int d = 0; d < 4; ++d) {
        if (nx[d] < x0 || nx[d] > x1 || ny[d] < y0 || ny[d] > y1) continue;
        auto& c = at(nx[d], ny[d]);
        if (c == 0) {
          c = 2;
          stack.push_back({nx[d], ny[d]});
        }
      }
    }
  };
  fill(x0, y0);  // the margin guarantees the box border is one outer component
  std::int64_t holes = 0;
  for (std::int64_t y = y0; y <= y1; ++y)
    for (std::int64_t x = x0; x <= x1; ++x)
      if (at(x, y) == 0) {
        ++holes;
        fill(x, y);
      }
  return holes;
}

NestingReport check_nesting(const Region& region, int m, int p_star) {
  require(m + 1 <= region.level(), Errc::contract, "check_nesting needs level m + 1");
  const Kind kind = region.kind();
  const int lambda = region.lambda();
  auto coarse = frontier(region, m, p_star);
  auto fine = frontier(region, m + 1, p_star);
  std::unordered_set<Tile, TileHash> rc, rf;
  for (const auto& e : coarse.entries) rc.insert(e.tile);
  for (const auto& e : fine.entries) rf.insert(e.tile);
  NestingReport rep;
  rep.children = fine.entries.size();
  rep.parents = coarse.entries.size();
  for (const auto& e : fine.entries) {
    auto sup = supertiles(kind, e.tile, lambda);
    std::size_t in = std::count_if(sup.begin(), sup.end(), [&](const Tile& s) { return rc.count(s) > 0; });
    if (!(sup.size() == 1 && in == 1)) ++rep.strict_violations;
    if (in != sup.size()) ++rep.split_violations;
    else if (sup.size() > 1) ++rep.straddlers;
  }
  for (const auto& e : coarse.entries) {
    bool strict = false, split = false;
    for (const auto& c : subtiles(kind, e.tile, lambda)) {
      if (!rf.count(c)) continue;
      split = true;
      if (tile_contains(kind, e.tile, c, lambda)) strict = true;
    }
    if (!strict) ++rep.p2_strict_violations;
    if (!split) ++rep.p2_split_violations;
  }
  return rep;
}

Trajectory run_growth(const GrowthParams& params, int generations, bool with_holes) {
  require(generations >= 0, Errc::invalid_argument, "generations must be non-negative");
  Trajectory tr{params, initial_region(params), {}, {}};
  for (int m = 0; m <= generations; ++m) {
    grow(tr.region, params);
    tr.frontiers.push_back(frontier(tr.region, m, params.p_star));
    tr.stats.push_back(region_stats(tr.region, tr.frontiers.back(), with_holes));
  }
  return tr;
}

std::string region_snapshot_json(const Region& region, int m) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(region.kind());
  j["lambda"] = region.lambda();
  j["level"] = m;
  auto layers = nlohmann::json::array();
  for (int l = 0; l <= m; ++l) {
    auto arr = nlohmann::json::array();
    for (const auto& t : region.layer(l)) {
      if (region.kind() == Kind::triangular) arr.push_back({t.a, t.b, t.o});
      else arr.push_back({t.a, t.b});
    }
    layers.push_back(std::move(arr));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

}  // namespace fractile
