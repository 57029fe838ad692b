#include "branching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include "error.hpp"
#include "parallel.hpp"

namespace fractile {

namespace {

constexpr std::uint64_t kCoinKey = 0x10000;

// Vertex-only neighbour of the origin tile at vertex k: a tile at the vertex that is
// not edge-adjacent to it (the diagonal square; the middle one for triangles).
Tile vertex_contact(Kind kind, const Tile& P, int k) {
  const int n = sides(kind);
  auto edge_nb = edge_adjacent_tiles(kind, P);
  std::vector<Tile> near{edge_neighbor(kind, P, k), edge_neighbor(kind, P, (k + n - 1) % n)};
  std::vector<Tile> far;
  for (const auto& u : tiles_at_vertex(kind, P, k))
    if (std::find(edge_nb.begin(), edge_nb.end(), u) == edge_nb.end()) far.push_back(u);
  if (far.size() == 1) return far[0];
  for (const auto& u : far) {
    bool touches_near = false;
    for (const auto& w : near) {
      auto wn = edge_adjacent_tiles(kind, w);
      if (std::find(wn.begin(), wn.end(), u) != wn.end()) touches_near = true;
    }
    if (!touches_near) return u;
  }
  fail(Errc::unsupported, "no vertex-only contact available for this tessellation");
}

}  // namespace

struct LocalEngine::Template {
  struct Dep {
    std::uint8_t bit;
    std::uint16_t cand;
  };
  struct Slot {
    double share = 1.0;
    int overlap = 1;
    int cand = -1;
    unsigned base_edges = 0;
    unsigned base_verts = 0;
    std::vector<Dep> edge_deps;
    std::vector<Dep> vert_deps;
  };
  TypeId type;
  std::vector<std::uint8_t> group;  // per candidate: 1 draws with p, 2 with p_star
  std::vector<Slot> slots;
};

LocalEngine::LocalEngine(Kind kind, int lambda, int p_star) : kind_(kind), lambda_(lambda), p_star_(p_star) {
  GrowthParams check{kind, lambda, 0.5, p_star, 0};
  check.validate();
  const int n = sides(kind);

  std::map<TypeId, std::unique_ptr<Template>> built;
  std::deque<TypeId> queue;
  std::vector<TypeId> order = survivor_types(kind, p_star);
  survivors_ = order.size();
  for (auto t : order) queue.push_back(t);
  std::map<TypeId, bool> seen;
  for (auto t : order) seen[t] = true;

  while (!queue.empty()) {
    TypeId t = queue.front();
    queue.pop_front();
    auto tpl = std::make_unique<Template>();
    tpl->type = t;
    const Tile P{0, 0, 0, 0};

    std::vector<Tile> base;
    unsigned ends = 0;
    for (int i = 0; i < n; ++i)
      if (t.edges >> i & 1u) {
        base.push_back(edge_neighbor(kind, P, i));
        ends |= (1u << i) | (1u << ((i + 1) % n));
      }
    for (int k = 0; k < n; ++k)
      if ((t.verts >> k & 1u) && !(ends >> k & 1u)) base.push_back(vertex_contact(kind, P, k));
    Region reg(kind, lambda, base);
    TypeId got = classify_type(reg, P, p_star);
    require(got == t, Errc::internal, "local configuration does not realise type " + type_name(kind, t));

    std::unordered_map<Tile, int, TileHash> cand_index;
    for (const auto& c : classify_candidates(reg)) {
      if (c.group == 0) continue;
      cand_index.emplace(c.tile, static_cast<int>(tpl->group.size()));
      tpl->group.push_back(static_cast<std::uint8_t>(c.group));
    }
    std::unordered_map<Tile, bool, TileHash> kb_memo;
    auto in_kb = [&](const Tile& u) {
      if (auto it = kb_memo.find(u); it != kb_memo.end()) return it->second;
      bool in = false;
      for (const auto& s : supertiles(kind, u, lambda))
        if (reg.contains(s)) in = true;
      kb_memo.emplace(u, in);
      return in;
    };

    for (const auto& s : subtiles(kind, P, lambda)) {
      if (in_kb(s)) continue;
      Template::Slot slot;
      slot.overlap = static_cast<int>(supertiles(kind, s, lambda).size());
      slot.share = 1.0 / slot.overlap;
      if (auto it = cand_index.find(s); it != cand_index.end()) slot.cand = it->second;
      for (int i = 0; i < n; ++i) {
        Tile u = edge_neighbor(kind, s, i);
        if (in_kb(u)) slot.base_edges |= 1u << i;
        else if (auto it = cand_index.find(u); it != cand_index.end())
          slot.edge_deps.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint16_t>(it->second)});
      }
      if (p_star == 1)
        for (int k = 0; k < n; ++k)
          for (const auto& u : tiles_at_vertex(kind, s, k)) {
            if (in_kb(u)) slot.base_verts |= 1u << k;
            else if (auto it = cand_index.find(u); it != cand_index.end())
              slot.vert_deps.push_back({static_cast<std::uint8_t>(k), static_cast<std::uint16_t>(it->second)});
          }
      bool reachable = !slot.edge_deps.empty() || slot.base_edges;
      if (p_star == 1) reachable = reachable || !slot.vert_deps.empty() || slot.base_verts;
      if (!reachable) continue;
      tpl->slots.push_back(std::move(slot));
    }

    // Child types this template can produce.
    for (const auto& slot : tpl->slots) {
      std::vector<int> vars;
      if (slot.cand >= 0) vars.push_back(slot.cand);
      for (const auto& d : slot.edge_deps) vars.push_back(d.cand);
      for (const auto& d : slot.vert_deps) vars.push_back(d.cand);
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      require(vars.size() <= 20, Errc::internal, "local template: too many dependencies for one child");
      for (std::uint32_t combo = 0; combo < (1u << vars.size()); ++combo) {
        auto on = [&](int c) {
          auto pos = std::lower_bound(vars.begin(), vars.end(), c) - vars.begin();
          return (combo >> pos & 1u) != 0;
        };
        bool consistent = true;
        for (std::size_t j = 0; j < vars.size(); ++j)
          if (tpl->group[vars[j]] == 2 && on(vars[j]) != (p_star == 1)) consistent = false;
        if (!consistent || (slot.cand >= 0 && on(slot.cand))) continue;
        unsigned e = slot.base_edges, v = slot.base_verts;
        for (const auto& d : slot.edge_deps)
          if (on(d.cand)) e |= 1u << d.bit;
        for (const auto& d : slot.vert_deps)
          if (on(d.cand)) v |= 1u << d.bit;
        if (p_star == 1)
          for (int i = 0; i < n; ++i)
            if (e >> i & 1u) v |= (1u << i) | (1u << ((i + 1) % n));
        if (p_star == 0 ? e == 0 : (e | v) == 0) continue;
        TypeId child = canonical_type(kind, e, v, p_star);
        if (!seen[child]) {
          seen[child] = true;
          queue.push_back(child);
        }
      }
      max_overlap_ = std::max(max_overlap_, slot.overlap);
    }
    built.emplace(t, std::move(tpl));
  }

  std::vector<TypeId> rest;
  for (const auto& [t, _] : built)
    if (std::find(order.begin(), order.end(), t) == order.end()) rest.push_back(t);
  order.insert(order.end(), rest.begin(), rest.end());
  types_ = order;
  for (auto t : types_) templates_.push_back(built.at(t).release());

  lut_.assign(std::size_t{1} << (2 * n), -1);
  for (unsigned e = 0; e < (1u << n); ++e)
    for (unsigned v = 0; v < (1u << n); ++v) {
      if (p_star == 0 && v != 0) continue;
      try {
        int idx = index_of(canonical_type(kind, e, v, p_star));
        lut_[e << n | v] = static_cast<std::int16_t>(idx);
      } catch (const Error&) {
      }
    }
}

LocalEngine::~LocalEngine() {
  for (auto* t : templates_) delete t;
}

std::vector<std::string> LocalEngine::labels() const {
  std::vector<std::string> out;
  for (auto t : types_) out.push_back(type_name(kind_, t));
  return out;
}

int LocalEngine::index_of(TypeId t) const {
  auto it = std::find(types_.begin(), types_.end(), t);
  return it == types_.end() ? -1 : static_cast<int>(it - types_.begin());
}

void LocalEngine::sample(int parent, double p, const KeyedRng& rng, std::uint64_t k1, std::uint64_t k2,
                         OffspringSample& out) const {
  require(parent >= 0 && parent < static_cast<int>(types_.size()), Errc::invalid_argument,
          "local sample: parent type index out of range");
  const Template& tpl = *templates_[parent];
  const int n = sides(kind_);
  const std::size_t T = types_.size();
  out.parent = parent;
  out.child_counts.assign(T, 0);
  out.child_shares.assign(T, 0.0);
  out.added_tiles = 0;
  out.added_share = 0.0;

  thread_local std::vector<std::uint8_t> on;
  on.resize(tpl.group.size());
  for (std::size_t c = 0; c < tpl.group.size(); ++c) {
    double prob = tpl.group[c] == 1 ? p : static_cast<double>(p_star_);
    on[c] = rng.bernoulli(prob, {k1, k2, c}) ? 1 : 0;
  }
  for (std::size_t s = 0; s < tpl.slots.size(); ++s) {
    const auto& slot = tpl.slots[s];
    const bool split = slot.overlap > 1;
    const bool mine = !split || rng.uniform({k1, k2, kCoinKey + s}) * slot.overlap < 1.0;
    if (slot.cand >= 0 && on[slot.cand]) {
      out.added_share += slot.share;
      if (mine) ++out.added_tiles;
      continue;
    }
    unsigned e = slot.base_edges, v = slot.base_verts;
    for (const auto& d : slot.edge_deps)
      if (on[d.cand]) e |= 1u << d.bit;
    if (p_star_ == 1) {
      for (const auto& d : slot.vert_deps)
        if (on[d.cand]) v |= 1u << d.bit;
      for (int i = 0; i < n; ++i)
        if (e >> i & 1u) v |= (1u << i) | (1u << ((i + 1) % n));
    }
    if (p_star_ == 0 ? e == 0 : (e | v) == 0) continue;
    int idx = lut_[e << n | v];
    require(idx >= 0, Errc::internal, "local sample produced a type outside the catalog");
    out.child_shares[idx] += slot.share;
    if (mine) ++out.child_counts[idx];
  }
}

LocalEngine::Mean LocalEngine::exact_mean(int parent, double p) const {
  require(parent >= 0 && parent < static_cast<int>(types_.size()), Errc::invalid_argument,
          "exact mean: parent type index out of range");
  const Template& tpl = *templates_[parent];
  const int n = sides(kind_);
  Mean m;
  m.children.assign(types_.size(), 0.0);
  auto prob = [&](int c) { return tpl.group[c] == 1 ? p : static_cast<double>(p_star_); };
  for (const auto& slot : tpl.slots) {
    std::vector<int> vars;
    if (slot.cand >= 0) vars.push_back(slot.cand);
    for (const auto& d : slot.edge_deps) vars.push_back(d.cand);
    for (const auto& d : slot.vert_deps) vars.push_back(d.cand);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (std::uint32_t combo = 0; combo < (1u << vars.size()); ++combo) {
      double w = 1.0;
      for (std::size_t j = 0; j < vars.size(); ++j) w *= (combo >> j & 1u) ? prob(vars[j]) : 1.0 - prob(vars[j]);
      if (w == 0.0) continue;
      auto on = [&](int c) {
        auto pos = std::lower_bound(vars.begin(), vars.end(), c) - vars.begin();
        return (combo >> pos & 1u) != 0;
      };
      if (slot.cand >= 0 && on(slot.cand)) {
        m.added += w * slot.share;
        continue;
      }
      unsigned e = slot.base_edges, v = slot.base_verts;
      for (const auto& d : slot.edge_deps)
        if (on(d.cand)) e |= 1u << d.bit;
      if (p_star_ == 1) {
        for (const auto& d : slot.vert_deps)
          if (on(d.cand)) v |= 1u << d.bit;
        for (int i = 0; i < n; ++i)
          if (e >> i & 1u) v |= (1u << i) | (1u << ((i + 1) % n));
      }
      if (p_star_ == 0 ? e == 0 : (e | v) == 0) continue;
      m.children[lut_[e << n | v]] += w * slot.share;
    }
  }
  return m;
}

const LocalEngine& local_engine(Kind kind, int lambda, int p_star) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<LocalEngine>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(static_cast<int>(kind), lambda, p_star);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<LocalEngine>(kind, lambda, p_star)).first;
  return *it->second;
}

OffspringSample local_offspring_sample(TypeId parent, const GrowthParams& params, std::uint64_t draw) {
  params.validate();
  const auto& eng = local_engine(params.kind, params.lambda, params.p_star);
  int idx = eng.index_of(parent);
  require(idx >= 0, Errc::unsupported, "type " + type_name(params.kind, parent) + " is not a frontier type here");
  OffspringSample out;
  eng.sample(idx, params.p, KeyedRng(params.seed), draw, static_cast<std::uint64_t>(idx), out);
  return out;
}

std::vector<std::uint64_t> initial_census(const LocalEngine& engine) {
  std::vector<std::uint64_t> z(engine.types().size(), 0);
  z[engine.index_of(type_t1(engine.kind(), engine.p_star()))] = 1;
  if (engine.kind() == Kind::square && engine.p_star() == 1) z[engine.index_of(type_t0(engine.kind()))] = 1;
  return z;
}

EmpiricalMatrix estimate_matrix(const GrowthParams& params, std::uint64_t samples_per_type, int threads) {
  params.validate();
  require(samples_per_type >= 1, Errc::invalid_argument, "samples per type must be at least 1");
  const auto& eng = local_engine(params.kind, params.lambda, params.p_star);
  const std::size_t T = eng.types().size();
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples_per_type + kChunk - 1) / kChunk;
  const KeyedRng rng = KeyedRng(params.seed).derive(0x6d61747269780000ULL);

  const std::size_t S = eng.survivor_count();
  std::vector<double> coeff(T * S);
  for (std::size_t u = 0; u < T; ++u) {
    auto c = reduction_coefficients(params.kind, params.p_star, eng.types()[u]);
    for (std::size_t j = 0; j < S; ++j) coeff[u * S + j] = c[j];
  }
  struct Acc {
    std::vector<double> s1, s2, p1, p2;
    double a1 = 0, a2 = 0;
  };
  std::vector<Acc> parts(T * chunks);
  parallel_for(T * chunks, threads, [&](std::size_t job) {
    const std::size_t t = job / chunks;
    const std::uint64_t c = job % chunks;
    Acc& acc = parts[job];
    acc.s1.assign(T, 0.0);
    acc.s2.assign(T, 0.0);
    acc.p1.assign(S, 0.0);
    acc.p2.assign(S, 0.0);
    std::vector<double> proj(S);
    OffspringSample out;
    const std::uint64_t lo = c * kChunk, hi = std::min(samples_per_type, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      eng.sample(static_cast<int>(t), params.p, rng, t, i, out);
      for (std::size_t u = 0; u < T; ++u) {
        double x = out.child_shares[u];
        acc.s1[u] += x;
        acc.s2[u] += x * x;
      }
      std::fill(proj.begin(), proj.end(), 0.0);
      for (std::size_t u = 0; u < T; ++u)
        if (out.child_shares[u] != 0.0)
          for (std::size_t j = 0; j < S; ++j) proj[j] += out.child_shares[u] * coeff[u * S + j];
      for (std::size_t j = 0; j < S; ++j) {
        acc.p1[j] += proj[j];
        acc.p2[j] += proj[j] * proj[j];
      }
      acc.a1 += out.added_share;
      acc.a2 += out.added_share * out.added_share;
    }
  });

  EmpiricalMatrix em;
  em.types = eng.types();
  em.labels = eng.labels();
  em.samples = samples_per_type;
  em.mean.assign(T * T, 0.0);
  em.stderr_.assign(T * T, 0.0);
  em.added_mean.assign(T, 0.0);
  em.added_stderr.assign(T, 0.0);
  em.survivors = S;
  em.projected_mean.assign(T * S, 0.0);
  em.projected_stderr.assign(T * S, 0.0);
  const double N = static_cast<double>(samples_per_type);
  auto se = [&](double s1, double s2) {
    if (samples_per_type < 2) return 0.0;
    double mu = s1 / N;
    double var = std::max(0.0, (s2 - N * mu * mu) / (N - 1));
    return std::sqrt(var / N);
  };
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> s1(T, 0.0), s2(T, 0.0), p1(S, 0.0), p2(S, 0.0);
    double a1 = 0, a2 = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      const Acc& acc = parts[t * chunks + c];
      for (std::size_t j = 0; j < S; ++j) {
        p1[j] += acc.p1[j];
        p2[j] += acc.p2[j];
      }
      for (std::size_t u = 0; u < T; ++u) {
        s1[u] += acc.s1[u];
        s2[u] += acc.s2[u];
      }
      a1 += acc.a1;
      a2 += acc.a2;
    }
    for (std::size_t u = 0; u < T; ++u) {
      em.mean[t * T + u] = s1[u] / N;
      em.stderr_[t * T + u] = se(s1[u], s2[u]);
    }
    for (std::size_t j = 0; j < S; ++j) {
      em.projected_mean[t * S + j] = p1[j] / N;
      em.projected_stderr[t * S + j] = se(p1[j], p2[j]);
    }
    em.added_mean[t] = a1 / N;
    em.added_stderr[t] = se(a1, a2);
  }
  return em;
}

GwTrajectory simulate_gw(const std::vector<std::uint64_t>& z0, int generations, const GrowthParams& params,
                         std::uint64_t cap, int threads) {
  params.validate();
  require(generations >= 0, Errc::invalid_argument, "generations must be non-negative");
  const auto& eng = local_engine(params.kind, params.lambda, params.p_star);
  const std::size_t T = eng.types().size();
  require(z0.size() == T, Errc::invalid_argument, "initial census has the wrong number of types");
  const KeyedRng rng = KeyedRng(params.seed).derive(0x67616c746f6e0000ULL);
  constexpr std::uint64_t kBlock = 2048;

  GwTrajectory tr;
  tr.types = eng.types();
  tr.z.push_back(z0);
  for (int g = 0; g < generations; ++g) {
    const auto& z = tr.z.back();
    std::uint64_t total = 0;
    for (auto c : z) total += c;
    require(total <= cap, Errc::capacity,
            "population cap exceeded at generation " + std::to_string(g) + " (" + std::to_string(total) + ")");
    // Fixed blocks of (type, ordinal) keep the result independent of the thread count.
    std::vector<std::pair<std::size_t, std::uint64_t>> blocks;
    for (std::size_t t = 0; t < T; ++t)
      for (std::uint64_t lo = 0; lo < z[t]; lo += kBlock) blocks.push_back({t, lo});
    std::vector<std::vector<std::uint64_t>> part(blocks.size());
    std::vector<std::uint64_t> part_added(blocks.size(), 0);
    const KeyedRng grng = rng.derive(static_cast<std::uint64_t>(g));
    parallel_for(blocks.size(), threads, [&](std::size_t b) {
      auto [t, lo] = blocks[b];
      const std::uint64_t hi = std::min(z[t], lo + kBlock);
      std::vector<std::uint64_t> acc(T, 0);
      std::uint64_t added = 0;
      OffspringSample out;
      for (std::uint64_t j = lo; j < hi; ++j) {
        eng.sample(static_cast<int>(t), params.p, grng, t, j, out);
        for (std::size_t u = 0; u < T; ++u) acc[u] += out.child_counts[u];
        added += out.added_tiles;
      }
      part[b] = std::move(acc);
      part_added[b] = added;
    });
    std::vector<std::uint64_t> next(T, 0);
    std::uint64_t added = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t u = 0; u < T; ++u) next[u] += part[b][u];
      added += part_added[b];
    }
    tr.added.push_back(added);
    tr.z.push_back(std::move(next));
  }
  return tr;
}

std::vector<double> martingale_path(const GwTrajectory& traj, double rho, const std::vector<double>& v) {
  require(rho > 0, Errc::invalid_argument, "rho must be positive");
  require(v.size() == traj.types.size(), Errc::invalid_argument, "eigenvector and census sizes differ");
  std::vector<double> out;
  for (std::size_t n = 0; n < traj.z.size(); ++n) {
    double s = 0;
    for (std::size_t t = 0; t < v.size(); ++t) s += static_cast<double>(traj.z[n][t]) * v[t];
    out.push_back(s * std::pow(rho, -static_cast<double>(n)));
  }
  return out;
}

std::vector<double> extend_to_types(const LocalEngine& engine, const std::vector<double>& survivor_values) {
  require(survivor_values.size() == engine.survivor_count(), Errc::invalid_argument,
          "survivor vector has the wrong size");
  std::vector<double> out;
  for (auto t : engine.types()) {
    auto c = reduction_coefficients(engine.kind(), engine.p_star(), t);
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * survivor_values[i];
    out.push_back(s);
  }
  return out;
}

}  // namespace fractile
