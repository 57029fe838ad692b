#include "types.hpp"

#include <algorithm>
#include <bit>

#include "error.hpp"

namespace fractile {

namespace {

unsigned bit(unsigned mask, int i, int n) { return mask >> (((i % n) + n) % n) & 1u; }

unsigned endpoints(unsigned edges, int n) {
  unsigned v = 0;
  for (int i = 0; i < n; ++i)
    if (edges >> i & 1u) v |= (1u << i) | (1u << ((i + 1) % n));
  return v;
}

// Lengths of the maximal runs of set edges, in cyclic order. Empty when all set.
std::vector<int> runs(unsigned edges, int n) {
  std::vector<int> out;
  int start = -1;
  for (int i = 0; i < n; ++i)
    if (!bit(edges, i, n)) {
      start = i;
      break;
    }
  if (start < 0) return out;
  int m = 0;
  for (int s = 1; s <= n; ++s) {
    if (bit(edges, start + s, n)) {
      ++m;
    } else if (m) {
      out.push_back(m);
      m = 0;
    }
  }
  return out;
}

}  // namespace

TypeId canonical_type(Kind k, unsigned edges, unsigned verts, int p_star) {
  const int n = sides(k);
  const unsigned full = (1u << n) - 1;
  edges &= full;
  verts &= full;
  if (p_star == 0) {
    verts = 0;
    require(edges != 0, Errc::contract, "type pattern has no boundary edge");
  } else {
    require((edges | verts) != 0, Errc::contract, "type pattern has no contact");
    require((endpoints(edges, n) & ~verts) == 0, Errc::contract,
            "type pattern lists a boundary edge without its endpoints");
  }
  unsigned best = ~0u;
  TypeId out;
  for (int r = 0; r < n; ++r)
    for (int f = 0; f < 2; ++f) {
      unsigned e = 0, v = 0;
      for (int i = 0; i < n; ++i) {
        // Reflection sends vertex i to -i and edge i (vertices i, i+1) to -i-1.
        e |= (f ? bit(edges, -i - 1 + r, n) : bit(edges, i + r, n)) << i;
        v |= (f ? bit(verts, -i + r, n) : bit(verts, i + r, n)) << i;
      }
      unsigned key = e << 8 | v;
      if (key < best) {
        best = key;
        out = TypeId{static_cast<std::uint8_t>(e), static_cast<std::uint8_t>(v)};
      }
    }
  return out;
}

bool is_canonical(Kind k, TypeId t) {
  try {
    int p_star = t.verts ? 1 : 0;
    return canonical_type(k, t.edges, t.verts, p_star) == t;
  } catch (const Error&) {
    return false;
  }
}

int edge_count(TypeId t) { return std::popcount(static_cast<unsigned>(t.edges)); }

int extra_vertices(Kind k, TypeId t) {
  const int n = sides(k);
  return std::popcount(static_cast<unsigned>(t.verts) & ~endpoints(t.edges, n));
}

std::string type_name(Kind k, TypeId t) {
  const int n = sides(k);
  const unsigned full = (1u << n) - 1;
  const int extras = extra_vertices(k, t);
  // Hexagons use T6 for two separated single edges, so their closed ring gets its own name.
  if (t.edges == full) return k == Kind::hexagonal ? "T6full" : "T" + std::to_string(n);
  auto rs = runs(t.edges, n);
  std::string base;
  if (rs.size() == 2 && rs[0] == 1 && rs[1] == 1) {
    // Two separated single edges.
    int first = -1, second = -1;
    for (int i = 0; i < n; ++i)
      if (t.edges >> i & 1u) (first < 0 ? first : second) = i;
    int gap = std::min(second - first, n - (second - first));
    if (k == Kind::square) base = "T1'";
    else if (k == Kind::hexagonal) base = gap == 3 ? "T6'" : "T6";
  }
  if (base.empty()) {
    std::sort(rs.rbegin(), rs.rend());
    for (int m : rs) base += (base.empty() ? "" : "+") + ("T" + std::to_string(m));
  }
  if (extras == 0) return base;
  std::string zeros;
  if (base.empty() && extras == 2 && k == Kind::square) {
    zeros = (t.verts == 0b0101 || t.verts == 0b1010) ? "2T0o" : "2T0a";
  } else {
    zeros = extras == 1 ? "T0" : std::to_string(extras) + "T0";
  }
  return base.empty() ? zeros : base + "+" + zeros;
}

TypeId type_t1(Kind k, int p_star) { return canonical_type(k, 0b1, p_star ? 0b11 : 0, p_star); }
TypeId type_t2(Kind k, int p_star) { return canonical_type(k, 0b11, p_star ? 0b111 : 0, p_star); }
TypeId type_t0(Kind k) { return canonical_type(k, 0, 0b1, 1); }

std::vector<TypeId> survivor_types(Kind k, int p_star) {
  std::vector<TypeId> out{type_t1(k, p_star), type_t2(k, p_star)};
  if (k == Kind::square && p_star == 1) out.push_back(type_t0(k));
  return out;
}

std::vector<double> reduction_coefficients(Kind k, int p_star, TypeId t) {
  const int n = sides(k);
  const bool with_t0 = k == Kind::square && p_star == 1;
  std::vector<double> c(with_t0 ? 3 : 2, 0.0);
  const unsigned full = (1u << n) - 1;
  if (t.edges == full) {
    c[0] -= n;
    c[1] += n;
  } else {
    for (int m : runs(t.edges, n)) {
      c[0] += 2 - m;
      c[1] += m - 1;
    }
  }
  const int extras = extra_vertices(k, t);
  if (extras) {
    require(with_t0, Errc::unsupported, "vertex-only contacts need the T0 survivor type");
    c[2] += extras;
  }
  return c;
}

}  // namespace fractile
