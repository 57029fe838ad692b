#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "vonkoch.hpp"

using namespace fractile;

namespace {

// det(M - x I) by Gaussian elimination with partial pivoting.
double char_poly(const ReproMatrix& m, double x) {
  const int n = static_cast<int>(m.order());
  std::vector<double> a(m.a);
  for (int i = 0; i < n; ++i) a[i * n + i] -= x;
  double det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0) return 0;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

Pattern from_mask(int lambda, unsigned mask) {
  std::vector<std::uint8_t> b;
  for (int i = 0; i < lambda - 2; ++i) b.push_back(mask >> i & 1u);
  return make_pattern(lambda, b);
}

}  // namespace

TEST_SUITE("vonkoch") {
  TEST_CASE("random von Koch growth rate") {
    CHECK(random_koch_rho(5, 0.0).rho == 5.0);
    CHECK(random_koch_rho(5, 0.0).d == doctest::Approx(1.0));
    CHECK(random_koch_rho(3, 1.0).d == doctest::Approx(std::log(4.0) / std::log(3.0)));
    CHECK(random_koch_rho(3, 1.0).d == doctest::Approx(1.26186).epsilon(1e-5));
    CHECK(random_koch_rho(3, 0.5).rho == 3.5);
    CHECK_THROWS_AS(random_koch_rho(2, 0.5), Error);
  }

  TEST_CASE("pattern statistics") {
    auto p = parse_pattern("10011", 7);
    CHECK(p.beta == 2);
    CHECK(p.gamma == 0);
    CHECK(p.sigma == 3);
    auto q = parse_pattern("10101");
    CHECK(q.lambda == 7);
    CHECK(q.beta == 3);
    CHECK(q.gamma == 2);
    auto z = parse_pattern("0000");
    CHECK(z.beta == 0);
    CHECK(z.sigma == 0);
    CHECK(pattern_literal(p) == "10011");
  }

  TEST_CASE("pattern literal errors carry the position") {
    try {
      parse_pattern("10a11", 7);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("position 3") != std::string::npos);
    }
    try {
      parse_pattern("100", 7);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("position 4") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_pattern("", 5), Error);
    CHECK_THROWS_AS(parse_pattern("1111", 5), Error);
  }

  TEST_CASE("pattern invariants hold for every pattern up to lambda 8 (property)") {
    for (int l = 3; l <= 8; ++l)
      for (unsigned mask = 0; mask < (1u << (l - 2)); ++mask) {
        auto p = from_mask(l, mask);
        CHECK(p.beta <= (l - 1) / 2);
        CHECK(p.sigma == __builtin_popcount(mask));
        CHECK(p.gamma <= l - 2 - p.sigma);
        auto m = pattern_matrix(p);
        const double rho = spectral(m).rho;
        CHECK(rho == doctest::Approx(l + 2.0 * p.beta).epsilon(1e-9));
        // Each expected eigenvalue is a root of the characteristic polynomial (oracle
        // independent of the eigen solver), and the trace matches their sum.
        auto ex = pattern_expected_spectrum(p);
        double tr = 0;
        for (int i = 0; i < 4; ++i) tr += m(i, i);
        CHECK(tr == doctest::Approx(ex[0] + ex[1] + ex[2] + ex[3]));
        for (double mu : ex) CHECK(std::abs(char_poly(m, mu)) < 1e-6 * std::pow(rho, 4));
        auto sp = pattern_spectrum(p);
        for (int i = 0; i < 4; ++i) CHECK(sp[i] == doctest::Approx(ex[i]).epsilon(1e-9).scale(1.0));
      }
  }

  TEST_CASE("matrix rows for the empty and full patterns") {
    auto z = pattern_matrix(parse_pattern("000"));
    CHECK(z(0, 0) == 5);
    CHECK(z(0, 1) == 0);
    CHECK(spectral(z).rho == doctest::Approx(5.0));
    auto f = parse_pattern("111");
    CHECK(f.beta == 1);
    auto sp = pattern_spectrum(f);
    CHECK(std::find_if(sp.begin(), sp.end(), [](double x) { return std::abs(x - 2.0) < 1e-9; }) != sp.end());
    CHECK(spectral(pattern_matrix(f)).rho == doctest::Approx(7.0));
  }

  TEST_CASE("closed-form perimeter and area") {
    auto p = parse_pattern("10011");
    CHECK(pattern_stats(p, 0).perimeter == 4.0);
    CHECK(pattern_stats(p, 1).perimeter == doctest::Approx(4.0 * 11.0 / 7.0));
    CHECK(pattern_stats(p, 1).boundary_edges == 44u);
    CHECK(pattern_stats(p, 0).added_area == doctest::Approx(12.0 / 49.0));
    auto z = parse_pattern("000");
    for (int n = 0; n < 5; ++n) CHECK(pattern_stats(z, n).added_area == 0.0);
  }

  TEST_CASE("geometric pattern growth matches the closed forms exactly") {
    for (int l = 3; l <= 6; ++l)
      for (unsigned mask = 0; mask < (1u << (l - 2)); ++mask) {
        auto p = from_mask(l, mask);
        auto run = simulate_pattern(p, l <= 4 ? 3 : 2);
        for (int n = 0; n <= run.region.level(); ++n) {
          auto st = pattern_stats(p, n);
          CHECK(run.boundary_edges[n] == st.boundary_edges);
          if (n < run.region.level()) CHECK(run.added_tiles[n] == st.added_tiles);
        }
      }
    auto fig = simulate_pattern(parse_pattern("10011"), 1);
    CHECK(fig.boundary_edges[1] == 44u);
    auto none = simulate_pattern(parse_pattern("000"), 3);
    for (int m = 1; m <= 3; ++m) CHECK(none.region.layer(m).empty());
    CHECK_THROWS_AS(simulate_pattern(parse_pattern("10101"), 6, 1000), Error);
  }

  TEST_CASE("strip positions run along the edge") {
    // Square edge 0 of the unit tile runs along y = 0 from x = 0 to x = 1.
    const int l = 4;
    for (int i = 0; i < l; ++i) CHECK(strip_position(Kind::square, Tile{}, 0, Tile{1, i, 0, 0}, l) == i + 1);
    // Edge 2 runs the other way along the top.
    for (int i = 0; i < l; ++i) CHECK(strip_position(Kind::square, Tile{}, 2, Tile{1, i, l - 1, 0}, l) == l - i);
    CHECK(strip_position(Kind::square, Tile{}, 0, Tile{1, 1, 1, 0}, l) == 0);
  }

  TEST_CASE("random von Koch one-step mean") {
    for (int l : {3, 4, 5})
      for (double p : {0.0, 0.5, 1.0}) {
        auto m = random_koch_mean(l, p, 3000, 7);
        CHECK(std::abs(m.mean - (l + p)) <= 3.5 * m.stderr_ + 1e-12);
      }
    // Deterministic endpoint: the triangle grows into the star of David outline.
    Region r(Kind::triangular, 3, {Tile{}});
    grow_random_koch(r, 1.0, 1);
    CHECK(r.layer(1).size() == 3);
    CHECK(edge_frontier_sizes(r)[1] == 12u);
    CHECK(boundary_edge_count(r, 1) == 12u);
  }
}
