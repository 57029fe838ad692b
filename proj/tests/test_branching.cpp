#include <doctest.h>

#include <cmath>
#include <numeric>

#include "branching.hpp"
#include "error.hpp"
#include "matrices.hpp"

using namespace fractile;

namespace {

struct Model {
  Kind kind;
  int p_star;
};
const Model kModels[] = {{Kind::hexagonal, 0}, {Kind::hexagonal, 1}, {Kind::square, 0}, {Kind::square, 1},
                         {Kind::triangular, 0}};

ReproMatrix exact_full(const LocalEngine& eng, double p) {
  const std::size_t n = eng.types().size();
  std::vector<double> a(n * n);
  for (std::size_t t = 0; t < n; ++t) {
    auto m = eng.exact_mean(static_cast<int>(t), p);
    std::copy(m.children.begin(), m.children.end(), a.begin() + t * n);
  }
  return ReproMatrix(eng.labels(), a);
}

}  // namespace

TEST_SUITE("branching") {
  TEST_CASE("survivors come first") {
    for (auto m : kModels) {
      const auto& eng = local_engine(m.kind, 4, m.p_star);
      auto surv = survivor_types(m.kind, m.p_star);
      REQUIRE(eng.survivor_count() == surv.size());
      for (std::size_t i = 0; i < surv.size(); ++i) CHECK(eng.types()[i] == surv[i]);
      for (const auto& t : eng.types()) CHECK(eng.index_of(t) >= 0);
    }
  }

  TEST_CASE("initial census is one sector of the first frontier") {
    auto z = initial_census(local_engine(Kind::square, 4, 0));
    CHECK(z[0] == 1);
    CHECK(std::accumulate(z.begin(), z.end(), std::uint64_t{0}) == 1);
    const auto& e1 = local_engine(Kind::square, 4, 1);
    z = initial_census(e1);
    CHECK(z[e1.index_of(type_t1(Kind::square, 1))] == 1);
    CHECK(z[e1.index_of(type_t0(Kind::square))] == 1);
    CHECK(std::accumulate(z.begin(), z.end(), std::uint64_t{0}) == 2);
  }

  TEST_CASE("reduced exact means equal the closed-form matrices") {
    // Two independent derivations: geometric enumeration in the local engine and the
    // closed-form reduced matrices.
    for (auto m : kModels)
      for (int l = 3; l <= 8; ++l)
        for (double p : {0.0, 0.2, 0.5, 0.7, 1.0}) {
          const auto& eng = local_engine(m.kind, l, m.p_star);
          auto full = exact_full(eng, p);
          auto red = reduce(full, reduction_rules(m.kind, m.p_star, eng.types()));
          auto an = analytic_matrix(m.kind, l, p, m.p_star);
          REQUIRE(red.a.size() == an.a.size());
          for (std::size_t i = 0; i < an.a.size(); ++i) CHECK(red.a[i] == doctest::Approx(an.a[i]).epsilon(1e-12));
          CHECK(spectral(full).rho == doctest::Approx(spectral(an).rho).epsilon(1e-9));
        }
  }

  TEST_CASE("sampled offspring average to the exact means") {
    for (auto m : kModels) {
      const GrowthParams g{m.kind, 4, 0.35, m.p_star, 5};
      const auto& eng = local_engine(m.kind, 4, m.p_star);
      auto em = estimate_matrix(g, 20000, 1);
      for (std::size_t t = 0; t < eng.types().size(); ++t) {
        auto ex = eng.exact_mean(static_cast<int>(t), 0.35);
        for (std::size_t c = 0; c < eng.types().size(); ++c) {
          const double d = std::abs(em.at(t, c) - ex.children[c]);
          CHECK(d <= 4.5 * em.se(t, c) + 1e-12);
        }
        CHECK(std::abs(em.added_mean[t] - ex.added) <= 4.5 * em.added_stderr[t] + 1e-12);
      }
    }
  }

  TEST_CASE("estimates do not depend on the thread count") {
    const GrowthParams g{Kind::hexagonal, 4, 0.5, 1, 8};
    auto a = estimate_matrix(g, 5000, 1);
    auto b = estimate_matrix(g, 5000, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    const auto& eng = local_engine(Kind::hexagonal, 4, 1);
    auto t1 = simulate_gw(initial_census(eng), 5, g, 100'000'000, 1);
    auto t3 = simulate_gw(initial_census(eng), 5, g, 100'000'000, 3);
    CHECK(t1.z == t3.z);
    CHECK(t1.added == t3.added);
  }

  TEST_CASE("deterministic endpoints give integer offspring") {
    const GrowthParams g{Kind::square, 4, 1.0, 0, 1};
    auto em = estimate_matrix(g, 200, 1);
    for (double se : em.stderr_) CHECK(se == 0.0);
  }

  TEST_CASE("extended Perron vector is an eigenvector of the full matrix") {
    for (auto m : kModels) {
      const auto& eng = local_engine(m.kind, 5, m.p_star);
      auto an = analytic_matrix(m.kind, 5, 0.4, m.p_star);
      auto sp = spectral(an);
      auto full = exact_full(eng, 0.4);
      // Right eigenvector of the reduced matrix lifts through the coefficients.
      auto v = extend_to_types(eng, sp.v);
      const std::size_t n = full.order();
      for (std::size_t r = 0; r < n; ++r) {
        double mv = 0;
        for (std::size_t c = 0; c < n; ++c) mv += full(r, c) * v[c];
        CHECK(mv == doctest::Approx(sp.rho * v[r]).epsilon(1e-9).scale(1.0));
      }
    }
  }

  TEST_CASE("martingale starts at <z0, v>") {
    const GrowthParams g{Kind::square, 4, 0.5, 0, 3};
    const auto& eng = local_engine(Kind::square, 4, 0);
    auto sp = spectral(analytic_matrix(Kind::square, 4, 0.5, 0));
    auto v = extend_to_types(eng, sp.v);
    auto tr = simulate_gw(initial_census(eng), 6, g);
    auto path = martingale_path(tr, sp.rho, v);
    REQUIRE(path.size() == 7);
    CHECK(path[0] == doctest::Approx(v[0]));
    for (double x : path) CHECK(x > 0);
  }

  TEST_CASE("population cap") {
    const GrowthParams g{Kind::square, 8, 1.0, 1, 3};
    const auto& eng = local_engine(Kind::square, 8, 1);
    CHECK_THROWS_AS(simulate_gw(initial_census(eng), 12, g, 1000), Error);
  }
}
