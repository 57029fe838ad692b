#include <doctest.h>

#include <cmath>

#include "dimension.hpp"
#include "error.hpp"
#include "matrices.hpp"

using namespace fractile;

TEST_SUITE("dimension") {
  TEST_CASE("theoretical dimension") {
    CHECK(theoretical_dimension(4.0, 4) == doctest::Approx(1.0));
    CHECK(theoretical_dimension(8.0, 4) == doctest::Approx(1.5));
    CHECK(theoretical_dimension(4.0, 3) == doctest::Approx(std::log(4.0) / std::log(3.0)));
    CHECK_THROWS_AS(theoretical_dimension(16.0, 4), Error);
    CHECK_THROWS_AS(theoretical_dimension(3.0, 4), Error);
  }

  TEST_CASE("slope fit recovers an exact power law") {
    std::vector<double> r;
    for (int n = 0; n <= 9; ++n) r.push_back(7.0 * std::pow(3.0, 1.37 * n));
    auto f = fit_dimension(r, 3);
    CHECK(f.slope == doctest::Approx(1.37).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.last_ratio == doctest::Approx(1.37).epsilon(1e-12));
    CHECK(f.n_min == 3);
    CHECK(f.n_max == 9);
    CHECK_THROWS_AS(fit_dimension(r, 3, 9, 9), Error);
  }

  TEST_CASE("quartiles by linear interpolation") {
    auto s = summarize({5, 1, 4, 2, 3});
    CHECK(s.median == 3);
    CHECK(s.q1 == 2);
    CHECK(s.q3 == 4);
    CHECK(s.iqr() == 2);
    s = summarize({1, 2, 3, 4});
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.q1 == doctest::Approx(1.75));
  }

  TEST_CASE("rescaled series of an exact geometric sequence are constant") {
    LevelSeries s;
    const double rho = 5.0;
    for (int n = 0; n < 8; ++n) {
      s.perimeter.push_back(2.0 * std::pow(rho / 4.0, n));
      s.added_area.push_back(0.5 * std::pow(rho / 16.0, n));
      s.holes.push_back(3.0 * std::pow(rho, n));
    }
    auto lim = limit_series(s, rho, 4);
    CHECK(lim.perimeter.stabilization < 1e-12);
    CHECK(lim.added_area.stabilization < 1e-12);
    CHECK(lim.holes.stabilization < 1e-12);
    for (double r : lim.hole_ratio) CHECK(r == doctest::Approx(rho));
  }

  TEST_CASE("series from a local-engine run") {
    GrowthParams g{Kind::square, 4, 0.0, 0, 1};
    const auto& eng = local_engine(Kind::square, 4, 0);
    auto tr = simulate_gw(initial_census(eng), 5, g);
    auto s = series_from_gw(tr, Kind::square, 4);
    // p = 0, one sector: a single edge of length one at every level.
    for (double x : s.perimeter) CHECK(x == doctest::Approx(1.0));
    for (double x : s.holes) CHECK(x == 0.0);
    CHECK(s.frontier.back() == 1024.0);
  }

  TEST_CASE("numerical dimension at a deterministic endpoint") {
    auto rep = dimension_report(GrowthParams{Kind::square, 4, 0.0, 0, 1}, 6, 3, 3, 1);
    CHECK(rep.d_theoretical == doctest::Approx(1.0));
    CHECK(rep.d_numerical.median == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.d_numerical.iqr() == doctest::Approx(0.0));
  }

  TEST_CASE("csv export") {
    LevelSeries s;
    s.perimeter = {4, 5};
    s.added_area = {0.1};
    s.holes = {0, 1};
    auto csv = series_csv(s, 5.0, 4);
    CHECK(csv.rfind("series,n,raw,rescaled\n", 0) == 0);
    CHECK(csv.find("perimeter,1,5,4\n") != std::string::npos);
  }
}
