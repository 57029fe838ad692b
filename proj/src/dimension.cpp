#include "dimension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "matrices.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace fractile {

double theoretical_dimension(double rho, int lambda) {
  require(lambda >= 2, Errc::invalid_argument, "lambda must be at least 2");
  const double l = lambda;
  const double slack = 1e-9 * l;
  require(rho >= l - slack && rho < l * l, Errc::contract,
          "rho = " + std::to_string(rho) + " lies outside [lambda, lambda^2)");
  return std::log(std::max(rho, l)) / std::log(l);
}

DimensionFit fit_dimension(const std::vector<double>& counts, int lambda, int n_min, int n_max) {
  require(lambda >= 2, Errc::invalid_argument, "lambda must be at least 2");
  if (n_max < 0) n_max = static_cast<int>(counts.size()) - 1;
  require(n_min >= 0 && n_max < static_cast<int>(counts.size()) && n_max - n_min + 1 >= 2, Errc::invalid_argument,
          "fit window needs at least two levels inside the series");
  const double ll = std::log(static_cast<double>(lambda));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = n_max - n_min + 1;
  for (int n = n_min; n <= n_max; ++n) {
    require(counts[n] > 0, Errc::invalid_argument, "frontier counts must be positive");
    const double x = n * ll, y = std::log(counts[n]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  DimensionFit f;
  f.n_min = n_min;
  f.n_max = n_max;
  f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / m;
  double rss = 0;
  for (int n = n_min; n <= n_max; ++n) {
    const double r = std::log(counts[n]) - (f.intercept + f.slope * n * ll);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / m);
  f.last_ratio = std::log(counts[n_max] / counts[n_max - 1]) / ll;
  return f;
}

LevelSeries series_from_stats(const std::vector<GrowthStats>& stats, int lambda) {
  LevelSeries s;
  for (const auto& st : stats) {
    s.frontier.push_back(static_cast<double>(st.frontier_total));
    s.perimeter.push_back(st.perimeter_L);
    if (st.added_tiles) s.added_area.push_back(st.added_area_A);
    if (st.holes) s.holes.push_back(static_cast<double>(*st.holes));
  }
  (void)lambda;
  return s;
}

LevelSeries series_from_gw(const GwTrajectory& traj, Kind kind, int lambda) {
  LevelSeries s;
  const unsigned full = (1u << sides(kind)) - 1;
  double holes = 0;
  for (std::size_t n = 0; n < traj.z.size(); ++n) {
    double total = 0, edges = 0;
    for (std::size_t t = 0; t < traj.types.size(); ++t) {
      const double c = static_cast<double>(traj.z[n][t]);
      total += c;
      edges += c * edge_count(traj.types[t]);
      if (traj.types[t].edges == full) holes += c;
    }
    s.frontier.push_back(total);
    s.perimeter.push_back(edges * std::pow(lambda, -static_cast<double>(n)));
    if (kind == Kind::square) s.holes.push_back(holes);
  }
  for (std::size_t n = 0; n < traj.added.size(); ++n)
    s.added_area.push_back(static_cast<double>(traj.added[n]) * std::pow(lambda, -2.0 * (n + 1)));
  return s;
}

double tail_change(const std::vector<double>& v, int tail) {
  double worst = 0;
  const int n = static_cast<int>(v.size());
  for (int k = std::max(1, n - tail); k < n; ++k) {
    if (v[k - 1] == 0.0) {
      if (v[k] != 0.0) worst = std::max(worst, 1.0);
      continue;
    }
    worst = std::max(worst, std::abs(v[k] - v[k - 1]) / std::abs(v[k - 1]));
  }
  return worst;
}

Limits limit_series(const LevelSeries& s, double rho, int lambda, int tail) {
  require(rho > 0, Errc::invalid_argument, "rho must be positive");
  const double l = lambda;
  auto make = [&](std::string name, std::string rescale, const std::vector<double>& raw, double base) {
    LimitSeries out;
    out.name = std::move(name);
    out.rescale = std::move(rescale);
    out.raw = raw;
    for (std::size_t n = 0; n < raw.size(); ++n) out.rescaled.push_back(raw[n] * std::pow(base, static_cast<double>(n)));
    out.stabilization = tail_change(out.rescaled, tail);
    return out;
  };
  Limits lim;
  lim.perimeter = make("perimeter", "(lambda/rho)^n", s.perimeter, l / rho);
  lim.added_area = make("added_area", "(lambda^2/rho)^n", s.added_area, l * l / rho);
  lim.holes = make("holes", "rho^-n", s.holes, 1.0 / rho);
  for (std::size_t n = 0; n + 1 < s.holes.size(); ++n)
    lim.hole_ratio.push_back(s.holes[n] > 0 ? s.holes[n + 1] / s.holes[n] : 0.0);
  return lim;
}

Summary summarize(std::vector<double> v) {
  Summary s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto q = [&](double f) {
    const double pos = f * (v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - i;
    return i + 1 < v.size() ? v[i] * (1 - frac) + v[i + 1] * frac : v[i];
  };
  s.median = q(0.5);
  s.q1 = q(0.25);
  s.q3 = q(0.75);
  return s;
}

DimensionReport dimension_report(const GrowthParams& params, int generations, int replicates, int n_min,
                                 int threads) {
  params.validate();
  require(replicates >= 1, Errc::invalid_argument, "replicates must be at least 1");
  DimensionReport rep;
  rep.d_theoretical =
      theoretical_dimension(spectral(analytic_matrix(params.kind, params.lambda, params.p, params.p_star)).rho,
                            params.lambda);
  const auto& eng = local_engine(params.kind, params.lambda, params.p_star);
  const auto z0 = initial_census(eng);
  std::vector<double> slopes(replicates), residuals(replicates);
  parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
    GrowthParams g = params;
    g.seed = mix64(params.seed ^ mix64(r + 1));
    auto tr = simulate_gw(z0, generations, g);
    auto s = series_from_gw(tr, params.kind, params.lambda);
    auto fit = fit_dimension(s.frontier, params.lambda, n_min, generations);
    slopes[r] = fit.slope;
    residuals[r] = fit.residual;
  });
  rep.d_numerical = summarize(slopes);
  rep.fit_residual = summarize(residuals).median;
  rep.n_min = n_min;
  rep.n_max = generations;
  rep.replicates = static_cast<std::size_t>(replicates);
  return rep;
}

std::string series_csv(const LevelSeries& s, double rho, int lambda) {
  auto lim = limit_series(s, rho, lambda);
  std::ostringstream os;
  os.precision(12);
  os << "series,n,raw,rescaled\n";
  for (const auto* ls : {&lim.perimeter, &lim.added_area, &lim.holes})
    for (std::size_t n = 0; n < ls->raw.size(); ++n)
      os << ls->name << ',' << n << ',' << ls->raw[n] << ',' << ls->rescaled[n] << '\n';
  return os.str();
}

}  // namespace fractile
