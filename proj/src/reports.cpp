#include "reports.hpp"

#include <cmath>

#include "branching.hpp"
#include "dimension.hpp"
#include "error.hpp"
#include "matrices.hpp"
#include "rng.hpp"

namespace fractile {

namespace {

ojson rows_json(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
  auto out = ojson::array();
  for (std::size_t r = 0; r < rows; ++r) out.push_back(std::vector<double>(a.begin() + r * cols, a.begin() + (r + 1) * cols));
  return out;
}

ojson matrix_obj(const ReproMatrix& m) {
  ojson j;
  j["labels"] = m.labels;
  j["rows"] = rows_json(m.a, m.order(), m.order());
  return j;
}

void add_flag(ojson& flags, const std::string& code, const std::string& message) {
  flags.push_back({{"code", code}, {"message", message}});
}

ojson error_json(const std::exception& e) {
  ojson j;
  if (auto* fe = dynamic_cast<const Error*>(&e)) j["code"] = static_cast<int>(fe->code());
  j["message"] = e.what();
  return j;
}

}  // namespace

ojson params_json(const GrowthParams& p) {
  return {{"kind", kind_name(p.kind)}, {"lambda", p.lambda}, {"p", p.p}, {"p_star", p.p_star}, {"seed", p.seed}};
}

ojson stats_json(Kind kind, const GrowthStats& s) {
  ojson j;
  j["n"] = s.n;
  j["frontier_total"] = s.frontier_total;
  ojson counts = ojson::object();
  for (const auto& [t, c] : s.frontier_counts) counts[type_name(kind, t)] = c;
  j["frontier_counts"] = counts;
  j["boundary_edges"] = s.boundary_edges;
  j["perimeter"] = s.perimeter_L;
  j["added_tiles"] = s.added_tiles ? ojson(*s.added_tiles) : ojson(nullptr);
  j["added_area"] = s.added_tiles ? ojson(s.added_area_A) : ojson(nullptr);
  j["holes"] = s.holes ? ojson(*s.holes) : ojson(nullptr);
  j["ring_births"] = s.ring_births;
  return j;
}

ojson matrix_report(const GrowthParams& params, std::uint64_t samples, int threads) {
  params.validate();
  ojson rep;
  rep["config"] = params_json(params);
  rep["config"]["samples"] = samples;
  auto flags = ojson::array();

  const auto an = analytic_matrix(params.kind, params.lambda, params.p, params.p_star);
  const auto sp = spectral(an);
  rep["analytic"] = matrix_obj(an);
  rep["rho"] = sp.rho;
  rep["perron_vector"] = sp.v;
  rep["dimension"] = theoretical_dimension(sp.rho, params.lambda);
  rep["primitive"] = is_primitive(an);

  try {
    const auto cf = closed_form_rho(params.kind, params.lambda, params.p, params.p_star);
    ojson c;
    c["rho"] = cf.rho;
    if (cf.printed) c["printed_formula_rho"] = *cf.printed;
    if (cf.printed_discriminant) c["printed_discriminant"] = *cf.printed_discriminant;
    if (cf.matrix_discriminant) c["matrix_discriminant"] = *cf.matrix_discriminant;
    rep["closed_form"] = c;
    if (std::abs(cf.rho - sp.rho) > 1e-9 * std::max(1.0, sp.rho))
      add_flag(flags, "closed_form_mismatch", "closed form differs from the matrix root");
    if (cf.printed && std::abs(*cf.printed - sp.rho) > 1e-9 * std::max(1.0, sp.rho))
      add_flag(flags, "printed_formula_differs",
               "polynomial formula gives " + std::to_string(*cf.printed) + ", matrix root gives " +
                   std::to_string(sp.rho));
  } catch (const Error& e) {
    if (e.code() != Errc::unsupported) throw;
    rep["closed_form"] = {{"unsupported", e.what()}};
  }

  // Exact means of the local engine, reduced, against the closed-form matrix.
  const auto& eng = local_engine(params.kind, params.lambda, params.p_star);
  const std::size_t nt = eng.types().size();
  std::vector<double> exact(nt * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto m = eng.exact_mean(static_cast<int>(t), params.p);
    std::copy(m.children.begin(), m.children.end(), exact.begin() + t * nt);
  }
  const ReproMatrix full_exact(eng.labels(), exact);
  const auto rules = reduction_rules(params.kind, params.p_star, eng.types());
  ojson red;
  red["types"] = eng.labels();
  auto rj = ojson::array();
  for (const auto& r : rules) {
    ojson x;
    x["phantom"] = r.phantom;
    ojson co = ojson::object();
    for (const auto& [l, a] : r.coefficients) co[l] = a;
    x["coefficients"] = co;
    x["exact_residual"] = rule_residual(full_exact, r, rules);
    rj.push_back(x);
  }
  red["rules"] = rj;
  const auto reduced_exact = reduce(full_exact, rules);
  double gap = 0;
  for (std::size_t i = 0; i < an.a.size(); ++i) gap = std::max(gap, std::abs(reduced_exact.a[i] - an.a[i]));
  red["reduced_exact_vs_analytic"] = gap;
  red["full_exact_rho"] = spectral(full_exact).rho;
  rep["reduction"] = red;
  if (gap > 1e-9) add_flag(flags, "reduction_mismatch", "reduced exact means differ from the analytic matrix");

  if (samples > 0) {
    const auto em = estimate_matrix(params, samples, threads);
    const std::size_t s = em.survivors;
    ojson e;
    e["labels"] = em.labels;
    e["samples_per_type"] = em.samples;
    e["mean"] = rows_json(em.mean, em.order(), em.order());
    e["stderr"] = rows_json(em.stderr_, em.order(), em.order());
    e["added_mean"] = em.added_mean;
    e["reduced_mean"] = rows_json(em.projected_mean, s, s);
    e["reduced_stderr"] = rows_json(em.projected_stderr, s, s);
    int beyond = 0;
    double zmax = 0;
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) {
        const double d = std::abs(em.projected_mean[i * s + j] - an(i, j));
        const double se = em.projected_stderr[i * s + j];
        if (d <= 1e-12) continue;
        const double z = se > 0 ? d / se : INFINITY;
        zmax = std::max(zmax, z);
        if (z > 3) {
          ++beyond;
          add_flag(flags, "empirical_entry_beyond_3se",
                   "entry (" + an.labels[i] + ", " + an.labels[j] + ") differs by " + std::to_string(z) +
                       " standard errors");
        }
      }
    e["entries_compared"] = s * s;
    e["entries_beyond_3se"] = beyond;
    e["max_z"] = std::isfinite(zmax) ? ojson(zmax) : ojson("inf");
    const ReproMatrix full(em.labels, em.mean);
    const double rf = spectral(full).rho, se = rho_standard_error(full, em.stderr_);
    e["rho_full"] = rf;
    e["rho_full_stderr"] = se;
    const double band = std::max(1e-3, 3 * se);
    e["rho_band"] = band;
    if (std::abs(rf - sp.rho) > band)
      add_flag(flags, "empirical_rho_outside_band", "full empirical rho " + std::to_string(rf) + " vs " +
                                                        std::to_string(sp.rho));
    rep["empirical"] = e;
  }
  rep["flags"] = flags;
  return rep;
}

ojson dimension_sweep(const GrowthParams& params, const std::vector<double>& p_grid, int generations,
                      int replicates, int n_min, int threads) {
  require(!p_grid.empty(), Errc::invalid_argument, "p grid is empty");
  ojson rep;
  rep["config"] = params_json(params);
  rep["config"]["generations"] = generations;
  rep["config"]["replicates"] = replicates;
  rep["config"]["n_min"] = n_min;
  auto rows = ojson::array();
  for (double p : p_grid) {
    ojson row;
    row["p"] = p;
    try {
      GrowthParams g = params;
      g.p = p;
      auto d = dimension_report(g, generations, replicates, n_min, threads);
      row["d_theoretical"] = d.d_theoretical;
      row["d_numerical_median"] = d.d_numerical.median;
      row["d_numerical_iqr"] = d.d_numerical.iqr();
      row["fit_residual"] = d.fit_residual;
    } catch (const std::exception& e) {
      row["error"] = error_json(e);
    }
    rows.push_back(row);
  }
  rep["rows"] = rows;
  return rep;
}

ojson vonkoch_pattern_report(const Pattern& pat, int geometric_levels) {
  ojson rep;
  rep["config"] = {{"model", "pattern"}, {"lambda", pat.lambda}, {"pattern", pattern_literal(pat)},
                   {"geometric_levels", geometric_levels}};
  auto flags = ojson::array();
  rep["beta"] = pat.beta;
  rep["gamma"] = pat.gamma;
  rep["sigma"] = pat.sigma;
  const auto m = pattern_matrix(pat);
  rep["matrix"] = matrix_obj(m);
  const double rho = spectral(m).rho;
  rep["rho"] = rho;
  rep["rho_closed_form"] = pat.lambda + 2 * pat.beta;
  rep["dimension"] = std::log(rho) / std::log(static_cast<double>(pat.lambda));
  rep["spectrum"] = pattern_spectrum(pat);
  rep["expected_spectrum"] = pattern_expected_spectrum(pat);
  if (std::abs(rho - (pat.lambda + 2 * pat.beta)) > 1e-9) add_flag(flags, "rho_mismatch", "rho != lambda + 2 beta");

  auto closed = ojson::array();
  for (int n = 0; n <= std::max(0, geometric_levels); ++n) {
    auto st = pattern_stats(pat, n);
    closed.push_back({{"n", n}, {"perimeter", st.perimeter}, {"added_area", st.added_area},
                      {"boundary_edges", st.boundary_edges}, {"added_tiles", st.added_tiles}});
  }
  rep["closed_form"] = closed;

  if (geometric_levels > 0) {
    auto run = simulate_pattern(pat, geometric_levels);
    auto census = pattern_census(run);
    auto geo = ojson::array();
    bool exact = true, census_ok = true;
    for (int n = 0; n <= geometric_levels; ++n) {
      auto st = pattern_stats(pat, n);
      ojson g{{"n", n}, {"boundary_edges", run.boundary_edges[n]}, {"census", census[n]}};
      exact = exact && run.boundary_edges[n] == st.boundary_edges;
      if (n < geometric_levels) {
        g["added_tiles"] = run.added_tiles[n];
        exact = exact && run.added_tiles[n] == st.added_tiles;
        // Next census predicted by one application of the matrix.
        std::vector<double> pred(4, 0.0);
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) pred[c] += census[n][r] * m(r, c);
        g["census_next_predicted"] = pred;
        for (int c = 0; c < 4; ++c) census_ok = census_ok && std::abs(pred[c] - census[n + 1][c]) < 1e-9;
      }
      geo.push_back(g);
    }
    rep["geometric"] = geo;
    rep["geometric_matches_closed_form"] = exact;
    rep["census_follows_matrix"] = census_ok;
    if (!exact) add_flag(flags, "geometric_mismatch", "geometric counts differ from the closed forms");
  }
  rep["flags"] = flags;
  return rep;
}

ojson vonkoch_random_report(int lambda, double p, std::uint64_t samples, std::uint64_t seed, int threads) {
  ojson rep;
  rep["config"] = {{"model", "random"}, {"lambda", lambda}, {"p", p}, {"samples", samples}, {"seed", seed}};
  auto flags = ojson::array();
  const auto r = random_koch_rho(lambda, p);
  rep["matrix"] = {{"labels", {"T1"}}, {"rows", {{r.rho}}}};
  rep["rho"] = r.rho;
  rep["dimension"] = r.d;
  if (samples > 0) {
    const auto m = random_koch_mean(lambda, p, samples, seed, threads);
    rep["empirical"] = {{"mean_children_per_edge", m.mean}, {"stderr", m.stderr_}, {"samples", m.samples}};
    if (std::abs(m.mean - r.rho) > 3 * m.stderr_ + 1e-12)
      add_flag(flags, "empirical_mean_beyond_3se", "one-step mean " + std::to_string(m.mean));
  }
  rep["flags"] = flags;
  return rep;
}

RenderStyle style_from_json(const std::string& text) {
  RenderStyle s;
  if (text.empty()) return s;
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::invalid_argument, std::string("render style: ") + e.what());
  }
  require(j.is_object(), Errc::invalid_argument, "render style must be a JSON object");
  try {
    if (j.contains("background")) s.background = j["background"].get<std::string>();
    if (j.contains("region_fill")) s.region_fill = j["region_fill"].get<std::string>();
    if (j.contains("stroke")) s.stroke = j["stroke"].get<std::string>();
    if (j.contains("stroke_width")) s.stroke_width = j["stroke_width"].get<double>();
    if (j.contains("width")) s.width = j["width"].get<int>();
    if (j.contains("height")) s.height = j["height"].get<int>();
    if (j.contains("margin")) s.margin = j["margin"].get<int>();
    if (j.contains("frontier_ramp")) s.frontier_ramp = j["frontier_ramp"].get<std::vector<std::string>>();
    if (j.contains("frontier_by_type"))
      for (auto& [k, v] : j["frontier_by_type"].items()) s.frontier_by_type[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, std::string("render style: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace fractile
