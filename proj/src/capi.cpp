#include "fractile/fractile.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "error.hpp"
#include "growth.hpp"
#include "matrices.hpp"
#include "dimension.hpp"
#include "parallel.hpp"
#include "render.hpp"
#include "reports.hpp"

struct fractile_growth {
  fractile::GrowthParams params;
  fractile::Region region;
};

namespace {

thread_local std::string g_last_error;

fractile_status set_error(fractile_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
fractile_status guarded(F&& f) {
  try {
    f();
    return FRACTILE_OK;
  } catch (const fractile::Error& e) {
    return set_error(static_cast<fractile_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FRACTILE_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FRACTILE_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

fractile::GrowthParams to_params(const fractile_params* p) {
  fractile::require(p != nullptr, fractile::Errc::invalid_argument, "params is NULL");
  fractile::require(p->kind >= 0 && p->kind <= 2, fractile::Errc::invalid_argument,
                    "unknown tessellation kind " + std::to_string(p->kind));
  fractile::GrowthParams g;
  g.kind = static_cast<fractile::Kind>(p->kind);
  g.lambda = p->lambda;
  g.p = p->p;
  g.p_star = p->p_star;
  g.seed = p->seed;
  g.validate();
  return g;
}

void need(const void* ptr, const char* what) {
  fractile::require(ptr != nullptr, fractile::Errc::invalid_argument, std::string(what) + " is NULL");
}

int threads_or_default(int t) { return t > 0 ? t : fractile::default_threads(); }

}  // namespace

extern "C" {

const char* fractile_version(void) { return "1.0.0"; }

const char* fractile_last_error(void) { return g_last_error.c_str(); }

const char* fractile_status_string(fractile_status s) {
  switch (s) {
    case FRACTILE_OK: return "ok";
    case FRACTILE_INVALID_ARGUMENT: return "invalid argument";
    case FRACTILE_UNSUPPORTED: return "unsupported";
    case FRACTILE_OVERFLOW: return "overflow";
    case FRACTILE_NO_CONVERGENCE: return "no convergence";
    case FRACTILE_CONTRACT: return "contract violation";
    case FRACTILE_CAPACITY: return "capacity exceeded";
    case FRACTILE_IO: return "i/o error";
    case FRACTILE_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void fractile_free(void* ptr) { std::free(ptr); }

fractile_status fractile_parse_kind(const char* name, int* kind) {
  return guarded([&] {
    need(name, "name");
    need(kind, "kind");
    *kind = static_cast<int>(fractile::parse_kind(name));
  });
}

fractile_status fractile_growth_create(const fractile_params* params, fractile_growth** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto g = to_params(params);
    *out = new fractile_growth{g, fractile::initial_region(g)};
  });
}

void fractile_growth_destroy(fractile_growth* growth) { delete growth; }

fractile_status fractile_growth_step(fractile_growth* growth, int steps) {
  return guarded([&] {
    need(growth, "growth");
    fractile::require(steps >= 0, fractile::Errc::invalid_argument, "steps must be non-negative");
    for (int i = 0; i < steps; ++i) fractile::grow(growth->region, growth->params);
  });
}

fractile_status fractile_growth_level(const fractile_growth* growth, int* level) {
  return guarded([&] {
    need(growth, "growth");
    need(level, "level");
    *level = growth->region.level();
  });
}

namespace {
void check_level(const fractile_growth* g, int m) {
  fractile::require(m >= 0 && m <= g->region.level(), fractile::Errc::invalid_argument,
                    "level " + std::to_string(m) + " is outside 0.." + std::to_string(g->region.level()));
}
}  // namespace

fractile_status fractile_growth_stats_json(fractile_growth* growth, int m, int with_holes, char** json) {
  return guarded([&] {
    need(growth, "growth");
    need(json, "json");
    check_level(growth, m);
    auto front = fractile::frontier(growth->region, m, growth->params.p_star);
    auto st = fractile::region_stats(growth->region, front, with_holes != 0);
    *json = dup(fractile::stats_json(growth->params.kind, st).dump());
  });
}

fractile_status fractile_growth_snapshot_json(fractile_growth* growth, int m, char** json) {
  return guarded([&] {
    need(growth, "growth");
    need(json, "json");
    check_level(growth, m);
    *json = dup(fractile::region_snapshot_json(growth->region, m));
  });
}

fractile_status fractile_growth_svg(fractile_growth* growth, int m, int with_frontier, const char* style_json,
                                    char** svg) {
  return guarded([&] {
    need(growth, "growth");
    need(svg, "svg");
    check_level(growth, m);
    auto style = fractile::style_from_json(style_json ? style_json : "");
    if (with_frontier) {
      auto front = fractile::frontier(growth->region, m, growth->params.p_star);
      *svg = dup(fractile::render_svg(growth->region, m, &front, style));
    } else {
      *svg = dup(fractile::render_svg(growth->region, m, nullptr, style));
    }
  });
}

fractile_status fractile_rho(const fractile_params* params, double* rho, double* dimension) {
  return guarded([&] {
    auto g = to_params(params);
    auto sp = fractile::spectral(fractile::analytic_matrix(g.kind, g.lambda, g.p, g.p_star));
    if (rho) *rho = sp.rho;
    if (dimension) *dimension = fractile::theoretical_dimension(sp.rho, g.lambda);
  });
}

fractile_status fractile_matrix_report(const fractile_params* params, uint64_t samples, int threads, char** json) {
  return guarded([&] {
    need(json, "json");
    *json = dup(fractile::matrix_report(to_params(params), samples, threads_or_default(threads)).dump());
  });
}

fractile_status fractile_dimension_sweep(const fractile_params* params, const double* p_grid, size_t grid_size,
                                         int generations, int replicates, int n_min, int threads, char** json) {
  return guarded([&] {
    need(json, "json");
    need(p_grid, "p_grid");
    auto g = to_params(params);
    std::vector<double> grid(p_grid, p_grid + grid_size);
    *json = dup(fractile::dimension_sweep(g, grid, generations, replicates, n_min, threads_or_default(threads)).dump());
  });
}

fractile_status fractile_vonkoch_pattern(const char* literal, int lambda, int geometric_levels, char** json) {
  return guarded([&] {
    need(literal, "literal");
    need(json, "json");
    fractile::require(geometric_levels >= 0, fractile::Errc::invalid_argument, "geometric levels must be >= 0");
    auto pat = fractile::parse_pattern(literal, lambda);
    *json = dup(fractile::vonkoch_pattern_report(pat, geometric_levels).dump());
  });
}

fractile_status fractile_vonkoch_random(int lambda, double p, uint64_t samples, uint64_t seed, int threads,
                                        char** json) {
  return guarded([&] {
    need(json, "json");
    *json = dup(fractile::vonkoch_random_report(lambda, p, samples, seed, threads_or_default(threads)).dump());
  });
}

}  // extern "C"
