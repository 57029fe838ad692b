/* Random fractal growth on regular tessellations: C interface.
 *
 * Every call returns a fractile_status. On failure the message is available from
 * fractile_last_error() (per thread, valid until the next failing call). Strings
 * handed out through char** must be released with fractile_free(). */

#ifndef FRACTILE_FRACTILE_H
#define FRACTILE_FRACTILE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FRACTILE_API __declspec(dllexport)
#else
#define FRACTILE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fractile_status {
  FRACTILE_OK = 0,
  FRACTILE_INVALID_ARGUMENT = 1,
  FRACTILE_UNSUPPORTED = 2,
  FRACTILE_OVERFLOW = 3,
  FRACTILE_NO_CONVERGENCE = 4,
  FRACTILE_CONTRACT = 5,
  FRACTILE_CAPACITY = 6,
  FRACTILE_IO = 7,
  FRACTILE_INTERNAL = 8
} fractile_status;

typedef enum fractile_kind {
  FRACTILE_HEXAGONAL = 0,
  FRACTILE_SQUARE = 1,
  FRACTILE_TRIANGULAR = 2
} fractile_kind;

typedef struct fractile_params {
  int kind;      /* fractile_kind */
  int lambda;    /* scale factor */
  double p;      /* probability for tiles away from edge ends */
  int p_star;    /* 0 or 1: tiles holding an edge end */
  uint64_t seed;
} fractile_params;

/* A growing region (global engine). */
typedef struct fractile_growth fractile_growth;

FRACTILE_API const char* fractile_version(void);
FRACTILE_API const char* fractile_last_error(void);
FRACTILE_API const char* fractile_status_string(fractile_status status);
FRACTILE_API void fractile_free(void* ptr);

/* Parses "hexagonal" / "square" / "triangular". */
FRACTILE_API fractile_status fractile_parse_kind(const char* name, int* kind);

FRACTILE_API fractile_status fractile_growth_create(const fractile_params* params, fractile_growth** out);
FRACTILE_API void fractile_growth_destroy(fractile_growth* growth);
FRACTILE_API fractile_status fractile_growth_step(fractile_growth* growth, int steps);
FRACTILE_API fractile_status fractile_growth_level(const fractile_growth* growth, int* level);
/* Statistics of level m (added area needs level m + 1 to exist). Holes are counted
 * for squares when with_holes is non-zero. */
FRACTILE_API fractile_status fractile_growth_stats_json(fractile_growth* growth, int m, int with_holes, char** json);
FRACTILE_API fractile_status fractile_growth_snapshot_json(fractile_growth* growth, int m, char** json);
/* style_json may be NULL for the default style. */
FRACTILE_API fractile_status fractile_growth_svg(fractile_growth* growth, int m, int with_frontier,
                                                 const char* style_json, char** svg);

/* Perron root of the analytic reduced matrix and log(rho) / log(lambda). */
FRACTILE_API fractile_status fractile_rho(const fractile_params* params, double* rho, double* dimension);
/* Matrix report; samples = 0 skips the Monte Carlo half. threads <= 0 uses the default. */
FRACTILE_API fractile_status fractile_matrix_report(const fractile_params* params, uint64_t samples, int threads,
                                                    char** json);
FRACTILE_API fractile_status fractile_dimension_sweep(const fractile_params* params, const double* p_grid,
                                                      size_t grid_size, int generations, int replicates,
                                                      int n_min, int threads, char** json);
/* lambda = 0 infers lambda from the literal length. */
FRACTILE_API fractile_status fractile_vonkoch_pattern(const char* literal, int lambda, int geometric_levels,
                                                      char** json);
FRACTILE_API fractile_status fractile_vonkoch_random(int lambda, double p, uint64_t samples, uint64_t seed,
                                                     int threads, char** json);

#ifdef __cplusplus
}
#endif

#endif
