#pragma once

// JSON reports combining the modules; the C API hands these out as strings.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "growth.hpp"
#include "render.hpp"
#include "vonkoch.hpp"

namespace fractile {

using ojson = nlohmann::ordered_json;

ojson params_json(const GrowthParams& p);
ojson stats_json(Kind kind, const GrowthStats& s);

// Analytic matrix and Perron data, closed form, and (samples > 0) the empirical
// matrix with its reduction diagnostics. "flags" lists every deviation found.
ojson matrix_report(const GrowthParams& params, std::uint64_t samples, int threads);

// One row per p: theoretical and replicated numerical dimension. Errors are kept
// per row with the p value attached.
ojson dimension_sweep(const GrowthParams& params, const std::vector<double>& p_grid, int generations,
                      int replicates, int n_min, int threads);

ojson vonkoch_pattern_report(const Pattern& pattern, int geometric_levels);
ojson vonkoch_random_report(int lambda, double p, std::uint64_t samples, std::uint64_t seed, int threads);

// Style from a JSON object; missing keys keep their defaults.
RenderStyle style_from_json(const std::string& text);

}  // namespace fractile
