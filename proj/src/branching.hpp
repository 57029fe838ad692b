#pragma once

// The frontier as a multitype Galton-Watson process. A local engine replays one growth
// step around a single frontier tile whose neighbourhood realises exactly the contacts
// of its type, and classifies the new frontier tiles inside it.
//
// Fine hexagons can overhang the parent; such a child is shared with the neighbouring
// parent. Means count it with weight 1/k (k = number of coarse tiles it overlaps);
// integer offspring draws give it to this parent with probability 1/k.

#include <cstdint>
#include <string>
#include <vector>

#include "growth.hpp"
#include "rng.hpp"

namespace fractile {

struct OffspringSample {
  int parent = 0;                           // index into the engine's type list
  std::vector<std::uint32_t> child_counts;  // shared children assigned by coin flip
  std::vector<double> child_shares;         // shared children weighted by their share
  std::uint32_t added_tiles = 0;            // tiles added inside the parent (coin for shared ones)
  double added_share = 0.0;
};

class LocalEngine {
 public:
  LocalEngine(Kind kind, int lambda, int p_star);
  ~LocalEngine();
  LocalEngine(const LocalEngine&) = delete;
  LocalEngine& operator=(const LocalEngine&) = delete;

  Kind kind() const { return kind_; }
  int lambda() const { return lambda_; }
  int p_star() const { return p_star_; }

  // Survivor types first, then every other type reachable from them.
  const std::vector<TypeId>& types() const { return types_; }
  std::size_t survivor_count() const { return survivors_; }
  std::vector<std::string> labels() const;
  int index_of(TypeId t) const;  // -1 when unknown

  // Largest number of coarse tiles a counted child overlaps.
  int max_overlap() const { return max_overlap_; }

  // One offspring draw for a parent of the given type index; (k1, k2) key the draw.
  void sample(int parent, double p, const KeyedRng& rng, std::uint64_t k1, std::uint64_t k2,
              OffspringSample& out) const;

  // Exact expected children (share weighted) and added tiles for a parent type,
  // enumerating the candidates each child depends on.
  struct Mean {
    std::vector<double> children;
    double added = 0.0;
  };
  Mean exact_mean(int parent, double p) const;

 private:
  struct Template;
  const Template& build(TypeId t);

  Kind kind_;
  int lambda_;
  int p_star_;
  std::vector<TypeId> types_;
  std::size_t survivors_ = 0;
  std::vector<Template*> templates_;
  std::vector<std::int16_t> lut_;  // raw (edges, verts) -> type index
  int max_overlap_ = 1;
};

// Shared engine per (kind, lambda, p_star). Thread-safe construction.
const LocalEngine& local_engine(Kind kind, int lambda, int p_star);

OffspringSample local_offspring_sample(TypeId parent, const GrowthParams& params, std::uint64_t draw);

// Initial census: one sector of R_0 (T1, plus T0 for squares with p_star = 1).
std::vector<std::uint64_t> initial_census(const LocalEngine& engine);

struct EmpiricalMatrix {
  std::vector<TypeId> types;
  std::vector<std::string> labels;
  std::uint64_t samples = 0;          // per parent type
  std::vector<double> mean;           // row-major, parent x child, share weighted
  std::vector<double> stderr_;        // per entry standard error of the mean
  std::vector<double> added_mean;     // per parent type
  std::vector<double> added_stderr;
  // Offspring rewritten through the survivor types (parent x survivor), per sample.
  std::size_t survivors = 0;
  std::vector<double> projected_mean;
  std::vector<double> projected_stderr;
  std::size_t order() const { return types.size(); }
  double at(std::size_t r, std::size_t c) const { return mean[r * types.size() + c]; }
  double se(std::size_t r, std::size_t c) const { return stderr_[r * types.size() + c]; }
};

EmpiricalMatrix estimate_matrix(const GrowthParams& params, std::uint64_t samples_per_type, int threads);

struct GwTrajectory {
  std::vector<TypeId> types;
  std::vector<std::vector<std::uint64_t>> z;  // z[n][type]
  std::vector<std::uint64_t> added;           // tiles added by the step from n to n+1
};

// Generations 0..n starting from z0 (over engine.types()). Throws a capacity error
// when the population exceeds `cap`.
GwTrajectory simulate_gw(const std::vector<std::uint64_t>& z0, int generations, const GrowthParams& params,
                         std::uint64_t cap = 100'000'000, int threads = 1);

// M_n = rho^-n <Z_n, v>; v is indexed like the trajectory's types.
std::vector<double> martingale_path(const GwTrajectory& traj, double rho, const std::vector<double>& v);

// Extends a vector over the survivor types to all engine types through the
// reduction coefficients.
std::vector<double> extend_to_types(const LocalEngine& engine, const std::vector<double>& survivor_values);

}  // namespace fractile
