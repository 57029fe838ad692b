#pragma once

// Fractal dimension from the Perron root, box-count slope fits, and the rescaled
// perimeter / added-area / hole series.

#include <string>
#include <vector>

#include "branching.hpp"
#include "growth.hpp"

namespace fractile {

// log(rho) / log(lambda); rho must lie in [lambda, lambda^2).
double theoretical_dimension(double rho, int lambda);

struct DimensionFit {
  double slope = 0.0;        // least-squares slope of log R_n against n log lambda
  double intercept = 0.0;
  double residual = 0.0;     // root mean square residual of the fit
  double last_ratio = 0.0;   // log(R_{n+1} / R_n) / log(lambda) at the last step
  int n_min = 0;
  int n_max = 0;
};

// Fits over levels n_min..n_max inclusive. n_max < 0 means the last level; the
// default window drops the first three levels.
DimensionFit fit_dimension(const std::vector<double>& counts, int lambda, int n_min = 3, int n_max = -1);

// Raw per-level measurements of one trajectory.
struct LevelSeries {
  std::vector<double> frontier;    // R_n
  std::vector<double> perimeter;   // L_n (edge count times lambda^-n)
  std::vector<double> added_area;  // A_n = |K_{n+1} minus refined K_n| lambda^-2(n+1)
  std::vector<double> holes;       // H_n (squares)
};

LevelSeries series_from_stats(const std::vector<GrowthStats>& stats, int lambda);
// From a local-engine run: perimeter through the edges carried by each type, holes
// as the running total of closed-ring types.
LevelSeries series_from_gw(const GwTrajectory& traj, Kind kind, int lambda);

struct LimitSeries {
  std::string name;
  std::string rescale;          // e.g. "(lambda/rho)^n"
  std::vector<double> raw;
  std::vector<double> rescaled;
  double stabilization = 0.0;   // largest relative change over the last `tail` steps
};

struct Limits {
  LimitSeries perimeter;
  LimitSeries added_area;
  LimitSeries holes;
  std::vector<double> hole_ratio;  // H_{n+1} / H_n (0 where H_n = 0)
};

double tail_change(const std::vector<double>& values, int tail);
Limits limit_series(const LevelSeries& s, double rho, int lambda, int tail = 2);

struct Summary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
  std::size_t count = 0;
};
Summary summarize(std::vector<double> values);

struct DimensionReport {
  double d_theoretical = 0.0;
  Summary d_numerical;
  int n_min = 0;
  int n_max = 0;
  double fit_residual = 0.0;  // median over replicates
  std::size_t replicates = 0;
};

// Replicated local-engine runs from the initial census, fitted over [n_min, generations].
DimensionReport dimension_report(const GrowthParams& params, int generations, int replicates, int n_min,
                                 int threads);

std::string series_csv(const LevelSeries& s, double rho, int lambda);

}  // namespace fractile
