#pragma once

// Reproduction matrices: closed-form reduced matrices, the row-combination reduction of
// phantom types, and Perron data by power iteration.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "types.hpp"

namespace fractile {

struct ReproMatrix {
  std::vector<std::string> labels;
  std::vector<double> a;  // row-major; row = parent type, column = child type

  ReproMatrix() = default;
  ReproMatrix(std::vector<std::string> l, std::vector<double> values);
  std::size_t order() const { return labels.size(); }
  double operator()(std::size_t r, std::size_t c) const { return a[r * order() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return a[r * order() + c]; }
  int index(const std::string& label) const;  // -1 when absent
};

// Reduced matrix over the survivor types (T1, T2[, T0]).
ReproMatrix analytic_matrix(Kind kind, int lambda, double p, int p_star);

struct ReductionRule {
  std::string phantom;
  std::vector<std::pair<std::string, double>> coefficients;  // survivor label -> alpha
};

// One rule per non-survivor type in `types`.
std::vector<ReductionRule> reduction_rules(Kind kind, int p_star, const std::vector<TypeId>& types);

// Rows of m with each child type rewritten as its combination of survivors (n x s,
// survivors in the order they appear in m).
std::vector<double> projected_rows(const ReproMatrix& m, const std::vector<ReductionRule>& rules);

// Folds every phantom type into the survivors: column C_u gains alpha_u times the
// phantom column, then the phantom row and column are dropped. Precondition: each
// projected phantom row equals the stated combination of projected survivor rows,
// within `tol`, or within `k_se` combined standard errors when `projected_stderr`
// (layout of projected_rows) is given. Violations throw with the residual row.
ReproMatrix reduce(const ReproMatrix& m, const std::vector<ReductionRule>& rules, double tol = 1e-9,
                   const std::vector<double>* projected_stderr = nullptr, double k_se = 3.0);

// Largest deviation of a projected phantom row from its rule.
double rule_residual(const ReproMatrix& m, const ReductionRule& rule, const std::vector<ReductionRule>& rules);

struct SpectralResult {
  double rho = 0.0;
  std::vector<double> v;  // right Perron vector, unit Euclidean norm, M v = rho v
  int iterations = 0;
  double residual = 0.0;  // max-norm of M v - rho v
};

SpectralResult spectral(const ReproMatrix& m, double tol = 1e-12, int max_iter = 100'000);
SpectralResult left_spectral(const ReproMatrix& m, double tol = 1e-12, int max_iter = 100'000);

// Largest root of the characteristic polynomial of a 2x2 matrix, and its discriminant.
double quadratic_rho(const ReproMatrix& m);
double discriminant(const ReproMatrix& m);

// Standard error of rho from per-entry standard errors (first-order perturbation).
double rho_standard_error(const ReproMatrix& m, const std::vector<double>& stderr_);

// Some power up to order^2 is strictly positive.
bool is_primitive(const ReproMatrix& m);

struct ClosedFormRho {
  double rho = 0.0;                     // authoritative value
  std::optional<double> printed;        // value of the printed polynomial formula, when different
  std::optional<double> printed_discriminant;
  std::optional<double> matrix_discriminant;
};

// Hexagons: piecewise in lambda mod 3. Squares with p_star = 0: the Q-polynomial
// formula. Triangles: the quadratic root of the matrix, with the printed Q value
// attached. Squares with p_star = 1 have no closed form (unsupported).
ClosedFormRho closed_form_rho(Kind kind, int lambda, double p, int p_star);

// lambda^2 Q3 + lambda Q4 + Q5 as printed for the triangular model.
double triangular_printed_discriminant(int lambda, double p);

std::string matrix_json(const ReproMatrix& m);

}  // namespace fractile
