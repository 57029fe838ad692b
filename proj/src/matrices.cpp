#include "matrices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "error.hpp"

namespace fractile {

ReproMatrix::ReproMatrix(std::vector<std::string> l, std::vector<double> values)
    : labels(std::move(l)), a(std::move(values)) {
  require(a.size() == labels.size() * labels.size(), Errc::invalid_argument, "matrix size does not match its labels");
}

int ReproMatrix::index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

namespace {

std::vector<std::string> survivor_labels(Kind kind, int p_star) {
  std::vector<std::string> out;
  for (auto t : survivor_types(kind, p_star)) out.push_back(type_name(kind, t));
  return out;
}

}  // namespace

ReproMatrix analytic_matrix(Kind kind, int lambda, double p, int p_star) {
  check_lambda(kind, lambda);
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "p must lie in [0, 1]");
  require(p_star == 0 || p_star == 1, Errc::invalid_argument, "p_star must be 0 or 1");
  const double l = lambda;
  const double q = p * (1 - p);
  auto labels = survivor_labels(kind, p_star);
  switch (kind) {
    case Kind::hexagonal: {
      require(!(lambda == 2 && p_star == 1), Errc::unsupported,
              "no reduced matrix for hexagons with lambda = 2 and p_star = 1 (the phantom rows do not reduce)");
      const double lp = lambda / 3;
      const int r = lambda % 3;
      double b = 2 * lp, d = 0;
      if (r == 0) d = 4 * lp - p * p;
      if (r == 1) {
        b = 2 * lp + p_star;
        d = 4 * lp + 1 + p_star - p;
      }
      if (r == 2) {
        b = 2 * lp + 1 + p_star;
        d = 4 * lp + 2 + p_star;
      }
      return ReproMatrix(labels, {1, b, 0, d});
    }
    case Kind::square: {
      const double k = l - 3;
      if (p_star == 0) {
        return ReproMatrix(labels, {
            k * (1 - 2 * q) + 3 - 2 * p,
            k * 2 * q + 2 * p,
            k * (2 - 4 * q) + 2 * (p + 2) * (1 - p) * (1 - p),
            k * 4 * q + 1 + p * (5 - 2 * p - p * p),
        });
      }
      return ReproMatrix(labels, {
          k * (1 - 2 * q) + 1 + 2 * p,
          k * 2 * q + 2 * (1 - p),
          k * 2 * q + 2 * (1 - p),
          k * (2 - 4 * q) + 2 - 2 * p * (1 - p * p),
          k * 4 * q + 3 + p * (1 - 2 * p - p * p),
          k * 4 * q + (1 - p) * (2 + 3 * p - 3 * p * p),
          0,
          1,
          2,
      });
    }
    case Kind::triangular: {
      require(p_star == 0, Errc::unsupported, "triangular tessellation with p_star = 1 is not supported");
      const double k = l - 3;
      const double s = 1 + p - 2 * p * p;
      return ReproMatrix(labels, {
          k * s + 3 + p,
          k * p * p,
          k * 2 * s + 4 + 3 * p - 6 * p * p,
          k * 2 * p * p + 1 - p + 3 * p * p,
      });
    }
  }
  fail(Errc::internal, "unknown tessellation");
}

std::vector<ReductionRule> reduction_rules(Kind kind, int p_star, const std::vector<TypeId>& types) {
  auto surv = survivor_types(kind, p_star);
  auto names = survivor_labels(kind, p_star);
  std::vector<ReductionRule> out;
  for (auto t : types) {
    if (std::find(surv.begin(), surv.end(), t) != surv.end()) continue;
    ReductionRule r;
    r.phantom = type_name(kind, t);
    auto c = reduction_coefficients(kind, p_star, t);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0.0) r.coefficients.push_back({names[i], c[i]});
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

struct Folding {
  std::vector<std::size_t> keep;    // survivor indices in m
  std::vector<double> coeff;        // n x keep.size(): row t expresses type t through survivors
};

Folding folding(const ReproMatrix& m, const std::vector<ReductionRule>& rules) {
  const std::size_t n = m.order();
  std::vector<bool> phantom(n, false);
  for (const auto& r : rules) {
    const int ph = m.index(r.phantom);
    require(ph >= 0, Errc::invalid_argument, "reduction rule names an unknown type " + r.phantom);
    phantom[ph] = true;
  }
  Folding f;
  for (std::size_t i = 0; i < n; ++i)
    if (!phantom[i]) f.keep.push_back(i);
  const std::size_t s = f.keep.size();
  f.coeff.assign(n * s, 0.0);
  for (std::size_t j = 0; j < s; ++j) f.coeff[f.keep[j] * s + j] = 1.0;
  for (const auto& r : rules) {
    const int ph = m.index(r.phantom);
    for (const auto& [lab, alpha] : r.coefficients) {
      const int u = m.index(lab);
      require(u >= 0 && !phantom[u], Errc::invalid_argument, "reduction coefficient on a non-survivor " + lab);
      auto pos = std::find(f.keep.begin(), f.keep.end(), static_cast<std::size_t>(u)) - f.keep.begin();
      f.coeff[ph * s + pos] += alpha;
    }
  }
  return f;
}

// Rows of m with every child type rewritten through the survivors (n x s).
std::vector<double> project(const ReproMatrix& m, const Folding& f) {
  const std::size_t n = m.order(), s = f.keep.size();
  std::vector<double> out(n * s, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t u = 0; u < n; ++u)
      if (m(t, u) != 0.0)
        for (std::size_t j = 0; j < s; ++j) out[t * s + j] += m(t, u) * f.coeff[u * s + j];
  return out;
}

}  // namespace

std::vector<double> projected_rows(const ReproMatrix& m, const std::vector<ReductionRule>& rules) {
  return project(m, folding(m, rules));
}

double rule_residual(const ReproMatrix& m, const ReductionRule& rule, const std::vector<ReductionRule>& rules) {
  const auto f = folding(m, rules);
  const auto proj = project(m, f);
  const std::size_t s = f.keep.size();
  const int ph = m.index(rule.phantom);
  require(ph >= 0, Errc::invalid_argument, "reduction rule names an unknown type " + rule.phantom);
  double worst = 0;
  for (std::size_t j = 0; j < s; ++j) {
    double expect = 0;
    for (std::size_t i = 0; i < s; ++i) expect += f.coeff[ph * s + i] * proj[f.keep[i] * s + j];
    worst = std::max(worst, std::abs(proj[ph * s + j] - expect));
  }
  return worst;
}

ReproMatrix reduce(const ReproMatrix& m, const std::vector<ReductionRule>& rules, double tol,
                   const std::vector<double>* projected_stderr, double k_se) {
  const auto f = folding(m, rules);
  const auto proj = project(m, f);
  const std::size_t n = m.order(), s = f.keep.size();
  if (projected_stderr)
    require(projected_stderr->size() == n * s, Errc::invalid_argument, "projected standard errors have the wrong size");

  // Precondition: each phantom row, with its children rewritten through the survivors,
  // is the stated combination of the survivor rows.
  for (const auto& r : rules) {
    const int ph = m.index(r.phantom);
    std::vector<double> resid(s);
    bool bad = false;
    for (std::size_t j = 0; j < s; ++j) {
      double expect = 0;
      double var = projected_stderr ? std::pow((*projected_stderr)[ph * s + j], 2) : 0.0;
      for (std::size_t i = 0; i < s; ++i) {
        const double alpha = f.coeff[ph * s + i];
        expect += alpha * proj[f.keep[i] * s + j];
        if (projected_stderr) var += alpha * alpha * std::pow((*projected_stderr)[f.keep[i] * s + j], 2);
      }
      resid[j] = proj[ph * s + j] - expect;
      const double allowed = std::max(tol, projected_stderr ? k_se * std::sqrt(var) : 0.0);
      if (std::abs(resid[j]) > allowed) bad = true;
    }
    if (bad) {
      std::string row;
      for (std::size_t j = 0; j < s; ++j) row += (j ? " " : "") + std::to_string(resid[j]);
      fail(Errc::contract, "reduction precondition fails for " + r.phantom + ": residual row [" + row + "]");
    }
  }

  std::vector<std::string> labels;
  for (auto i : f.keep) labels.push_back(m.labels[i]);
  ReproMatrix out(labels, std::vector<double>(s * s, 0.0));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) out(i, j) = proj[f.keep[i] * s + j];
  return out;
}

namespace {

SpectralResult power_iteration(const ReproMatrix& m, bool transpose, double tol, int max_iter) {
  const std::size_t n = m.order();
  require(n > 0, Errc::invalid_argument, "empty matrix");
  for (double x : m.a) require(std::isfinite(x), Errc::invalid_argument, "matrix has a non-finite entry");
  auto at = [&](std::size_t r, std::size_t c) { return transpose ? m(c, r) : m(r, c); };
  std::vector<double> v(n, 1.0), w(n);
  SpectralResult res;
  double rho = 0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += at(i, j) * v[j];
      w[i] = s;
    }
    double norm = 0;
    for (double x : w) norm = std::max(norm, std::abs(x));
    require(norm > 0, Errc::no_convergence, "power iteration collapsed to zero");
    // Rayleigh-style estimate from the max-norm growth, then residual on the new vector.
    for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
    std::swap(v, w);
    double num = 0, den = 0;
    std::vector<double> mv(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += at(i, j) * v[j];
      mv[i] = s;
      num += s * v[i];
      den += v[i] * v[i];
    }
    rho = num / den;
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(mv[i] - rho * v[i]));
    res.iterations = it;
    res.residual = r;
    if (r <= tol * std::max(1.0, rho)) break;
    if (it == max_iter)
      fail(Errc::no_convergence, "power iteration did not converge; last residual " + std::to_string(r));
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  res.rho = rho;
  res.v = v;
  return res;
}

}  // namespace

SpectralResult spectral(const ReproMatrix& m, double tol, int max_iter) {
  auto res = power_iteration(m, false, tol, max_iter);
  if (m.order() == 2) {
    const double q = quadratic_rho(m);
    require(std::abs(q - res.rho) <= 1e-9 * std::max(1.0, q), Errc::no_convergence,
            "power iteration and the quadratic root disagree");
  }
  return res;
}

SpectralResult left_spectral(const ReproMatrix& m, double tol, int max_iter) {
  return power_iteration(m, true, tol, max_iter);
}

double discriminant(const ReproMatrix& m) {
  require(m.order() == 2, Errc::invalid_argument, "discriminant needs a 2x2 matrix");
  const double tr = m(0, 0) + m(1, 1), det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return tr * tr - 4 * det;
}

double quadratic_rho(const ReproMatrix& m) {
  const double tr = m(0, 0) + m(1, 1);
  return 0.5 * (tr + std::sqrt(std::max(0.0, discriminant(m))));
}

double rho_standard_error(const ReproMatrix& m, const std::vector<double>& stderr_) {
  require(stderr_.size() == m.a.size(), Errc::invalid_argument, "standard errors do not match the matrix");
  auto right = spectral(m, 1e-11);
  auto left = left_spectral(m, 1e-11);
  double uv = 0;
  for (std::size_t i = 0; i < m.order(); ++i) uv += left.v[i] * right.v[i];
  require(std::abs(uv) > 1e-14, Errc::no_convergence, "Perron vectors are orthogonal");
  double var = 0;
  for (std::size_t i = 0; i < m.order(); ++i)
    for (std::size_t j = 0; j < m.order(); ++j) {
      const double g = left.v[i] * right.v[j] / uv;
      var += g * g * stderr_[i * m.order() + j] * stderr_[i * m.order() + j];
    }
  return std::sqrt(var);
}

bool is_primitive(const ReproMatrix& m) {
  const std::size_t n = m.order();
  std::vector<std::uint8_t> pos(n * n), cur(n * n);
  for (std::size_t i = 0; i < n * n; ++i) pos[i] = cur[i] = m.a[i] > 0;
  for (std::size_t k = 1; k <= n * n; ++k) {
    if (std::all_of(cur.begin(), cur.end(), [](std::uint8_t x) { return x != 0; })) return true;
    std::vector<std::uint8_t> next(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        if (cur[i * n + l])
          for (std::size_t j = 0; j < n; ++j)
            if (pos[l * n + j]) next[i * n + j] = 1;
    cur = std::move(next);
  }
  return false;
}

double triangular_printed_discriminant(int lambda, double p) {
  const double l = lambda;
  const double q3 = -16 * std::pow(p, 4) + 8 * std::pow(p, 3) + 9 * p * p + 2 * p + 1;
  const double q4 = 72 * std::pow(p, 4) - 46 * std::pow(p, 3) - 40 * p * p - 4 * p - 2;
  const double q5 = -63 * std::pow(p, 4) + 54 * std::pow(p, 3) + 31 * p * p + 2 * p + 1;
  return l * l * q3 + l * q4 + q5;
}

ClosedFormRho closed_form_rho(Kind kind, int lambda, double p, int p_star) {
  check_lambda(kind, lambda);
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "p must lie in [0, 1]");
  ClosedFormRho out;
  const double l = lambda;
  switch (kind) {
    case Kind::hexagonal: {
      require(!(lambda == 2 && p_star == 1), Errc::unsupported,
              "no closed form for hexagons with lambda = 2 and p_star = 1");
      const double lp = lambda / 3;
      const int r = lambda % 3;
      if (r == 0) out.rho = 4 * lp - p * p;
      else if (r == 1) out.rho = 4 * lp + 1 + p_star - p;
      else out.rho = 4 * lp + 2 + p_star;
      return out;
    }
    case Kind::square: {
      require(p_star == 0, Errc::unsupported, "no closed form for the square model with p_star = 1");
      const double q1 = -2 * p * p + 2 * p + 1;
      const double q2 = -std::pow(p, 3) + 4 * p * p - 3 * p + 1;
      const double q3 = 4 * std::pow(p, 4) - 8 * std::pow(p, 3) + 4 * p + 1;
      const double q4 = -4 * std::pow(p, 5) + 4 * std::pow(p, 4) + 22 * std::pow(p, 3) - 14 * p - 2;
      const double q5 = std::pow(p, 6) + 16 * std::pow(p, 5) - 42 * std::pow(p, 4) - 18 * std::pow(p, 3) +
                        9 * p * p + 10 * p + 1;
      out.rho = 0.5 * (l * q1 + q2 + std::sqrt(std::max(0.0, l * l * q3 + l * q4 + q5)));
      return out;
    }
    case Kind::triangular: {
      require(p_star == 0, Errc::unsupported, "triangular tessellation with p_star = 1 is not supported");
      auto m = analytic_matrix(kind, lambda, p, 0);
      out.rho = quadratic_rho(m);
      out.matrix_discriminant = discriminant(m);
      out.printed_discriminant = triangular_printed_discriminant(lambda, p);
      const double q1 = p + 1, q2 = 3 * p * p - 3 * p + 1;
      out.printed = 0.5 * (l * q1 + q2 + std::sqrt(std::max(0.0, *out.printed_discriminant)));
      return out;
    }
  }
  fail(Errc::internal, "unknown tessellation");
}

std::string matrix_json(const ReproMatrix& m) {
  nlohmann::ordered_json j;
  j["labels"] = m.labels;
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.order(); ++r) {
    std::vector<double> row(m.a.begin() + r * m.order(), m.a.begin() + (r + 1) * m.order());
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump();
}

}  // namespace fractile
