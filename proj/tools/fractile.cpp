// Command-line driver over the C interface.
//
// Exit codes: 0 success, 1 acceptance flags raised (0 with --report-only),
// 2 usage or configuration error, 3 module error, 4 file error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fractile/fractile.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFlags = 1, kUsage = 2, kModule = 3, kIo = 4 };

struct Failure {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw Failure{code, msg}; }

void check(fractile_status s, const std::string& what) {
  if (s == FRACTILE_OK) return;
  const int code = s == FRACTILE_IO ? kIo : (s == FRACTILE_INVALID_ARGUMENT ? kUsage : kModule);
  fail(code, what + ": " + fractile_status_string(s) + ": " + fractile_last_error());
}

// Takes ownership of a string handed out by the library.
std::string take(char* p) {
  std::string s = p ? p : "";
  fractile_free(p);
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(kIo, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) fail(kIo, "write failed for " + path.string());
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) fail(kIo, "cannot create " + p.parent_path().string() + ": " + ec.message());
  }
  write_file(p, text);
}

// Config lookups: a command section overrides the top level.
struct Config {
  json top = json::object();
  std::string section;

  const json* find(const std::string& key) const {
    if (top.contains(section) && top[section].is_object() && top[section].contains(key)) return &top[section][key];
    if (top.contains(key)) return &top[key];
    return nullptr;
  }

  template <class T>
  T pick(const CLI::Option* flag, const T& flag_value, const std::string& key, const T& def) const {
    if (flag && flag->count() > 0) return flag_value;
    if (const json* v = find(key)) {
      try {
        return v->get<T>();
      } catch (const std::exception& e) {
        fail(kUsage, "config key '" + key + "': " + e.what());
      }
    }
    return def;
  }
};

Config load_config(const std::string& path, const std::string& section) {
  Config c;
  c.section = section;
  if (path.empty()) return c;
  std::ifstream is(path);
  if (!is) fail(kIo, "cannot read config file " + path);
  try {
    c.top = json::parse(is);
  } catch (const std::exception& e) {
    fail(kUsage, "config file " + path + ": " + e.what());
  }
  if (!c.top.is_object()) fail(kUsage, "config file " + path + " must hold a JSON object");
  return c;
}

int default_threads() {
  if (const char* env = std::getenv("FRACTILE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_header_block(const std::string& command, const json& config) {
  return "# fractile " + command + " " + fractile_version() + "\n# config: " + config.dump() + "\n";
}

// Options shared by the commands that take growth parameters.
struct ModelOpts {
  std::string kind = "square";
  int lambda = 4;
  double p = 0.5;
  int p_star = 0;
  std::uint64_t seed = 1;
  CLI::Option *o_kind = nullptr, *o_lambda = nullptr, *o_p = nullptr, *o_pstar = nullptr, *o_seed = nullptr;

  void add(CLI::App* app) {
    o_kind = app->add_option("--kind", kind, "hexagonal, square or triangular");
    o_lambda = app->add_option("--lambda", lambda, "scale factor");
    o_p = app->add_option("--p", p, "probability away from edge ends");
    o_pstar = app->add_option("--pstar", p_star, "0 or 1: tiles holding an edge end");
    o_seed = app->add_option("--seed", seed, "random seed");
  }

  fractile_params resolve(const Config& c, json& echo) const {
    fractile_params fp{};
    const auto k = c.pick<std::string>(o_kind, kind, "kind", "square");
    check(fractile_parse_kind(k.c_str(), &fp.kind), "--kind");
    fp.lambda = c.pick<int>(o_lambda, lambda, "lambda", 4);
    fp.p = c.pick<double>(o_p, p, "p", 0.5);
    fp.p_star = c.pick<int>(o_pstar, p_star, "p_star", 0);
    fp.seed = c.pick<std::uint64_t>(o_seed, seed, "seed", 1);
    echo["kind"] = k;
    echo["lambda"] = fp.lambda;
    echo["p"] = fp.p;
    echo["p_star"] = fp.p_star;
    echo["seed"] = fp.seed;
    return fp;
  }
};

struct Global {
  std::string config_path;
  int threads = 1;
  CLI::Option* o_threads = nullptr;
  bool report_only = false;
};

int flags_exit(const json& report, const Global& g) {
  if (!report.contains("flags") || report["flags"].empty()) return kOk;
  for (const auto& f : report["flags"])
    std::cerr << "flag: " << f["code"].get<std::string>() << ": " << f["message"].get<std::string>() << "\n";
  return g.report_only ? kOk : kFlags;
}

// ---- simulate ----

struct SimulateOpts {
  ModelOpts model;
  int n = 5;
  std::string out_dir = "out";
  bool svg = true, no_svg = false, holes = true, no_holes = false;
  CLI::Option *o_n = nullptr, *o_out = nullptr, *o_no_svg = nullptr, *o_no_holes = nullptr;
};

struct Growth {
  fractile_growth* g = nullptr;
  ~Growth() { fractile_growth_destroy(g); }
};

int run_simulate(const SimulateOpts& o, const Global& gl) {
  const Config c = load_config(gl.config_path, "simulate");
  json echo;
  echo["command"] = "simulate";
  const fractile_params fp = o.model.resolve(c, echo);
  const int n = c.pick<int>(o.o_n, o.n, "generations", 5);
  const std::string out = c.pick<std::string>(o.o_out, o.out_dir, "out", "out");
  const bool svg = o.o_no_svg->count() ? false : c.pick<bool>(nullptr, true, "svg", true);
  const bool holes = o.o_no_holes->count() ? false : c.pick<bool>(nullptr, true, "holes", true);
  const std::string style = c.find("style") ? c.find("style")->dump() : std::string();
  if (n < 0) fail(kUsage, "--n must be non-negative");
  echo["generations"] = n;
  echo["out"] = out;
  echo["svg"] = svg;
  echo["holes"] = holes;
  if (!style.empty()) echo["style"] = json::parse(style);

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(kIo, "cannot create " + out + ": " + ec.message());

  Growth g;
  check(fractile_growth_create(&fp, &g.g), "simulate");
  // One extra level so the area added after the last generation is known.
  check(fractile_growth_step(g.g, n + 1), "simulate");

  std::vector<json> stats;
  std::set<std::string> type_names;
  for (int m = 0; m <= n; ++m) {
    char* s = nullptr;
    check(fractile_growth_stats_json(g.g, m, holes ? 1 : 0, &s), "stats at level " + std::to_string(m));
    stats.push_back(json::parse(take(s)));
    for (auto& [k, v] : stats.back()["frontier_counts"].items()) type_names.insert(k);

    char* snap = nullptr;
    check(fractile_growth_snapshot_json(g.g, m, &snap), "snapshot at level " + std::to_string(m));
    json doc;
    doc["config"] = echo;
    doc["snapshot"] = json::parse(take(snap));
    write_file(fs::path(out) / ("snapshot_" + std::to_string(m) + ".json"), doc.dump() + "\n");

    if (svg) {
      char* text = nullptr;
      check(fractile_growth_svg(g.g, m, 1, style.empty() ? nullptr : style.c_str(), &text),
            "render at level " + std::to_string(m));
      write_file(fs::path(out) / ("level_" + std::to_string(m) + ".svg"), take(text));
    }
  }

  std::ostringstream csv;
  csv << csv_header_block("simulate", echo) << "n,frontier_total";
  for (const auto& t : type_names) csv << ",count_" << t;
  csv << ",perimeter,added_area,holes\n";
  for (const auto& s : stats) {
    csv << s["n"].get<int>() << ',' << s["frontier_total"].get<std::uint64_t>();
    for (const auto& t : type_names)
      csv << ',' << (s["frontier_counts"].contains(t) ? s["frontier_counts"][t].get<std::uint64_t>() : 0);
    csv << ',' << fmt_double(s["perimeter"].get<double>()) << ','
        << (s["added_area"].is_null() ? std::string() : fmt_double(s["added_area"].get<double>())) << ','
        << (s["holes"].is_null() ? std::string() : std::to_string(s["holes"].get<std::int64_t>())) << '\n';
  }
  write_file(fs::path(out) / "stats.csv", csv.str());
  std::cerr << "wrote " << (n + 1) << " levels to " << out << "\n";
  return kOk;
}

// ---- matrix ----

struct MatrixOpts {
  ModelOpts model;
  std::uint64_t samples = 0;
  std::string out;
  CLI::Option *o_samples = nullptr, *o_out = nullptr;
};

int run_matrix(const MatrixOpts& o, const Global& gl) {
  const Config c = load_config(gl.config_path, "matrix");
  json echo;
  echo["command"] = "matrix";
  const fractile_params fp = o.model.resolve(c, echo);
  const auto samples = c.pick<std::uint64_t>(o.o_samples, o.samples, "samples", 0);
  const int threads = c.pick<int>(gl.o_threads, gl.threads, "threads", default_threads());
  const std::string out = c.pick<std::string>(o.o_out, o.out, "out", "");
  echo["samples"] = samples;
  echo["threads"] = threads;

  char* s = nullptr;
  check(fractile_matrix_report(&fp, samples, threads, &s), "matrix");
  json rep = json::parse(take(s));
  json doc;
  doc["config"] = echo;
  for (auto& [k, v] : rep.items())
    if (k != "config") doc[k] = v;
  emit(out, doc.dump(2) + "\n");
  return flags_exit(doc, gl);
}

// ---- dim-sweep ----

struct SweepOpts {
  ModelOpts model;
  std::vector<double> grid;
  int generations = 8, replicates = 20, n_min = 3;
  std::string out;
  CLI::Option *o_grid = nullptr, *o_gen = nullptr, *o_rep = nullptr, *o_nmin = nullptr, *o_out = nullptr;
};

int run_sweep(const SweepOpts& o, const Global& gl) {
  const Config c = load_config(gl.config_path, "dim-sweep");
  json echo;
  echo["command"] = "dim-sweep";
  const fractile_params fp = o.model.resolve(c, echo);
  const std::vector<double> def_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const auto grid = c.pick<std::vector<double>>(o.o_grid, o.grid, "p_grid", def_grid);
  const int gens = c.pick<int>(o.o_gen, o.generations, "generations", 8);
  const int reps = c.pick<int>(o.o_rep, o.replicates, "replicates", 20);
  const int n_min = c.pick<int>(o.o_nmin, o.n_min, "n_min", 3);
  const int threads = c.pick<int>(gl.o_threads, gl.threads, "threads", default_threads());
  const std::string out = c.pick<std::string>(o.o_out, o.out, "out", "");
  if (grid.empty()) fail(kUsage, "p grid is empty");
  echo.erase("p");
  echo["p_grid"] = grid;
  echo["generations"] = gens;
  echo["replicates"] = reps;
  echo["n_min"] = n_min;
  echo["threads"] = threads;

  char* s = nullptr;
  check(fractile_dimension_sweep(&fp, grid.data(), grid.size(), gens, reps, n_min, threads, &s), "dim-sweep");
  const json rep = json::parse(take(s));
  std::ostringstream csv;
  csv << csv_header_block("dim-sweep", echo) << "p,d_theoretical,d_numerical_median,d_numerical_iqr,fit_residual,error\n";
  bool errors = false;
  for (const auto& row : rep["rows"]) {
    csv << fmt_double(row["p"].get<double>()) << ',';
    if (row.contains("error")) {
      errors = true;
      std::string msg = row["error"]["message"].get<std::string>();
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      csv << ",,,," << msg << '\n';
      std::cerr << "p = " << fmt_double(row["p"].get<double>()) << ": " << row["error"]["message"].get<std::string>()
                << "\n";
      continue;
    }
    csv << fmt_double(row["d_theoretical"].get<double>()) << ',' << fmt_double(row["d_numerical_median"].get<double>())
        << ',' << fmt_double(row["d_numerical_iqr"].get<double>()) << ','
        << fmt_double(row["fit_residual"].get<double>()) << ",\n";
  }
  emit(out, csv.str());
  return errors ? kModule : kOk;
}

// ---- vonkoch ----

struct KochOpts {
  std::string pattern;
  bool random = false;
  int lambda = 3;
  double p = 0.5;
  int levels = 3;
  std::uint64_t samples = 20000, seed = 1;
  std::string format = "json", out;
  CLI::Option *o_pattern = nullptr, *o_random = nullptr, *o_lambda = nullptr, *o_p = nullptr, *o_levels = nullptr,
              *o_samples = nullptr, *o_seed = nullptr, *o_format = nullptr, *o_out = nullptr;
};

int run_vonkoch(const KochOpts& o, const Global& gl) {
  const Config c = load_config(gl.config_path, "vonkoch");
  json echo;
  echo["command"] = "vonkoch";
  const auto pattern = c.pick<std::string>(o.o_pattern, o.pattern, "pattern", "");
  const bool random = o.o_random->count() ? true : c.pick<bool>(nullptr, false, "random", false);
  const int lambda = c.pick<int>(o.o_lambda, o.lambda, "lambda", pattern.empty() ? 3 : 0);
  const double p = c.pick<double>(o.o_p, o.p, "p", 0.5);
  const int levels = c.pick<int>(o.o_levels, o.levels, "levels", 3);
  const auto samples = c.pick<std::uint64_t>(o.o_samples, o.samples, "samples", 20000);
  const auto seed = c.pick<std::uint64_t>(o.o_seed, o.seed, "seed", 1);
  const auto format = c.pick<std::string>(o.o_format, o.format, "format", "json");
  const int threads = c.pick<int>(gl.o_threads, gl.threads, "threads", default_threads());
  const std::string out = c.pick<std::string>(o.o_out, o.out, "out", "");
  if (random == !pattern.empty()) fail(kUsage, "vonkoch needs exactly one of --pattern and --random");
  if (format != "json" && format != "csv") fail(kUsage, "--format must be json or csv");

  char* s = nullptr;
  if (random) {
    echo.update({{"model", "random"}, {"lambda", lambda}, {"p", p}, {"samples", samples}, {"seed", seed},
                 {"threads", threads}});
    check(fractile_vonkoch_random(lambda, p, samples, seed, threads, &s), "vonkoch");
  } else {
    echo.update({{"model", "pattern"}, {"pattern", pattern}, {"lambda", lambda}, {"levels", levels}});
    check(fractile_vonkoch_pattern(pattern.c_str(), lambda, levels, &s), "vonkoch");
  }
  echo["format"] = format;
  const json rep = json::parse(take(s));
  json doc;
  doc["config"] = echo;
  for (auto& [k, v] : rep.items())
    if (k != "config") doc[k] = v;

  if (format == "json") {
    emit(out, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << csv_header_block("vonkoch", echo);
    if (random) {
      csv << "lambda,p,rho,dimension,empirical_mean,empirical_stderr\n"
          << lambda << ',' << fmt_double(p) << ',' << fmt_double(doc["rho"].get<double>()) << ','
          << fmt_double(doc["dimension"].get<double>()) << ',';
      if (doc.contains("empirical"))
        csv << fmt_double(doc["empirical"]["mean_children_per_edge"].get<double>()) << ','
            << fmt_double(doc["empirical"]["stderr"].get<double>());
      else
        csv << ',';
      csv << '\n';
    } else {
      csv << "n,perimeter,added_area,boundary_edges,added_tiles,geometric_boundary_edges,geometric_added_tiles\n";
      for (const auto& r : doc["closed_form"]) {
        const int n = r["n"].get<int>();
        csv << n << ',' << fmt_double(r["perimeter"].get<double>()) << ',' << fmt_double(r["added_area"].get<double>())
            << ',' << r["boundary_edges"].get<std::uint64_t>() << ',' << r["added_tiles"].get<std::uint64_t>() << ',';
        if (doc.contains("geometric") && n < static_cast<int>(doc["geometric"].size())) {
          const auto& g = doc["geometric"][n];
          csv << g["boundary_edges"].get<std::uint64_t>() << ',';
          if (g.contains("added_tiles")) csv << g["added_tiles"].get<std::uint64_t>();
        } else {
          csv << ',';
        }
        csv << '\n';
      }
    }
    emit(out, csv.str());
  }
  return flags_exit(doc, gl);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random fractal growth on regular tessellations"};
  app.require_subcommand(1);
  Global gl;
  gl.threads = default_threads();
  app.add_option("--config", gl.config_path, "JSON config file (flags override it)");
  gl.o_threads = app.add_option("--threads", gl.threads, "worker threads (default: FRACTILE_THREADS or 1)");
  app.add_flag("--report-only", gl.report_only, "report acceptance flags without failing");
  app.set_version_flag("--version", std::string(fractile_version()));

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "grow a region and write snapshots, SVGs and stats.csv")->fallthrough();
  sim.model.add(c_sim);
  sim.o_n = c_sim->add_option("--n", sim.n, "generations");
  sim.o_out = c_sim->add_option("--out", sim.out_dir, "output directory");
  sim.o_no_svg = c_sim->add_flag("--no-svg", sim.no_svg, "skip the SVG files");
  sim.o_no_holes = c_sim->add_flag("--no-holes", sim.no_holes, "skip hole counting");

  MatrixOpts mat;
  auto* c_mat = app.add_subcommand("matrix", "reproduction matrix report (JSON)")->fallthrough();
  mat.model.add(c_mat);
  mat.o_samples = c_mat->add_option("--samples", mat.samples, "offspring samples per type (0: analytic only)");
  mat.o_out = c_mat->add_option("--out", mat.out, "output file (default stdout)");

  SweepOpts sw;
  auto* c_sw = app.add_subcommand("dim-sweep", "theoretical and numerical dimension over a p grid (CSV)")->fallthrough();
  sw.model.add(c_sw);
  sw.o_grid = c_sw->add_option("--grid", sw.grid, "p values (comma separated)")->delimiter(',');
  sw.o_gen = c_sw->add_option("--generations", sw.generations, "generations per replicate");
  sw.o_rep = c_sw->add_option("--replicates", sw.replicates, "replicates per p");
  sw.o_nmin = c_sw->add_option("--n-min", sw.n_min, "first level of the slope fit");
  sw.o_out = c_sw->add_option("--out", sw.out, "output file (default stdout)");

  KochOpts ko;
  auto* c_ko = app.add_subcommand("vonkoch", "von Koch models: deterministic pattern or random")->fallthrough();
  ko.o_pattern = c_ko->add_option("--pattern", ko.pattern, "bit literal such as 10011");
  ko.o_random = c_ko->add_flag("--random", ko.random, "random model on triangles");
  ko.o_lambda = c_ko->add_option("--lambda", ko.lambda, "scale factor (pattern: inferred from the literal)");
  ko.o_p = c_ko->add_option("--p", ko.p, "probability (random model)");
  ko.o_levels = c_ko->add_option("--levels", ko.levels, "geometric levels to cross-check (pattern model)");
  ko.o_samples = c_ko->add_option("--samples", ko.samples, "one-step samples (random model)");
  ko.o_seed = c_ko->add_option("--seed", ko.seed, "random seed");
  ko.o_format = c_ko->add_option("--format", ko.format, "json or csv");
  ko.o_out = c_ko->add_option("--out", ko.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gl.threads <= 0) fail(kUsage, "--threads must be positive");
    if (*c_sim) return run_simulate(sim, gl);
    if (*c_mat) return run_matrix(mat, gl);
    if (*c_sw) return run_sweep(sw, gl);
    if (*c_ko) return run_vonkoch(ko, gl);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModule;
  }
  return kUsage;
}
