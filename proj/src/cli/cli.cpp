#include "eik/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "eik/fixtures.hpp"
#include "eik/perturb.hpp"
#include "eik/pgm.hpp"
#include "eik/plan.hpp"
#include "eik/sfs.hpp"
#include "eik/sparse.hpp"
#include "eik/sweep.hpp"

namespace eik::cli {

namespace fs = std::filesystem;
using io::format_double;

namespace {

struct UsageError : Error {
  using Error::Error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool contains(const std::vector<std::string>& names, const std::string& s) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

struct Point {
  double a = 0.0, b = 0.0;
  std::optional<double> h;
};

Point parse_point(const std::string& text, const std::string& flag, bool allow_height) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(flag + ": cannot parse '" + text + "'");
    }
  }
  if (v.size() == 2) return {v[0], v[1], std::nullopt};
  if (v.size() == 3 && allow_height) return {v[0], v[1], v[2]};
  throw UsageError(flag + ": expected " + (allow_height ? "x,y or x,y,h" : "two numbers") +
                   ", got '" + text + "'");
}

std::string format_point(const Point& p) {
  std::string s = format_double(p.a) + "," + format_double(p.b);
  if (p.h) s += "," + format_double(*p.h);
  return s;
}

SourceSet points_to_sources(const GridSpec& grid, const std::vector<Point>& pts,
                            const std::string& flag) {
  std::vector<std::array<double, 2>> xy;
  std::vector<double> h;
  for (const Point& p : pts) {
    xy.push_back({p.a, p.b});
    if (p.h) h.push_back(*p.h);
  }
  if (!h.empty() && h.size() != pts.size())
    throw UsageError(flag + ": give a height for every point or for none");
  SourceSet s;
  try {
    for (const auto& q : xy) {
      for (int a = 0; a < 2; ++a) {
        const double lo = grid.origin(a) - 0.5 * grid.spacing(a);
        const double hi = grid.origin(a) + (static_cast<double>(grid.dim(a)) - 0.5) * grid.spacing(a);
        if (q[a] < lo || q[a] > hi)
          throw UsageError(flag + ": point " + format_double(q[0]) + "," + format_double(q[1]) +
                           " lies outside the grid");
      }
    }
    s = SourceSet::from_world(grid, xy, h);
    s.validate(grid);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
  return s;
}

ConvMode parse_conv(const std::string& s) {
  if (s == "linear") return ConvMode::zero_padded_linear;
  if (s == "circular") return ConvMode::circular;
  if (s == "direct") return ConvMode::direct;
  throw UsageError("--conv: expected linear, circular or direct, got '" + s + "'");
}

std::string conv_name(ConvMode m) {
  switch (m) {
    case ConvMode::zero_padded_linear: return "linear";
    case ConvMode::circular: return "circular";
    case ConvMode::direct: return "direct";
  }
  return "linear";
}

OriginRegularization parse_origin(const std::string& s) {
  if (s == "half-cell") return OriginRegularization::half_cell();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return OriginRegularization::finite_cap(v);
  } catch (const std::invalid_argument&) {
  } catch (const Error& e) {
    throw UsageError(std::string("--origin-reg: ") + e.what());
  }
  throw UsageError("--origin-reg: expected half-cell or a number, got '" + s + "'");
}

LinearSolver parse_solver(const std::string& s) {
  if (s == "direct") return LinearSolver::direct;
  if (s == "cg") return LinearSolver::cg;
  throw UsageError("--solver: expected direct or cg, got '" + s + "'");
}

StencilForm parse_form(const std::string& s) {
  if (s == "consistent") return StencilForm::consistent;
  if (s == "unscaled") return StencilForm::unscaled;
  throw UsageError("--stencil: expected consistent or unscaled, got '" + s + "'");
}

void check_out_dir(const fs::path& dir) {
  if (fs::exists(dir) && !fs::is_directory(dir))
    throw UsageError("--out-dir: '" + dir.string() + "' exists and is not a directory");
}

std::string absolute_if_file(const std::string& s) {
  return fs::exists(s) ? fs::absolute(s).lexically_normal().string() : s;
}

// Resolved arguments for the manifest, in a fixed order.
struct Canon {
  std::vector<std::string> args;
  io::KeyValues params;

  void positional(const std::string& name, const std::string& v) {
    args.push_back(v);
    params.emplace_back(name, v);
  }
  void flag(const std::string& name, const std::string& v) {
    args.push_back("--" + name);
    args.push_back(v);
    params.emplace_back(name, v);
  }
  void flag(const std::string& name, double v) { flag(name, format_double(v)); }
  void flag(const std::string& name, long long v) { flag(name, std::to_string(v)); }
};

void write_outputs(const fs::path& dir, const std::string& command, const Canon& canon,
                   io::KeyValues timings) {
  RunManifest m;
  m.command = command;
  m.args = canon.args;
  m.params = canon.params;
  m.timings = std::move(timings);
  io::write_key_values(dir / "manifest.txt", m.to_key_values());
}

void solver_warnings(const SolveReport& r, std::ostream& err) {
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string field;
  std::vector<std::string> sources;
  std::string backend = "perturb";
  double hbar = 0.01;
  int terms = 6;
  double ftilde = 0.0;
  double tau = 1.0;
  std::string conv = "linear";
  std::string origin_reg = "half-cell";
  int sweeps = 15;
  double tol = 1e-10;
  std::size_t max_iter = 200000;
  std::string solver = "direct";
  std::string stencil = "consistent";
  std::string reference;
  int threads = 1;
  std::string out_dir = ".";
};

void add_solver_flags(CLI::App* sc, SolveArgs& a) {
  sc->add_option("--backend", a.backend, "perturb, sparse or sweep")->capture_default_str();
  sc->add_option("--hbar", a.hbar, "Planck parameter (default: fixture value, else 0.01)");
  sc->add_option("--terms", a.terms, "Perturbation terms T (default: fixture value, else 6)");
  sc->add_option("--ftilde", a.ftilde, "Reference forcing (default: optimal)");
  sc->add_option("--tau", a.tau, "Grid scale-down factor (default: fixture value, else 1)");
  sc->add_option("--conv", a.conv, "linear, circular or direct (default: fixture value, else linear)");
  sc->add_option("--origin-reg", a.origin_reg, "half-cell or a finite kernel cap")
      ->capture_default_str();
  sc->add_option("--sweeps", a.sweeps, "Fast sweeping passes")->capture_default_str();
  sc->add_option("--tol", a.tol, "CG tolerance (sparse) or convergence tolerance (sweep)");
  sc->add_option("--max-iter", a.max_iter, "CG iteration cap")->capture_default_str();
  sc->add_option("--solver", a.solver, "direct or cg")->capture_default_str();
  sc->add_option("--stencil", a.stencil, "consistent or unscaled")->capture_default_str();
  sc->add_option("--threads", a.threads, "Threads for direct convolution")->capture_default_str();
  sc->add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str();
}

struct Resolved {
  SolveReport report;
  double solve_s = 0.0;
};

SolveReport run_backend(const std::string& backend, const ScalarField& f, const SourceSet& src,
                        const PerturbConfig& pc, const SparseOptions& so, const SweepConfig& sw) {
  if (backend == "perturb") return scaled_solve(f, src, pc);
  if (backend == "sparse") return sparse_eikonal(f, src, pc.hbar, so);
  SolveReport r;
  r.backend = "sweep";
  r.S_star = sweep_solve(f, src, sw);
  r.viscosity_residual_rms = viscosity_residual_rms(r.S_star, f, 0.0, src);
  return r;
}

int cmd_solve(const SolveArgs& a, const CLI::App& sc, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  if (a.field.empty()) throw UsageError("--f: a field file or fixture name is required");
  if (!contains({"perturb", "sparse", "sweep"}, a.backend))
    throw UsageError("--backend: expected perturb, sparse or sweep, got '" + a.backend + "'");

  ScalarField f;
  SourceSet src;
  std::optional<ScalarField> reference;
  std::optional<fixtures::EikonalFixture> fx;
  std::string field_arg = a.field;
  if (fs::exists(a.field)) {
    try {
      f = io::read_eikf(fs::path(a.field));
    } catch (const Error& e) {
      throw UsageError("--f: " + std::string(e.what()));
    }
    field_arg = absolute_if_file(a.field);
  } else if (contains(fixtures::eikonal_fixture_names(), a.field)) {
    fx = fixtures::eikonal_fixture(a.field);
    f = fx->f;
    reference = fx->exact;
  } else {
    throw UsageError("--f: no such file or fixture '" + a.field + "'");
  }
  if (f.grid().ndims() != 2) throw UsageError("--f: solve needs a 2D field");

  std::vector<Point> pts;
  for (const auto& s : a.sources) pts.push_back(parse_point(s, "--source", true));
  if (!pts.empty())
    src = points_to_sources(f.grid(), pts, "--source");
  else if (fx)
    src = fx->sources;
  else
    throw UsageError("--source: at least one source is required");

  std::string ref_arg;
  if (!a.reference.empty()) {
    if (!fs::exists(a.reference))
      throw UsageError("--reference: no such file '" + a.reference + "'");
    try {
      reference = io::read_eikf(fs::path(a.reference));
    } catch (const Error& e) {
      throw UsageError("--reference: " + std::string(e.what()));
    }
    if (!(reference->grid() == f.grid()))
      throw UsageError("--reference: grid differs from the forcing grid");
    ref_arg = absolute_if_file(a.reference);
  }

  auto given = [&](const char* name) { return sc.get_option(name)->count() > 0; };
  PerturbConfig pc;
  pc.hbar = given("--hbar") ? a.hbar : fx ? fx->hbar : a.hbar;
  pc.terms = given("--terms") ? a.terms : fx ? fx->terms : a.terms;
  pc.tau = given("--tau") ? a.tau : fx ? fx->tau : a.tau;
  if (given("--ftilde")) pc.ftilde = a.ftilde;
  pc.conv.mode = given("--conv") ? parse_conv(a.conv) : fx ? fx->conv : parse_conv(a.conv);
  pc.conv.origin = parse_origin(a.origin_reg);
  pc.conv.threads = a.threads;
  SparseOptions so;
  so.tol = a.tol;
  so.max_iter = a.max_iter;
  so.solver = parse_solver(a.solver);
  so.form = parse_form(a.stencil);
  SweepConfig sw;
  sw.sweeps = given("--sweeps") ? a.sweeps : fx ? fx->sweeps : a.sweeps;
  sw.convergence_tol = given("--tol") ? a.tol : 0.0;
  try {
    pc.validate();
    if (!(pc.hbar > 0.0)) throw Error("hbar must be positive");
    if (sw.sweeps < 1) throw Error("sweeps must be at least 1");
    if (a.threads < 1) throw Error("threads must be at least 1");
    require_positive_forcing(f);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  check_out_dir(a.out_dir);

  Canon c;
  c.flag("f", field_arg);
  for (const Point& p : pts) c.flag("source", format_point(p));
  c.flag("backend", a.backend);
  if (a.backend != "sweep") c.flag("hbar", pc.hbar);
  if (a.backend == "perturb") {
    c.flag("terms", static_cast<long long>(pc.terms));
    if (pc.ftilde) c.flag("ftilde", *pc.ftilde);
    c.flag("tau", pc.tau);
    c.flag("conv", conv_name(pc.conv.mode));
    c.flag("origin-reg", a.origin_reg);
  } else if (a.backend == "sparse") {
    c.flag("solver", a.solver);
    c.flag("stencil", a.stencil);
    c.flag("tol", so.tol);
    c.flag("max-iter", static_cast<long long>(so.max_iter));
  } else {
    c.flag("sweeps", static_cast<long long>(sw.sweeps));
    if (given("--tol")) c.flag("tol", sw.convergence_tol);
  }
  if (!ref_arg.empty()) c.flag("reference", ref_arg);
  c.flag("threads", static_cast<long long>(a.threads));
  const double setup_s = seconds_since(t0);

  const auto t1 = Clock::now();
  SolveReport r;
  try {
    r = run_backend(a.backend, f, src, pc, so, sw);
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return solver_failure;
  }
  const double solve_s = seconds_since(t1);
  solver_warnings(r, err);

  io::KeyValues kv = to_key_values(r);
  if (reference) {
    const PercentError pe = percent_error(r.S_star, *reference, src);
    kv.emplace_back("percent_error", format_double(pe.percent));
    kv.emplace_back("max_abs_diff", format_double(pe.max_abs_diff));
    char line[96];
    std::snprintf(line, sizeof line, "percent_error %.6f max_abs_diff %.6f\n", pe.percent,
                  pe.max_abs_diff);
    out << line;
  }
  fs::create_directories(a.out_dir);
  io::write_eikf(fs::path(a.out_dir) / "S.eikf", r.S_star);
  io::write_key_values(fs::path(a.out_dir) / "report.txt", kv);
  write_outputs(a.out_dir, "solve", c,
                {{"setup_s", format_double(setup_s)}, {"solve_s", format_double(solve_s)}});
  return ok;
}

// -------------------------------------------------------------- compare

struct CompareArgs {
  std::string a, b;
  std::vector<std::string> sources;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  ScalarField fa, fb;
  for (auto [path, field, flag] : {std::tuple{&a.a, &fa, "FIELD_A"}, std::tuple{&a.b, &fb, "FIELD_B"}}) {
    if (!fs::exists(*path)) throw UsageError(std::string(flag) + ": no such file '" + *path + "'");
    try {
      *field = io::read_eikf(fs::path(*path));
    } catch (const Error& e) {
      throw UsageError(std::string(flag) + ": " + e.what());
    }
  }
  if (!(fa.grid() == fb.grid())) throw UsageError("compare: the two fields are on different grids");
  std::vector<Point> pts;
  for (const auto& s : a.sources) pts.push_back(parse_point(s, "--source", false));
  const SourceSet src = pts.empty() ? SourceSet() : points_to_sources(fa.grid(), pts, "--source");
  PercentError pe;
  try {
    pe = percent_error(fa, fb, src);
  } catch (const Error& e) {
    throw UsageError(std::string("compare: ") + e.what());
  }
  char line[64];
  std::snprintf(line, sizeof line, "%.6f %.6f\n", pe.percent, pe.max_abs_diff);
  out << line;
  return ok;
}

// ----------------------------------------------------------------- plan

struct PlanArgs {
  std::string maze;
  std::string fixture;
  std::size_t size = 450;
  std::string source;
  std::vector<std::string> starts;
  std::string backend = "sparse";
  double hbar = 1.0;
  double lo = 1.0, hi = 1000.0;
  int threshold = 128;
  double step = 0.5;
  std::size_t max_steps = 100000;
  std::string solver = "direct";
  int terms = 6;
  int sweeps = 15;
  std::string out_dir = ".";
};

Index parse_pixel(const std::string& s, const GrayImage& img, const std::string& flag) {
  const Point p = parse_point(s, flag, false);
  if (p.a < 0 || p.b < 0 || p.a != std::floor(p.a) || p.b != std::floor(p.b))
    throw UsageError(flag + ": expected row,col pixel indices, got '" + s + "'");
  const Index ix{static_cast<std::size_t>(p.a), static_cast<std::size_t>(p.b)};
  if (ix.i >= img.height || ix.j >= img.width)
    throw UsageError(flag + ": pixel '" + s + "' lies outside the image");
  return ix;
}

std::string format_pixel(Index ix) { return std::to_string(ix.i) + "," + std::to_string(ix.j); }

int cmd_plan(const PlanArgs& a, const CLI::App& sc, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  if (a.maze.empty() == a.fixture.empty())
    throw UsageError("--maze: give exactly one of --maze or --fixture");
  if (!contains({"perturb", "sparse", "sweep"}, a.backend))
    throw UsageError("--backend: expected perturb, sparse or sweep, got '" + a.backend + "'");
  auto given = [&](const char* name) { return sc.get_option(name)->count() > 0; };

  GrayImage img;
  std::optional<fixtures::MazeFixture> mz;
  std::string maze_arg;
  if (!a.maze.empty()) {
    if (!fs::exists(a.maze)) throw UsageError("--maze: no such file '" + a.maze + "'");
    try {
      img = read_pgm(fs::path(a.maze));
    } catch (const Error& e) {
      throw UsageError("--maze: " + std::string(e.what()));
    }
    maze_arg = absolute_if_file(a.maze);
  } else {
    if (a.fixture != "spiral-maze")
      throw UsageError("--fixture: plan knows only 'spiral-maze', got '" + a.fixture + "'");
    try {
      mz = fixtures::spiral_maze(a.size);
    } catch (const Error& e) {
      throw UsageError("--size: " + std::string(e.what()));
    }
    img = mz->image;
  }

  Index source;
  if (!a.source.empty())
    source = parse_pixel(a.source, img, "--source");
  else if (mz)
    source = mz->source;
  else
    throw UsageError("--source: a source pixel is required");
  std::vector<Index> starts;
  for (const auto& s : a.starts) starts.push_back(parse_pixel(s, img, "--start"));
  if (starts.empty() && mz) starts = mz->starts;
  if (starts.empty()) throw UsageError("--start: at least one start pixel is required");

  MazeCost cost;
  try {
    cost = maze_to_forcing(img, a.lo, a.hi, a.threshold);
  } catch (const Error& e) {
    throw UsageError("--maze: " + std::string(e.what()));
  }
  if (cost.field.at(source) != a.lo) throw UsageError("--source: pixel lies on an obstacle");
  for (const Index& s : starts)
    if (cost.field.at(s) != a.lo)
      throw UsageError("--start: pixel " + format_pixel(s) + " lies on an obstacle");
  const double hbar = given("--hbar") ? a.hbar : mz ? mz->hbar : a.hbar;
  if (!(hbar > 0.0)) throw UsageError("--hbar: must be positive");
  if (!(a.step > 0.0)) throw UsageError("--step: must be positive");
  check_out_dir(a.out_dir);

  Canon c;
  if (mz) {
    c.flag("fixture", a.fixture);
    c.flag("size", static_cast<long long>(a.size));
  } else {
    c.flag("maze", maze_arg);
  }
  c.flag("source", format_pixel(source));
  for (const Index& s : starts) c.flag("start", format_pixel(s));
  c.flag("backend", a.backend);
  c.flag("hbar", hbar);
  c.flag("lo", a.lo);
  c.flag("hi", a.hi);
  c.flag("threshold", static_cast<long long>(a.threshold));
  c.flag("step", a.step);
  c.flag("max-steps", static_cast<long long>(a.max_steps));
  c.flag("solver", a.solver);
  c.flag("terms", static_cast<long long>(a.terms));
  c.flag("sweeps", static_cast<long long>(a.sweeps));
  const double setup_s = seconds_since(t0);

  const SourceSet src({source});
  PerturbConfig pc;
  pc.hbar = hbar;
  pc.terms = a.terms;
  SparseOptions so;
  so.solver = parse_solver(a.solver);
  SweepConfig sw;
  sw.sweeps = a.sweeps;
  const auto t1 = Clock::now();
  SolveReport r;
  try {
    r = run_backend(a.backend, cost.field, src, pc, so, sw);
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return solver_failure;
  }
  const double solve_s = seconds_since(t1);
  solver_warnings(r, err);

  const auto t2 = Clock::now();
  BacktrackOptions bo;
  bo.step = a.step;
  bo.max_steps = a.max_steps;
  std::vector<PathPolyline> paths;
  for (const Index& s : starts) paths.push_back(backtrack(r.S_star, cost.field.grid().world(s), src, bo));
  const double backtrack_s = seconds_since(t2);

  io::KeyValues kv = to_key_values(r);
  bool all_reached = true;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    double len = 0.0;
    for (std::size_t q = 1; q < paths[k].points.size(); ++q)
      len += std::hypot(paths[k].points[q][0] - paths[k].points[q - 1][0],
                        paths[k].points[q][1] - paths[k].points[q - 1][1]);
    const std::string p = "path." + std::to_string(k);
    kv.emplace_back(p + ".start", format_pixel(starts[k]));
    kv.emplace_back(p + ".status", to_string(paths[k].status));
    kv.emplace_back(p + ".points", std::to_string(paths[k].points.size()));
    kv.emplace_back(p + ".length", format_double(len));
    out << "path " << k << " " << to_string(paths[k].status) << " " << paths[k].points.size()
        << " points\n";
    all_reached = all_reached && paths[k].status == PathStatus::reached_source;
  }
  fs::create_directories(a.out_dir);
  io::write_eikf(fs::path(a.out_dir) / "S.eikf", r.S_star);
  for (std::size_t k = 0; k < paths.size(); ++k)
    write_path_csv(fs::path(a.out_dir) / ("path_" + std::to_string(k) + ".csv"), paths[k]);
  io::write_key_values(fs::path(a.out_dir) / "report.txt", kv);
  write_outputs(a.out_dir, "plan", c,
                {{"setup_s", format_double(setup_s)},
                 {"solve_s", format_double(solve_s)},
                 {"backtrack_s", format_double(backtrack_s)}});
  if (!all_reached) {
    err << "some start did not reach the source\n";
    return stalled;
  }
  return ok;
}

// ------------------------------------------------------------------ sfs

struct SfsArgs {
  std::string image;
  std::string fixture;
  int scale = 1;
  double spacing = 1.0;
  std::vector<std::string> seeds;
  std::string truth;
  std::string backend = "sparse";
  double hbar = 1.0;
  int terms = 6;
  double tau = 1.0;
  std::string solver = "direct";
  std::string out_dir = ".";
};

int cmd_sfs(const SfsArgs& a, const CLI::App& sc, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  if (a.image.empty() == a.fixture.empty())
    throw UsageError("--image: give exactly one of --image or --fixture");
  if (!contains({"sparse", "perturb"}, a.backend))
    throw UsageError("--backend: expected sparse or perturb, got '" + a.backend + "'");
  auto given = [&](const char* name) { return sc.get_option(name)->count() > 0; };

  std::optional<LuminanceImage> P;
  std::optional<fixtures::SfsFixture> fx;
  std::optional<ScalarField> truth;
  std::string image_arg;
  if (!a.image.empty()) {
    if (!fs::exists(a.image)) throw UsageError("--image: no such file '" + a.image + "'");
    if (!(a.spacing > 0.0)) throw UsageError("--spacing: must be positive");
    try {
      P = LuminanceImage::from_gray(read_pgm(fs::path(a.image)), a.spacing);
    } catch (const Error& e) {
      throw UsageError("--image: " + std::string(e.what()));
    }
    image_arg = absolute_if_file(a.image);
  } else {
    if (!contains(fixtures::sfs_fixture_names(), a.fixture))
      throw UsageError("--fixture: no shading fixture named '" + a.fixture + "'");
    try {
      fx = fixtures::sfs_fixture(a.fixture, a.scale);
    } catch (const Error& e) {
      throw UsageError("--scale: " + std::string(e.what()));
    }
    P = render_lambertian(fx->truth);
    truth = fx->truth;
  }
  const GridSpec& grid = P->field().grid();

  std::vector<Point> pts;
  for (const auto& s : a.seeds) pts.push_back(parse_point(s, "--seed", true));
  SourceSet seeds;
  if (!pts.empty())
    seeds = points_to_sources(grid, pts, "--seed");
  else if (fx)
    seeds = fx->seeds;
  else
    throw UsageError("--seed: at least one seed is required");

  std::string truth_arg;
  if (!a.truth.empty()) {
    if (!fs::exists(a.truth)) throw UsageError("--truth: no such file '" + a.truth + "'");
    try {
      truth = io::read_eikf(fs::path(a.truth));
    } catch (const Error& e) {
      throw UsageError("--truth: " + std::string(e.what()));
    }
    // Images carry no origin, so only the node counts have to agree.
    if (truth->grid().dim(0) != grid.dim(0) || truth->grid().dim(1) != grid.dim(1))
      throw UsageError("--truth: size differs from the image");
    truth = ScalarField(grid, std::vector<double>(truth->values().begin(), truth->values().end()));
    truth_arg = absolute_if_file(a.truth);
  }

  SfsConfig cfg;
  cfg.backend = a.backend == "sparse" ? SfsBackend::sparse : SfsBackend::perturb;
  cfg.hbar = given("--hbar") ? a.hbar : fx ? fx->hbar : a.hbar * grid.spacing(0);
  cfg.perturb.terms = a.terms;
  cfg.perturb.tau = a.tau;
  cfg.sparse.solver = parse_solver(a.solver);
  try {
    PerturbConfig check = cfg.perturb;
    check.hbar = cfg.hbar;
    check.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  check_out_dir(a.out_dir);

  Canon c;
  if (fx) {
    c.flag("fixture", a.fixture);
    c.flag("scale", static_cast<long long>(a.scale));
  } else {
    c.flag("image", image_arg);
    c.flag("spacing", a.spacing);
  }
  for (const Point& p : pts) c.flag("seed", format_point(p));
  if (!truth_arg.empty()) c.flag("truth", truth_arg);
  c.flag("backend", a.backend);
  c.flag("hbar", cfg.hbar);
  if (a.backend == "perturb") {
    c.flag("terms", static_cast<long long>(a.terms));
    c.flag("tau", a.tau);
  } else {
    c.flag("solver", a.solver);
  }
  const double setup_s = seconds_since(t0);

  const auto t1 = Clock::now();
  SfsResult res;
  try {
    res = sfs_reconstruct(*P, seeds, cfg, truth);
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return solver_failure;
  }
  const double solve_s = seconds_since(t1);
  solver_warnings(res.report, err);

  io::KeyValues kv = to_key_values(res.report);
  if (res.gradient_error) {
    kv.emplace_back("gradient_error", format_double(*res.gradient_error));
    kv.emplace_back("baseline_error", format_double(*res.baseline_error));
    char line[96];
    std::snprintf(line, sizeof line, "gradient_error %.6f baseline_error %.6f\n",
                  *res.gradient_error, *res.baseline_error);
    out << line;
  }
  fs::create_directories(a.out_dir);
  io::write_eikf(fs::path(a.out_dir) / "height.eikf", res.report.S_star);
  io::write_key_values(fs::path(a.out_dir) / "report.txt", kv);
  write_outputs(a.out_dir, "sfs", c,
                {{"setup_s", format_double(setup_s)}, {"solve_s", format_double(solve_s)}});
  return ok;
}

// -------------------------------------------------------------- fixture

struct FixtureArgs {
  std::string name;
  int scale = 1;
  std::size_t size = 450;
  std::string out_dir = ".";
};

void write_points(const fs::path& file, const GridSpec& g, const SourceSet& s) {
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto w = g.world(s.points()[k]);
    os << format_double(w[0]) << "," << format_double(w[1]);
    if (!s.boundary_values().empty()) os << "," << format_double(s.boundary_values()[k]);
    os << "\n";
  }
}

int cmd_fixture(const FixtureArgs& a, std::ostream& out) {
  check_out_dir(a.out_dir);
  const fs::path dir(a.out_dir);
  Canon c;
  c.positional("name", a.name);
  if (contains(fixtures::eikonal_fixture_names(), a.name)) {
    const auto fx = fixtures::eikonal_fixture(a.name);
    fs::create_directories(dir);
    io::write_eikf(dir / "f.eikf", fx.f);
    if (fx.exact) io::write_eikf(dir / "exact.eikf", *fx.exact);
    write_points(dir / "sources.txt", fx.f.grid(), fx.sources);
  } else if (contains(fixtures::sfs_fixture_names(), a.name)) {
    fixtures::SfsFixture fx;
    try {
      fx = fixtures::sfs_fixture(a.name, a.scale);
    } catch (const Error& e) {
      throw UsageError("--scale: " + std::string(e.what()));
    }
    c.flag("scale", static_cast<long long>(a.scale));
    fs::create_directories(dir);
    io::write_eikf(dir / "truth.eikf", fx.truth);
    write_pgm(dir / "image.pgm", render_lambertian(fx.truth).to_gray(65535));
    write_points(dir / "seeds.txt", fx.truth.grid(), fx.seeds);
  } else if (a.name == "spiral-maze") {
    fixtures::MazeFixture mz;
    try {
      mz = fixtures::spiral_maze(a.size);
    } catch (const Error& e) {
      throw UsageError("--size: " + std::string(e.what()));
    }
    c.flag("size", static_cast<long long>(a.size));
    fs::create_directories(dir);
    write_pgm(dir / "maze.pgm", mz.image);
    std::ofstream os(dir / "pixels.txt");
    os << "source " << format_pixel(mz.source) << "\n";
    for (const Index& s : mz.starts) os << "start " << format_pixel(s) << "\n";
    os << "hbar " << format_double(mz.hbar) << "\n";
  } else {
    throw UsageError("NAME: unknown fixture '" + a.name + "'");
  }
  write_outputs(dir, "fixture", c, {});
  out << "wrote " << a.name << " to " << dir.string() << "\n";
  return ok;
}

// ----------------------------------------------------------------- main

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eikonal solver via the screened Poisson equation", "eikonal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve the eikonal equation for a forcing field");
  solve->add_option("--f,--fixture", sa.field,
                    "EIKF forcing file or fixture (example1..example4, point-source)");
  solve->add_option("--source", sa.sources, "Source x,y[,h] in world coordinates (repeatable)");
  solve->add_option("--reference", sa.reference, "EIKF reference solution for percent error");
  add_solver_flags(solve, sa);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Percent error and max abs difference of two fields");
  compare->add_option("FIELD_A", ca.a, "EIKF estimate")->required();
  compare->add_option("FIELD_B", ca.b, "EIKF reference")->required();
  compare->add_option("--source", ca.sources, "Source x,y excluded from the error (repeatable)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Shortest paths through a maze image");
  plan->add_option("--maze", pa.maze, "PGM maze, white = obstacle");
  plan->add_option("--fixture", pa.fixture, "spiral-maze");
  plan->add_option("--size", pa.size, "Fixture maze size in pixels")->capture_default_str();
  plan->add_option("--source", pa.source, "Source pixel row,col");
  plan->add_option("--start", pa.starts, "Start pixel row,col (repeatable)");
  plan->add_option("--backend", pa.backend, "sparse, perturb or sweep")->capture_default_str();
  plan->add_option("--hbar", pa.hbar, "Planck parameter in pixels (default: fixture value, else 1)");
  plan->add_option("--lo", pa.lo, "Cost on free pixels")->capture_default_str();
  plan->add_option("--hi", pa.hi, "Cost on obstacles")->capture_default_str();
  plan->add_option("--threshold", pa.threshold, "Obstacle gray level on 0..255")->capture_default_str();
  plan->add_option("--step", pa.step, "Backtracking step in pixels")->capture_default_str();
  plan->add_option("--max-steps", pa.max_steps, "Backtracking step cap")->capture_default_str();
  plan->add_option("--solver", pa.solver, "direct or cg")->capture_default_str();
  plan->add_option("--terms", pa.terms, "Perturbation terms")->capture_default_str();
  plan->add_option("--sweeps", pa.sweeps, "Fast sweeping passes")->capture_default_str();
  plan->add_option("--out-dir", pa.out_dir, "Output directory")->capture_default_str();

  SfsArgs fa;
  auto* sfs = app.add_subcommand("sfs", "Height field from a shaded image");
  sfs->add_option("--image", fa.image, "PGM luminance image");
  sfs->add_option("--fixture", fa.fixture, "plane, cone, hemisphere or vase");
  sfs->add_option("--scale", fa.scale, "Fixture resolution multiplier")->capture_default_str();
  sfs->add_option("--spacing", fa.spacing, "Pixel spacing for --image")->capture_default_str();
  sfs->add_option("--seed", fa.seeds, "Seed x,y[,h] in world coordinates (repeatable)");
  sfs->add_option("--truth", fa.truth, "EIKF ground-truth height field");
  sfs->add_option("--backend", fa.backend, "sparse or perturb")->capture_default_str();
  sfs->add_option("--hbar", fa.hbar,
                  "Planck parameter (default: fixture value, else one pixel spacing)");
  sfs->add_option("--terms", fa.terms, "Perturbation terms")->capture_default_str();
  sfs->add_option("--tau", fa.tau, "Grid scale-down factor")->capture_default_str();
  sfs->add_option("--solver", fa.solver, "direct or cg")->capture_default_str();
  sfs->add_option("--out-dir", fa.out_dir, "Output directory")->capture_default_str();

  FixtureArgs xa;
  auto* fixture = app.add_subcommand("fixture", "Write a built-in fixture to disk");
  fixture->add_option("NAME", xa.name, "Fixture name")->required();
  fixture->add_option("--scale", xa.scale, "Resolution multiplier for shading fixtures")
      ->capture_default_str();
  fixture->add_option("--size", xa.size, "Maze size in pixels")->capture_default_str();
  fixture->add_option("--out-dir", xa.out_dir, "Output directory")->capture_default_str();

  std::string manifest_path, replay_dir = ".";
  auto* rep = app.add_subcommand("replay", "Re-run a command from its manifest.txt");
  rep->add_option("MANIFEST", manifest_path, "manifest.txt from a previous run")->required();
  rep->add_option("--out-dir", replay_dir, "Output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (*solve) return cmd_solve(sa, *solve, out, err);
    if (*compare) return cmd_compare(ca, out);
    if (*plan) return cmd_plan(pa, *plan, out, err);
    if (*sfs) return cmd_sfs(fa, *sfs, out, err);
    if (*fixture) return cmd_fixture(xa, out);
    if (!fs::exists(manifest_path))
      throw UsageError("MANIFEST: no such file '" + manifest_path + "'");
    RunManifest m;
    try {
      m = RunManifest::from_key_values(io::read_key_values(manifest_path));
    } catch (const Error& e) {
      throw UsageError("MANIFEST: " + std::string(e.what()));
    }
    return replay(m, replay_dir, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
}

}  // namespace

io::KeyValues RunManifest::to_key_values() const {
  io::KeyValues kv;
  kv.emplace_back("command", command);
  kv.emplace_back("tool_version", tool_version);
  for (std::size_t k = 0; k < args.size(); ++k) kv.emplace_back("arg." + std::to_string(k), args[k]);
  for (const auto& [key, value] : params) kv.emplace_back("param." + key, value);
  for (const auto& [key, value] : timings) kv.emplace_back("timing." + key, value);
  return kv;
}

RunManifest RunManifest::from_key_values(const io::KeyValues& kv) {
  RunManifest m;
  m.tool_version.clear();
  std::vector<std::pair<std::size_t, std::string>> numbered;
  for (const auto& [key, value] : kv) {
    if (key == "command") {
      m.command = value;
    } else if (key == "tool_version") {
      m.tool_version = value;
    } else if (key.rfind("arg.", 0) == 0) {
      try {
        numbered.emplace_back(std::stoul(key.substr(4)), value);
      } catch (const std::exception&) {
        throw Error("bad manifest key '" + key + "'");
      }
    } else if (key.rfind("param.", 0) == 0) {
      m.params.emplace_back(key.substr(6), value);
    } else if (key.rfind("timing.", 0) == 0) {
      m.timings.emplace_back(key.substr(7), value);
    }
  }
  if (m.command.empty()) throw Error("manifest has no command");
  std::sort(numbered.begin(), numbered.end());
  for (std::size_t k = 0; k < numbered.size(); ++k) {
    if (numbered[k].first != k) throw Error("manifest arguments are not numbered 0..n-1");
    m.args.push_back(numbered[k].second);
  }
  return m;
}

int replay(const RunManifest& m, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  if (m.command == "replay" || m.command == "compare") {
    err << "error: MANIFEST: cannot replay '" << m.command << "'\n";
    return usage;
  }
  if (m.tool_version != kToolVersion)
    err << "warning: manifest written by version " << m.tool_version << ", running "
        << kToolVersion << "\n";
  std::vector<std::string> args{m.command};
  args.insert(args.end(), m.args.begin(), m.args.end());
  args.push_back("--out-dir");
  args.push_back(out_dir.string());
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return solver_failure;
  }
}

}  // namespace eik::cli
