#include "eik/plan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "eik/io.hpp"

namespace eik {

namespace {

struct Cell {
  std::size_t i, j;
  double u, v;  // fractional position inside the cell
};

Cell locate(const GridSpec& g, std::array<double, 2> x) {
  Cell c{};
  for (int a = 0; a < 2; ++a) {
    const double t = (x[a] - g.origin(a)) / g.spacing(a);
    const double last = static_cast<double>(g.dim(a) - 1);
    const double tc = std::clamp(t, 0.0, last);
    std::size_t base = static_cast<std::size_t>(std::floor(tc));
    if (base + 1 >= g.dim(a) && g.dim(a) > 1) base = g.dim(a) - 2;
    (a == 0 ? c.i : c.j) = base;
    (a == 0 ? c.u : c.v) = tc - static_cast<double>(base);
  }
  return c;
}

double bilinear(const ScalarField& f, const Cell& c) {
  const std::size_t n1 = f.grid().dim(1);
  const std::size_t k = c.i * n1 + c.j;
  const double f00 = f[k], f01 = f[k + 1], f10 = f[k + n1], f11 = f[k + n1 + 1];
  return (1 - c.u) * ((1 - c.v) * f00 + c.v * f01) + c.u * ((1 - c.v) * f10 + c.v * f11);
}

bool inside(const GridSpec& g, std::array<double, 2> x) {
  for (int a = 0; a < 2; ++a) {
    const double lo = g.origin(a);
    const double hi = lo + static_cast<double>(g.dim(a) - 1) * g.spacing(a);
    if (x[a] < lo || x[a] > hi) return false;
  }
  return true;
}

std::array<double, 2> clamp_to_grid(const GridSpec& g, std::array<double, 2> x) {
  for (int a = 0; a < 2; ++a) {
    const double lo = g.origin(a);
    const double hi = lo + static_cast<double>(g.dim(a) - 1) * g.spacing(a);
    x[a] = std::clamp(x[a], lo, hi);
  }
  return x;
}

}  // namespace

MazeCost maze_to_forcing(const GrayImage& image, double lo, double hi, int threshold) {
  if (image.width == 0 || image.height == 0) throw Error("maze image is empty");
  if (!(lo > 0.0) || !(hi > lo)) throw Error("maze costs need 0 < lo < hi");
  if (threshold < 0 || threshold > 255) throw Error("maze threshold must be in 0..255");

  const GridSpec g = GridSpec::plane(image.height, image.width, {0.0, 0.0}, {1.0, 1.0});
  MazeCost out{ScalarField(g), lo, hi};
  std::size_t open = 0;
  for (std::size_t k = 0; k < image.pixels.size(); ++k) {
    const double level = 255.0 * image.pixels[k] / image.maxval;
    const bool wall = level >= threshold;
    out.field[k] = wall ? hi : lo;
    open += wall ? 0 : 1;
  }
  if (open == 0) throw Error("maze has no traversable (black) pixels");
  return out;
}

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::reached_source:
      return "reached_source";
    case PathStatus::max_steps:
      return "max_steps";
    case PathStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

double interpolate(const ScalarField& field, std::array<double, 2> x) {
  const GridSpec& g = field.grid();
  if (g.ndims() != 2 || g.dim(0) < 2 || g.dim(1) < 2)
    throw Error("interpolate: needs a 2D grid with at least 2 nodes per axis");
  return bilinear(field, locate(g, x));
}

PathPolyline backtrack(const ScalarField& S, std::array<double, 2> start,
                       const SourceSet& sources, const BacktrackOptions& opt) {
  const GridSpec& g = S.grid();
  if (g.ndims() != 2) throw Error("backtrack: needs a 2D value function");
  if (!(opt.step > 0.0) || !(opt.eps > 0.0)) throw Error("backtrack: step and eps must be positive");
  if (!inside(g, start)) throw Error("backtrack: start point lies outside the grid");
  sources.validate(g);

  std::vector<std::array<double, 2>> targets;
  for (const Index& p : sources.points()) targets.push_back(g.world(p));
  auto near_source = [&](std::array<double, 2> x) {
    for (const auto& y : targets)
      if (std::hypot(x[0] - y[0], x[1] - y[1]) < opt.eps) return true;
    return false;
  };

  const Gradient grad = gradient_central(S);
  PathPolyline path;
  std::array<double, 2> x = start;
  double sx = interpolate(S, x);
  path.points.push_back(x);

  for (std::size_t n = 0; n < opt.max_steps; ++n) {
    if (near_source(x)) {
      path.status = PathStatus::reached_source;
      return path;
    }
    const Cell c = locate(g, x);
    const double gx = bilinear(grad.dx, c), gy = bilinear(grad.dy, c);
    const double norm = std::hypot(gx, gy);
    if (norm < 1e-12) {
      path.status = PathStatus::stalled;
      return path;
    }
    bool accepted = false;
    double h = opt.step;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt, h *= 0.5) {
      const std::array<double, 2> y = clamp_to_grid(g, {x[0] - h * gx / norm, x[1] - h * gy / norm});
      const double sy = interpolate(S, y);
      if (sy < sx) {
        x = y;
        sx = sy;
        accepted = true;
      }
    }
    if (!accepted) {
      path.status = near_source(x) ? PathStatus::reached_source : PathStatus::stalled;
      return path;
    }
    path.points.push_back(x);
  }
  path.status = near_source(x) ? PathStatus::reached_source : PathStatus::max_steps;
  return path;
}

void write_path_csv(std::ostream& os, const PathPolyline& path) {
  os << "x,y\n";
  for (const auto& p : path.points)
    os << io::format_double(p[0]) << ',' << io::format_double(p[1]) << '\n';
  os << "# status=" << to_string(path.status) << '\n';
}

void write_path_csv(const std::filesystem::path& file, const PathPolyline& path) {
  std::ofstream os(file);
  if (!os) throw Error("cannot open " + file.string() + " for writing");
  write_path_csv(os, path);
}

}  // namespace eik
