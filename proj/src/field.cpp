#include "eik/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eik {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(msg);
}

std::string format_index(const GridSpec& g, Index idx) {
  std::ostringstream os;
  if (g.ndims() == 1)
    os << "(" << idx.i << ")";
  else
    os << "(" << idx.i << "," << idx.j << ")";
  return os.str();
}

}  // namespace

GridSpec GridSpec::line(std::size_t n, double origin, double spacing) {
  require(n >= 1, "grid needs at least one node");
  require(spacing > 0.0 && std::isfinite(spacing), "grid spacing must be positive");
  require(std::isfinite(origin), "grid origin must be finite");
  GridSpec g;
  g.ndims_ = 1;
  g.dims_ = {n, 1};
  g.origin_ = {origin, 0.0};
  g.spacing_ = {spacing, 1.0};
  return g;
}

GridSpec GridSpec::plane(std::size_t n0, std::size_t n1,
                         std::array<double, 2> origin,
                         std::array<double, 2> spacing) {
  require(n0 >= 1 && n1 >= 1, "grid needs at least one node per axis");
  for (int a = 0; a < 2; ++a) {
    require(spacing[a] > 0.0 && std::isfinite(spacing[a]),
            "grid spacing must be positive");
    require(std::isfinite(origin[a]), "grid origin must be finite");
  }
  GridSpec g;
  g.ndims_ = 2;
  g.dims_ = {n0, n1};
  g.origin_ = origin;
  g.spacing_ = spacing;
  return g;
}

GridSpec GridSpec::square(double lo, double hi, double spacing) {
  require(hi > lo, "square grid needs hi > lo");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
  return plane(n, n, {lo, lo}, {spacing, spacing});
}

double GridSpec::cell_measure() const {
  return ndims_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

bool GridSpec::contains(Index idx) const {
  return idx.i < dims_[0] && idx.j < dims_[1];
}

std::array<double, 2> GridSpec::world(Index idx) const {
  return {origin_[0] + static_cast<double>(idx.i) * spacing_[0],
          ndims_ == 1 ? 0.0
                      : origin_[1] + static_cast<double>(idx.j) * spacing_[1]};
}

GridSpec GridSpec::scaled(double factor) const {
  require(factor > 0.0 && std::isfinite(factor), "scale factor must be positive");
  GridSpec g = *this;
  for (int a = 0; a < ndims_; ++a) {
    g.origin_[a] = origin_[a] / factor;
    g.spacing_[a] = spacing_[a] / factor;
  }
  return g;
}

GridSpec GridSpec::offsets() const {
  GridSpec g = *this;
  for (int a = 0; a < ndims_; ++a) {
    g.dims_[a] = 2 * dims_[a] - 1;
    g.origin_[a] = -static_cast<double>(dims_[a] - 1) * spacing_[a];
  }
  return g;
}

ScalarField::ScalarField(GridSpec grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {
  require(grid_.ndims() == 1 || grid_.ndims() == 2, "field needs a 1D or 2D grid");
  require(std::isfinite(fill), "field fill value must be finite");
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(grid_.ndims() == 1 || grid_.ndims() == 2, "field needs a 1D or 2D grid");
  require(values_.size() == grid_.size(), "field value count does not match grid");
  check_finite("field");
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

void ScalarField::check_finite(const char* what) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]))
      throw Error(std::string(what) + ": non-finite value at node " +
                  format_index(grid_, grid_.unflat(k)));
  }
}

SourceSet::SourceSet(std::vector<Index> points)
    : points_(std::move(points)), values_(points_.size(), 0.0) {}

SourceSet::SourceSet(std::vector<Index> points, std::vector<double> boundary_values)
    : points_(std::move(points)), values_(std::move(boundary_values)) {
  if (values_.empty()) values_.assign(points_.size(), 0.0);
  require(values_.size() == points_.size(),
          "source boundary values must match the number of points");
  for (double v : values_) require(std::isfinite(v), "source values must be finite");
}

SourceSet SourceSet::from_world(const GridSpec& grid,
                                const std::vector<std::array<double, 2>>& pts,
                                std::vector<double> boundary_values) {
  std::vector<Index> idx;
  idx.reserve(pts.size());
  for (const auto& p : pts) {
    Index node;
    for (int a = 0; a < grid.ndims(); ++a) {
      const double t = std::round((p[a] - grid.origin(a)) / grid.spacing(a));
      if (t < 0.0 || t > static_cast<double>(grid.dim(a) - 1)) {
        std::ostringstream os;
        os << "source point (" << p[0] << "," << p[1] << ") lies outside the grid";
        throw Error(os.str());
      }
      (a == 0 ? node.i : node.j) = static_cast<std::size_t>(t);
    }
    idx.push_back(node);
  }
  SourceSet s(std::move(idx), std::move(boundary_values));
  s.validate(grid);
  return s;
}

double SourceSet::min_value() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

void SourceSet::validate(const GridSpec& grid) const {
  require(!points_.empty(), "source set is empty");
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (!grid.contains(points_[k]))
      throw Error("source " + format_index(grid, points_[k]) + " is outside the grid");
    for (std::size_t m = 0; m < k; ++m)
      if (points_[m] == points_[k])
        throw Error("duplicate source " + format_index(grid, points_[k]));
  }
}

bool SourceSet::contains(Index idx) const {
  return std::find(points_.begin(), points_.end(), idx) != points_.end();
}

Gradient gradient_central(const ScalarField& field) {
  const GridSpec& g = field.grid();
  const int nd = g.ndims();
  for (int a = 0; a < nd; ++a)
    require(g.dim(a) >= 3, "gradient needs at least 3 nodes along each axis");

  Gradient out{ScalarField(g), ScalarField(g)};
  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  const double h0 = g.spacing(0), h1 = g.spacing(1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t k = i * n1 + j;
      if (i == 0)
        out.dx[k] = (field[k + n1] - field[k]) / h0;
      else if (i == n0 - 1)
        out.dx[k] = (field[k] - field[k - n1]) / h0;
      else
        out.dx[k] = (field[k + n1] - field[k - n1]) / (2.0 * h0);
      if (nd == 2) {
        if (j == 0)
          out.dy[k] = (field[k + 1] - field[k]) / h1;
        else if (j == n1 - 1)
          out.dy[k] = (field[k] - field[k - 1]) / h1;
        else
          out.dy[k] = (field[k + 1] - field[k - 1]) / (2.0 * h1);
      }
    }
  }
  return out;
}

ScalarField gradient_magnitude(const ScalarField& field) {
  const Gradient grad = gradient_central(field);
  ScalarField out(field.grid());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::hypot(grad.dx[k], grad.dy[k]);
  return out;
}

ScalarField laplacian_5pt(const ScalarField& field) {
  const GridSpec& g = field.grid();
  require(g.ndims() == 2, "laplacian_5pt needs a 2D field");
  require(g.dim(0) >= 3 && g.dim(1) >= 3,
          "laplacian_5pt needs at least 3 nodes along each axis");
  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  const double w0 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double w1 = 1.0 / (g.spacing(1) * g.spacing(1));
  // Mirror padding: the ghost beyond an edge takes the value one node inside.
  auto mirror = [](std::size_t k, std::size_t n, bool up) -> std::size_t {
    if (up) return k + 1 < n ? k + 1 : k - 1;
    return k > 0 ? k - 1 : k + 1;
  };
  ScalarField out(g);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double c = field[i * n1 + j];
      const double xp = field[mirror(i, n0, true) * n1 + j];
      const double xm = field[mirror(i, n0, false) * n1 + j];
      const double yp = field[i * n1 + mirror(j, n1, true)];
      const double ym = field[i * n1 + mirror(j, n1, false)];
      out[i * n1 + j] = (xp + xm - 2.0 * c) * w0 + (yp + ym - 2.0 * c) * w1;
    }
  }
  return out;
}

ScalarField laplacian_3pt(const ScalarField& field) {
  const GridSpec& g = field.grid();
  require(g.ndims() == 1, "laplacian_3pt needs a 1D field");
  const std::size_t n = g.dim(0);
  require(n >= 3, "laplacian_3pt needs at least 3 nodes");
  const double w = 1.0 / (g.spacing(0) * g.spacing(0));
  ScalarField out(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double xp = field[i + 1 < n ? i + 1 : i - 1];
    const double xm = field[i > 0 ? i - 1 : i + 1];
    out[i] = (xp + xm - 2.0 * field[i]) * w;
  }
  return out;
}

PercentError percent_error(const ScalarField& estimate,
                           const ScalarField& reference,
                           const SourceSet& exclude) {
  require(estimate.grid() == reference.grid(),
          "percent_error: estimate and reference grids differ");
  const GridSpec& g = reference.grid();
  std::vector<char> skip(g.size(), 0);
  for (const Index& p : exclude.points())
    if (g.contains(p)) skip[g.flat(p)] = 1;

  PercentError out;
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (skip[k]) {
      ++out.excluded;
      continue;
    }
    const double r = std::abs(reference[k]);
    if (r == 0.0)
      throw Error("percent_error: reference is zero at included node " +
                  format_index(g, g.unflat(k)));
    const double d = std::abs(estimate[k] - reference[k]);
    sum += d / r;
    out.max_abs_diff = std::max(out.max_abs_diff, d);
    ++out.included;
  }
  require(out.included > 0, "percent_error: every node is excluded");
  out.percent = 100.0 * sum / static_cast<double>(out.included);
  return out;
}

ScalarField distance_to_sources(const GridSpec& grid, const SourceSet& sources) {
  ScalarField out(grid);
  std::vector<std::array<double, 2>> pts;
  for (const Index& p : sources.points()) pts.push_back(grid.world(p));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = grid.world(grid.unflat(k));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : pts) best = std::min(best, std::hypot(x[0] - y[0], x[1] - y[1]));
    out[k] = best;
  }
  return out;
}

}  // namespace eik
