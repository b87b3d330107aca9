#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eik {

/// Raised on contract violations: bad shapes, out-of-range indices,
/// non-finite data, malformed files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid node index. For 1D grids only `i` is used and `j` is 0.
struct Index {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Index&, const Index&) = default;
};

/// Uniform 1D or 2D grid. Axis 0 is the slow (row) axis, so the node
/// (i, j) lives at flat offset i * dims[1] + j and at world coordinate
/// origin + (i, j) * spacing.
class GridSpec {
 public:
  GridSpec() = default;
  static GridSpec line(std::size_t n, double origin, double spacing);
  static GridSpec plane(std::size_t n0, std::size_t n1,
                        std::array<double, 2> origin,
                        std::array<double, 2> spacing);
  /// Square 2D grid covering [lo, hi] on both axes with step `spacing`.
  static GridSpec square(double lo, double hi, double spacing);

  int ndims() const { return ndims_; }
  std::size_t dim(int axis) const { return dims_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  std::size_t size() const { return dims_[0] * dims_[1]; }

  /// Product of spacings: the measure of one grid cell.
  double cell_measure() const;
  std::size_t flat(Index idx) const { return idx.i * dims_[1] + idx.j; }
  Index unflat(std::size_t k) const { return {k / dims_[1], k % dims_[1]}; }
  bool contains(Index idx) const;
  std::array<double, 2> world(Index idx) const;

  /// Same shape and spacing, origin and spacing divided by `factor`.
  GridSpec scaled(double factor) const;
  /// Grid of pairwise offsets: 2n-1 nodes per axis centred on offset 0.
  GridSpec offsets() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int ndims_ = 0;
  std::array<std::size_t, 2> dims_{1, 1};
  std::array<double, 2> origin_{0.0, 0.0};
  std::array<double, 2> spacing_{1.0, 1.0};
};

/// Node values on a GridSpec, row-major. Every value is finite.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid, double fill = 0.0);
  ScalarField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(Index idx) const { return values_[grid_.flat(idx)]; }
  double& at(Index idx) { return values_[grid_.flat(idx)]; }

  double min() const;
  double max() const;
  /// Throws if any value is NaN or infinite.
  void check_finite(const char* what) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Seed nodes y_k with their prescribed values (0 unless given).
class SourceSet {
 public:
  SourceSet() = default;
  explicit SourceSet(std::vector<Index> points);
  SourceSet(std::vector<Index> points, std::vector<double> boundary_values);

  /// Snaps world coordinates to the nearest grid node.
  static SourceSet from_world(const GridSpec& grid,
                              const std::vector<std::array<double, 2>>& pts,
                              std::vector<double> boundary_values = {});

  std::size_t size() const { return points_.size(); }
  const std::vector<Index>& points() const { return points_; }
  const std::vector<double>& boundary_values() const { return values_; }
  double min_value() const;

  /// Throws unless nonempty, in bounds, duplicate-free.
  void validate(const GridSpec& grid) const;
  bool contains(Index idx) const;

 private:
  std::vector<Index> points_;
  std::vector<double> values_;
};

struct Gradient {
  ScalarField dx;  // along axis 0
  ScalarField dy;  // along axis 1 (all zero on 1D grids)
};

/// Central differences inside, first-order one-sided differences on the
/// boundary. Each differentiated axis needs at least 3 nodes.
Gradient gradient_central(const ScalarField& field);

/// Pointwise Euclidean norm of gradient_central.
ScalarField gradient_magnitude(const ScalarField& field);

/// Five-point Laplacian with mirror padding (v[-1] = v[1]) at the edges.
ScalarField laplacian_5pt(const ScalarField& field);

/// Three-point second difference for 1D fields, same edge convention.
ScalarField laplacian_3pt(const ScalarField& field);

struct PercentError {
  double percent = 0.0;
  double max_abs_diff = 0.0;
  std::size_t included = 0;
  std::size_t excluded = 0;
};

/// Mean relative error in percent, 100/N * sum |e - r| / |r|, over all
/// nodes that are not in `exclude`.
PercentError percent_error(const ScalarField& estimate,
                           const ScalarField& reference,
                           const SourceSet& exclude);

/// Distance from each node to the nearest source, in world units.
ScalarField distance_to_sources(const GridSpec& grid, const SourceSet& sources);

}  // namespace eik
