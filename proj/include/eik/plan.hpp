#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "eik/field.hpp"
#include "eik/pgm.hpp"

namespace eik {

/// Travel-cost field built from a maze image: `hi` on obstacles, `lo` on
/// traversable pixels. One node per pixel, unit spacing, node (row, col).
struct MazeCost {
  ScalarField field;
  double lo = 1.0;
  double hi = 1000.0;
};

/// Pixels at or above `threshold` (on a 0..255 scale) are obstacles.
MazeCost maze_to_forcing(const GrayImage& image, double lo = 1.0, double hi = 1000.0,
                         int threshold = 128);

enum class PathStatus { reached_source, max_steps, stalled };

const char* to_string(PathStatus s);

struct PathPolyline {
  std::vector<std::array<double, 2>> points;
  PathStatus status = PathStatus::max_steps;
};

struct BacktrackOptions {
  double step = 0.5;  // in world units; 0.5 cell on unit grids
  double eps = 1.0;
  std::size_t max_steps = 100000;
};

/// Normalized gradient descent x <- x - step * grad S / |grad S| on the
/// bilinearly interpolated central-difference gradient. A step is accepted
/// only if it lowers the interpolated S; otherwise it is halved, and after
/// repeated failures the path is reported as stalled.
PathPolyline backtrack(const ScalarField& S, std::array<double, 2> start,
                       const SourceSet& sources, const BacktrackOptions& opt = {});

/// Bilinear interpolation of a 2D field at a world point inside the grid.
double interpolate(const ScalarField& field, std::array<double, 2> x);

/// CSV `x,y` rows with a header line and a `# status=...` footer.
void write_path_csv(std::ostream& os, const PathPolyline& path);
void write_path_csv(const std::filesystem::path& file, const PathPolyline& path);

}  // namespace eik
