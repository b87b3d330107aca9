#include "eik/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace eik::fixtures {

namespace {

using std::numbers::pi;

template <class Fn>
ScalarField sample(const GridSpec& g, Fn fn) {
  ScalarField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto w = g.world(g.unflat(k));
    out[k] = fn(w[0], w[1]);
  }
  return out;
}

GridSpec small_square() { return GridSpec::square(-0.125, 0.125, 1.0 / 1024.0); }

}  // namespace

std::vector<std::string> eikonal_fixture_names() {
  return {"example1", "example2", "example3", "example4", "point-source"};
}

EikonalFixture eikonal_fixture(const std::string& name) {
  EikonalFixture fx;
  fx.name = name;
  if (name == "example1") {
    const GridSpec g = small_square();
    fx.f = sample(g, [](double x, double y) { return std::exp(std::hypot(x, y)); });
    fx.exact = sample(g, [](double x, double y) { return std::abs(std::exp(std::hypot(x, y)) - 1.0); });
    fx.sources = SourceSet::from_world(g, {{0.0, 0.0}});
    fx.hbar = 0.006;
  } else if (name == "example2") {
    const GridSpec g = small_square();
    fx.f = sample(g, [](double x, double y) {
      const double a = std::exp(-2.0 * ((x + 0.05) * (x + 0.05) + (y + 0.05) * (y + 0.05)));
      const double b = std::exp(-2.0 * ((x - 0.05) * (x - 0.05) + (y - 0.05) * (y - 0.05)));
      return 1.0 + 2.0 * (a - b);
    });
    fx.sources = SourceSet::from_world(g, {{0.0, 0.0}});
    fx.hbar = 0.015;
  } else if (name == "example3") {
    const GridSpec g = small_square();
    fx.f = sample(g, [](double x, double y) {
      return 1.0 + std::sin(pi * (x - 0.05)) * std::sin(pi * (y + 0.05));
    });
    fx.sources = SourceSet::from_world(
        g, {{0.0, 0.0}, {0.0488, 0.0977}, {-0.0244, -0.0732}, {0.0293, -0.0391}});
    fx.hbar = 0.0085;
  } else if (name == "example4") {
    const GridSpec g = GridSpec::square(-5.0, 5.0, 0.25);
    fx.f = sample(g, [](double x, double y) {
      return 1.0 + 0.3 * std::sin(pi * (x + 1.0)) * std::sin(pi * (y - 2.0));
    });
    fx.sources = SourceSet::from_world(g, {{0.0, 0.0}, {1.0, 1.0}, {-2.0, -3.0}, {3.0, -4.0}});
    fx.hbar = 0.001;
    fx.tau = 100.0;
    // Far-field values of phi sit ~30 decades below the peak; FFT rounding
    // would swamp them.
    fx.conv = ConvMode::direct;
  } else if (name == "point-source") {
    const GridSpec g = GridSpec::square(-0.25, 0.25, 0.5 / 64.0);
    fx.f = ScalarField(g, 1.0);
    fx.exact = sample(g, [](double x, double y) { return std::hypot(x, y); });
    fx.sources = SourceSet::from_world(g, {{0.0, 0.0}});
    fx.hbar = 0.01;
  } else {
    throw Error("unknown fixture '" + name + "'");
  }
  return fx;
}

std::vector<std::string> sfs_fixture_names() { return {"plane", "cone", "hemisphere", "vase"}; }

SfsFixture sfs_fixture(const std::string& name, int scale) {
  if (scale < 1) throw Error("fixture scale must be at least 1");
  const auto n = static_cast<std::size_t>(32 * scale);
  SfsFixture fx;
  fx.name = name;
  if (name == "plane") {
    const GridSpec g = GridSpec::square(-1.0, 1.0, 2.0 / static_cast<double>(n));
    fx.truth = sample(g, [](double x, double) { return x + 1.0; });
    std::vector<Index> edge;
    for (std::size_t j = 0; j < g.dim(1); ++j) edge.push_back({0, j});
    fx.seeds = SourceSet(edge);
  } else if (name == "cone") {
    const GridSpec g = GridSpec::square(-1.0, 1.0, 2.0 / static_cast<double>(n));
    fx.truth = sample(g, [](double x, double y) { return std::hypot(x, y); });
    fx.seeds = SourceSet::from_world(g, {{0.0, 0.0}});
  } else if (name == "hemisphere") {
    const GridSpec g = GridSpec::square(-0.65, 0.65, 1.3 / static_cast<double>(n));
    fx.truth = sample(g, [](double x, double y) { return 1.0 - std::sqrt(1.0 - x * x - y * y); });
    fx.seeds = SourceSet::from_world(g, {{0.0, 0.0}});
  } else if (name == "vase") {
    // Rows run along the vase axis (y), columns across it (x); the patch
    // stays inside the silhouette so slopes remain bounded.
    auto radius = [](double y) { return 0.6 + 0.15 * std::sin(2.5 * y + 0.3); };
    const double h = 2.0 / static_cast<double>(n);
    const std::size_t half = static_cast<std::size_t>(std::llround(0.35 / h));
    const GridSpec g = GridSpec::plane(n + 1, 2 * half + 1, {-1.0, -static_cast<double>(half) * h},
                                       {h, h});
    const double rmax = 0.75;
    fx.truth = sample(g, [&](double y, double x) {
      const double r = radius(y);
      return rmax - std::sqrt(r * r - x * x);
    });
    std::vector<Index> ridge;
    std::vector<double> heights;
    for (std::size_t i = 0; i < g.dim(0); ++i) {
      ridge.push_back({i, half});
      heights.push_back(fx.truth.at({i, half}));
    }
    fx.seeds = SourceSet(ridge, heights);
  } else {
    throw Error("unknown fixture '" + name + "'");
  }
  fx.hbar = fx.truth.grid().spacing(0);
  return fx;
}

MazeFixture spiral_maze(std::size_t size, std::size_t corridor, std::size_t wall) {
  if (size < 4 * (corridor + wall)) throw Error("spiral maze too small for its corridor width");
  MazeFixture mz;
  GrayImage& img = mz.image;
  img.width = img.height = size;
  img.maxval = 255;
  img.pixels.assign(size * size, 0);
  auto fill = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1, std::uint16_t v) {
    for (std::size_t r = r0; r <= r1; ++r)
      for (std::size_t c = c0; c <= c1; ++c) img.pixels[r * size + c] = v;
  };

  // Outer frame, then nested rings with alternating gaps.
  fill(0, wall - 1, 0, size - 1, 255);
  fill(size - wall, size - 1, 0, size - 1, 255);
  fill(0, size - 1, 0, wall - 1, 255);
  fill(0, size - 1, size - wall, size - 1, 255);
  std::size_t lo = wall + corridor;
  for (int ring = 0;; ++ring) {
    const std::size_t hi = size - 1 - lo;
    if (hi < lo + 2 * corridor + 2 * wall) break;
    fill(lo, lo + wall - 1, lo, hi, 255);
    fill(hi - wall + 1, hi, lo, hi, 255);
    fill(lo, hi, lo, lo + wall - 1, 255);
    fill(lo, hi, hi - wall + 1, hi, 255);
    const std::size_t mid = (lo + hi) / 2;
    const std::size_t g0 = mid - corridor / 2, g1 = mid + corridor / 2 - 1;
    if (ring % 2 == 0)
      fill(lo, lo + wall - 1, g0, g1, 0);  // gap in the top wall
    else
      fill(hi - wall + 1, hi, g0, g1, 0);  // gap in the bottom wall
    lo += wall + corridor;
  }

  mz.source = {size / 2, size / 2};
  const std::size_t near = wall + corridor / 2;
  const std::size_t far = size - 1 - near;
  mz.starts = {{near, near}, {far, near}, {near, far}, {far, far}};
  // The five-point stencil charges a wall cell only ~2 log(f delta / hbar)
  // nats, so walls must be thick relative to the corridor decay rate.
  mz.hbar = 0.3 * static_cast<double>(corridor);
  return mz;
}

}  // namespace eik::fixtures
