#include <doctest.h>

#include <cmath>
#include <sstream>

#include "eik/fixtures.hpp"
#include "eik/plan.hpp"
#include "eik/sparse.hpp"
#include "oracles.hpp"

using namespace eik;

namespace {

GrayImage blank(std::size_t h, std::size_t w, std::uint16_t v = 0) {
  GrayImage img;
  img.height = h;
  img.width = w;
  img.pixels.assign(h * w, v);
  return img;
}

double length(const PathPolyline& p) {
  double s = 0.0;
  for (std::size_t k = 1; k < p.points.size(); ++k)
    s += std::hypot(p.points[k][0] - p.points[k - 1][0], p.points[k][1] - p.points[k - 1][1]);
  return s;
}

}  // namespace

TEST_SUITE("plan") {

TEST_CASE("maze forcing") {
  const MazeCost open = maze_to_forcing(blank(4, 5));
  for (double v : open.field.values()) CHECK(v == 1.0);
  GrayImage cb = blank(2, 2);
  cb.pixels = {0, 255, 255, 0};
  const MazeCost c = maze_to_forcing(cb, 1.0, 1000.0, 128);
  CHECK(c.field.at({0, 0}) == 1.0);
  CHECK(c.field.at({0, 1}) == 1000.0);
  CHECK(c.field.at({1, 0}) == 1000.0);
  CHECK(c.field.at({1, 1}) == 1.0);
  GrayImage deep = blank(1, 2);
  deep.maxval = 1000;
  deep.pixels = {510, 490};
  const MazeCost d = maze_to_forcing(deep);
  CHECK(d.field.at({0, 0}) == 1000.0);
  CHECK(d.field.at({0, 1}) == 1.0);
  CHECK_THROWS_AS(maze_to_forcing(blank(3, 3, 255)), Error);
}

TEST_CASE("obstacle count matches a pixel scan on the 450 maze") {
  const auto mz = fixtures::spiral_maze();
  const MazeCost c = maze_to_forcing(mz.image);
  std::size_t white = 0, hi = 0;
  for (std::size_t r = 0; r < 450; ++r)
    for (std::size_t col = 0; col < 450; ++col) white += mz.image.at(r, col) >= 128;
  for (double v : c.field.values()) hi += v == c.hi;
  CHECK(white == hi);
  CHECK(white > 0);
}

TEST_CASE("bilinear interpolation is exact on planes") {
  const GridSpec g = GridSpec::plane(5, 6, {-1.0, 2.0}, {0.5, 0.25});
  ScalarField f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto w = g.world(g.unflat(k));
    f[k] = 3.0 * w[0] - 2.0 * w[1] + 0.5;
  }
  CHECK(interpolate(f, {-0.3, 2.6}) == doctest::Approx(3.0 * -0.3 - 2.0 * 2.6 + 0.5));
  CHECK(interpolate(f, {1.0, 3.25}) == doctest::Approx(3.0 - 6.5 + 0.5));
}

TEST_CASE("a start on the source is already there") {
  const GridSpec g = GridSpec::square(0, 10, 1);
  const SourceSet s({{4, 4}});
  const PathPolyline p = backtrack(oracle::euclid(g, s), {4.0, 4.0}, s);
  CHECK(p.status == PathStatus::reached_source);
  CHECK(p.points.size() == 1);
}

TEST_CASE("radial fields give straight paths") {
  const GridSpec g = GridSpec::square(-1, 1, 2.0 / 64);
  const SourceSet s = SourceSet::from_world(g, {{0.0, 0.0}});
  const SolveReport r = sparse_eikonal(ScalarField(g, 1.0), s, 0.05);
  for (std::array<double, 2> x0 : {std::array{0.8, 0.3}, {-0.6, -0.6}, {0.1, -0.9}}) {
    BacktrackOptions opt;
    opt.step = 0.01;
    opt.eps = 0.03;
    const PathPolyline p = backtrack(r.S_star, x0, s, opt);
    REQUIRE(p.status == PathStatus::reached_source);
    const double straight = std::hypot(x0[0], x0[1]);
    CHECK(length(p) <= 1.1 * straight);
    CHECK(length(p) >= 0.9 * (straight - opt.eps));
  }
}

TEST_CASE("maze paths stay on free pixels and descend") {
  const auto mz = fixtures::spiral_maze(160, 16, 8);
  const MazeCost cost = maze_to_forcing(mz.image);
  const SourceSet s({mz.source});
  const SolveReport r = sparse_eikonal(cost.field, s, mz.hbar);
  const auto hops = oracle::pixel_bfs(mz.image, mz.source);
  std::vector<PathPolyline> paths;
  for (const Index& st : mz.starts) {
    CHECK(hops[st.i * 160 + st.j] > 0);
    const PathPolyline p = backtrack(r.S_star, r.S_star.grid().world(st), s);
    CHECK(p.status == PathStatus::reached_source);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& q : p.points) {
      CHECK(mz.image.at(static_cast<std::size_t>(std::lround(q[0])),
                        static_cast<std::size_t>(std::lround(q[1]))) == 0);
      const double v = interpolate(r.S_star, q);
      CHECK(v < prev);
      prev = v;
    }
    // The route must follow the corridors, so it can be no shorter than the
    // 4-connected hop count scaled by 1/sqrt(2).
    CHECK(length(p) >= hops[st.i * 160 + st.j] / std::sqrt(2.0) - 2.0);
    paths.push_back(p);
  }
}

TEST_CASE("a sealed room stalls") {
  // A thick wall and a small hbar push phi below the floor in the far room,
  // leaving S flat there.
  GrayImage img = blank(151, 11);
  for (std::size_t r = 20; r <= 24; ++r)
    for (std::size_t k = 0; k < 11; ++k) img.pixels[r * 11 + k] = 255;
  const MazeCost cost = maze_to_forcing(img);
  const SourceSet s({{3, 5}});
  const SolveReport r = sparse_eikonal(cost.field, s, 0.02);
  CHECK_FALSE(r.floored.empty());
  const PathPolyline p = backtrack(r.S_star, {140.0, 5.0}, s);
  CHECK(p.status != PathStatus::reached_source);
}

TEST_CASE("path csv layout") {
  PathPolyline p;
  p.points = {{1.5, 2.0}, {1.0, 1.0}};
  p.status = PathStatus::reached_source;
  std::stringstream ss;
  write_path_csv(ss, p);
  CHECK(ss.str() == "x,y\n1.5,2\n1,1\n# status=reached_source\n");
}

}  // TEST_SUITE
