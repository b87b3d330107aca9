#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eik/field.hpp"
#include "eik/kernels.hpp"
#include "eik/pgm.hpp"

namespace eik::fixtures {

/// A forcing field with its seeds and the solver settings that go with it.
struct EikonalFixture {
  std::string name;
  ScalarField f;
  SourceSet sources;
  double hbar = 0.01;
  int terms = 6;
  double tau = 1.0;
  ConvMode conv = ConvMode::zero_padded_linear;
  int sweeps = 15;
  std::optional<ScalarField> exact;  // closed-form solution when known
};

/// example1 .. example4 are the four benchmark setups;
/// point-source is f = 1 with one centre seed on a 65 x 65 grid.
EikonalFixture eikonal_fixture(const std::string& name);
std::vector<std::string> eikonal_fixture_names();

/// Height-field fixtures for shape from shading. `truth` is measured down
/// from the seeds, so it is itself the eikonal solution the solver targets.
struct SfsFixture {
  std::string name;
  ScalarField truth;
  SourceSet seeds;  // with heights
  double hbar = 0.0;
};

/// plane, cone, hemisphere, vase. `scale` multiplies the resolution.
SfsFixture sfs_fixture(const std::string& name, int scale = 1);
std::vector<std::string> sfs_fixture_names();

/// Ring maze: nested square walls, each with one gap on alternating sides,
/// so every route to the centre spirals inward. Walls are white (255).
struct MazeFixture {
  GrayImage image;
  Index source;               // (row, col)
  std::vector<Index> starts;  // one per outer corner region
  double hbar = 1.0;
};

MazeFixture spiral_maze(std::size_t size = 450, std::size_t corridor = 40,
                        std::size_t wall = 16);

}  // namespace eik::fixtures
