#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eik/kernels.hpp"
#include "oracles.hpp"

using namespace eik;
using std::numbers::pi;

TEST_SUITE("kernels") {

TEST_CASE("K0 agrees with the quadrature oracle and frozen values") {
  // Frozen from a 30-digit evaluation of int_0^inf exp(-x cosh t) dt.
  const double xs[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0};
  const double ref[] = {4.721244730161095,     2.4270690247020166,   0.9244190712276659,
                        0.42102443824070834,   0.11389387274953344,  0.0036910983340425942,
                        1.7780062316167652e-05, 2.1324774964630564e-14};
  for (int i = 0; i < 8; ++i) {
    CAPTURE(xs[i]);
    CHECK(bessel_k0(xs[i]) == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(oracle::bessel_k0(xs[i]) == doctest::Approx(ref[i]).epsilon(1e-10));
  }
  CHECK(bessel_k0(800.0) == 0.0);
}

TEST_CASE("1D Green's function") {
  CHECK(green_1d(0.0, {1.0, 1.0, 1}) == doctest::Approx(0.5));
  CHECK(green_1d(1.0, {0.5, 2.0, 1}) == doctest::Approx(0.00915781944436709).epsilon(1e-12));
  CHECK(green_1d(1.0, {1e-3, 1.0, 1}) < 1e-300);
}

TEST_CASE("2D Green's function") {
  CHECK(green_2d(1.0, {1.0, 1.0, 2}) == doctest::Approx(0.06700812050849712).epsilon(1e-12));
  const KernelParams p{0.1, 1.0, 2};
  CHECK(green_2d(1.0, p) == doctest::Approx(green_2d_asymptotic(1.0, p)).epsilon(0.02));
  CHECK(green_2d(0.5, {1e-3, 1.0, 2}) < 1e-200);
  CHECK_THROWS_AS(green_2d(0.0, {1.0, 1.0, 2}), Error);
}

TEST_CASE("3D Green's function") {
  CHECK(green_3d(2.0, {1.0, 1.0, 3}) == doctest::Approx(0.005384819825462158).epsilon(1e-12));
  CHECK(green_3d(1.0, {1.0, 1e-12, 3}) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-9));
  CHECK(green_3d(1.0, {1e-3, 1.0, 3}) < 1e-300);
}

TEST_CASE("modified kernel") {
  CHECK(modified_green(0.0, {0.3, 7.0, 2}) == 1.0);
  CHECK(modified_green(0.05, {0.006, 1.0, 2}) ==
        doctest::Approx(0.00024036947641951407).epsilon(1e-12));
  double prev = 2.0;
  for (double r = 0.0; r < 1.0; r += 0.01) {
    const double v = modified_green(r, {0.1, 1.0, 2});
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("exact over modified kernel tends to the closed-form prefactor") {
  for (double x : {10.0, 20.0, 40.0}) {
    const KernelParams p{1.0 / x, 1.0, 1};
    CHECK(green_1d(1.0, p) / modified_green(1.0, p) == doctest::Approx(1.0 / (2.0 * p.hbar)));
    const KernelParams q{1.0 / x, 1.0, 2};
    const double pref = 1.0 / (2.0 * q.hbar * std::sqrt(2.0 * pi * q.hbar));
    CHECK(green_2d(1.0, q) / modified_green(1.0, q) / pref == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("kernel fields") {
  const GridSpec g = GridSpec::square(-1.0, 1.0, 0.25);
  const KernelParams p{0.3, 1.2, 2};
  const ScalarField m = kernel_field(g, p, KernelKind::modified, {}, KernelExtent::same_grid);
  CHECK(m.at({4, 4}) == 1.0);
  for (double v : m.values()) CHECK(v > 0.0);
  const ScalarField e = kernel_field(g, p, KernelKind::exact, {}, KernelExtent::same_grid);
  CHECK(e.at({4, 4}) == doctest::Approx(green_2d(0.125, p)));
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK(e.at({i, j}) == e.at({8 - i, j}));
      CHECK(e.at({i, j}) == e.at({j, i}));
    }
  ConvPolicy cap;
  cap.origin = OriginRegularization::finite_cap(2.5);
  CHECK(kernel_field(g, p, KernelKind::exact, cap, KernelExtent::same_grid).at({4, 4}) == 2.5);
  const ScalarField o = kernel_field(g, p, KernelKind::modified, {});
  CHECK(o.grid().dim(0) == 17);
  CHECK(o.at({8, 8}) == 1.0);
}

TEST_CASE("delta convolves to the kernel") {
  const GridSpec g = GridSpec::square(-1.0, 1.0, 0.25);
  ScalarField delta(g);
  delta.at({4, 4}) = 1.0;
  const ScalarField k =
      kernel_field(g, {0.3, 1.0, 2}, KernelKind::exact, {}, KernelExtent::offsets);
  const ScalarField ks =
      kernel_field(g, {0.3, 1.0, 2}, KernelKind::exact, {}, KernelExtent::same_grid);
  for (ConvMode mode : {ConvMode::zero_padded_linear, ConvMode::direct}) {
    const ScalarField out = convolve(delta, k, {mode}, false);
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(out[n] == doctest::Approx(ks[n]).epsilon(1e-12));
  }
  const ScalarField circ = convolve(delta, ks, {ConvMode::circular}, false);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(circ[n] - ks[n]) < 1e-12);
}

TEST_CASE("convolution is linear") {
  std::mt19937 rng(11);
  const GridSpec g = GridSpec::plane(10, 7, {0, 0}, {0.1, 0.1});
  const ScalarField a = oracle::random_field(g, rng, -1, 1), b = oracle::random_field(g, rng, -1, 1);
  const ScalarField k = oracle::random_field(g.offsets(), rng, 0, 1);
  ScalarField ab(g);
  for (std::size_t n = 0; n < g.size(); ++n) ab[n] = a[n] + b[n];
  const ScalarField ca = convolve(a, k, {}, true), cb = convolve(b, k, {}, true),
                    cab = convolve(ab, k, {}, true);
  double scale = 0.0;
  for (double v : cab.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(cab[n] - ca[n] - cb[n]) <= 1e-12 * scale);
}

TEST_CASE("FFT and direct convolution match the brute-force oracle") {
  std::mt19937 rng(5);
  for (auto [n0, n1] : {std::pair{8, 8}, {16, 16}, {5, 13}, {1, 9}}) {
    CAPTURE(n0);
    CAPTURE(n1);
    const GridSpec g = GridSpec::plane(n0, n1, {0, 0}, {1, 1});
    const ScalarField a = oracle::random_field(g, rng, -1, 1);
    const ScalarField k = oracle::random_field(g.offsets(), rng, -1, 1);
    const ScalarField ref = oracle::brute_convolve(a, k);
    double scale = 0.0;
    for (double v : ref.values()) scale = std::max(scale, std::abs(v));
    for (ConvMode mode : {ConvMode::zero_padded_linear, ConvMode::direct}) {
      ConvPolicy pol{mode};
      pol.threads = 3;
      const ScalarField out = convolve(a, k, pol, false);
      for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(out[n] - ref[n]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("direct convolution does not depend on the thread count") {
  std::mt19937 rng(9);
  const GridSpec g = GridSpec::plane(12, 9, {0, 0}, {1, 1});
  const ScalarField a = oracle::random_field(g, rng, -1, 1);
  const ScalarField k = oracle::random_field(g.offsets(), rng, -1, 1);
  const ScalarField one = convolve(a, k, {ConvMode::direct}, true);
  ConvPolicy four{ConvMode::direct};
  four.threads = 4;
  const ScalarField many = convolve(a, k, four, true);
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(one[n] == many[n]);
}

TEST_CASE("kernel parameters are validated") {
  CHECK_THROWS_AS(KernelParams({0.0, 1.0, 2}).validate(), Error);
  CHECK_THROWS_AS(KernelParams({1.0, -1.0, 2}).validate(), Error);
  CHECK_THROWS_AS(KernelParams({1.0, 1.0, 4}).validate(), Error);
  CHECK_THROWS_AS(OriginRegularization::finite_cap(0.0), Error);
}

}  // TEST_SUITE
