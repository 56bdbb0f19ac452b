#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"

using namespace spdelab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("eigenvalues are (k pi)^2") {
  CHECK(eigenvalue(1) == doctest::Approx(kPi * kPi).epsilon(1e-15));
  CHECK(eigenvalue(3) == doctest::Approx(9.0 * kPi * kPi).epsilon(1e-15));
  CHECK(eigenvalue(10) == doctest::Approx(100.0 * kPi * kPi).epsilon(1e-15));
}

TEST_CASE("sobolev norms at integer orders") {
  SpectralField x({3.0, 4.0});
  CHECK(hnorm(x) == doctest::Approx(5.0).epsilon(1e-15));
  // theta = 1: sqrt(lambda_1 * 9 + lambda_2 * 16) = pi sqrt(9 + 64)
  CHECK(hnorm(x, 1.0) ==
        doctest::Approx(kPi * std::sqrt(9.0 + 64.0)).epsilon(1e-14));
  SpectralField e1({1.0});
  CHECK(hnorm(e1, 1.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(hnorm(e1, -1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  // Interpolation consistency: theta = 1/2 between 0 and 1 for one mode.
  CHECK(hnorm(e1, 0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
}

TEST_CASE("semigroup factor matches the heat kernel decay") {
  for (int k : {1, 2, 5}) {
    for (double t : {0.0, 1e-3, 0.1, 2.0}) {
      CHECK(semigroup_factor(k, t) ==
            doctest::Approx(std::exp(-k * k * kPi * kPi * t)).epsilon(1e-14));
    }
  }
  CHECK(semigroup_factor(1, 0.0) == 1.0);
  CHECK_THROWS_AS(semigroup_factor(1, -1e-9), std::invalid_argument);
}

TEST_CASE("projection truncates and contracts, pad_to fixes the length") {
  SpectralField x({1.0, -2.0, 0.5, 0.25});
  auto p2 = project(x, 2);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0] == 1.0);
  CHECK(p2[1] == -2.0);
  CHECK(hnorm(p2) <= hnorm(x) + 1e-15);
  // Projecting beyond the support keeps the field unchanged (no padding).
  CHECK(project(x, 10).size() == 4);
  auto padded = pad_to(x, 6);
  REQUIRE(padded.size() == 6);
  CHECK(padded[3] == 0.25);
  CHECK(padded[4] == 0.0);
  CHECK(padded[5] == 0.0);
  CHECK(pad_to(x, 2).size() == 2);
}

TEST_CASE("sine transform round trip is exact for band-limited data") {
  RngStream rng(5, "spectral-test", 0);
  const int n = 7;
  const int grid = 21;
  SpectralField x = SpectralField::zero(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();

  auto vals = sine_transform(x, grid);
  REQUIRE(static_cast<int>(vals.size()) == grid);

  // Grid values agree with direct evaluation of sum_k x_k sqrt(2) sin(k pi xi_j).
  for (int j = 0; j < grid; ++j) {
    const double xi = static_cast<double>(j + 1) / (grid + 1);
    double direct = 0.0;
    for (int k = 1; k <= n; ++k)
      direct += x[k - 1] * std::sqrt(2.0) * std::sin(k * kPi * xi);
    CHECK(vals[j] == doctest::Approx(direct).epsilon(1e-12));
  }

  auto back = inverse_sine_transform(vals, n);
  REQUIRE(back.size() == n);
  for (int i = 0; i < n; ++i)
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("grid samples satisfy the discrete Parseval identity") {
  RngStream rng(6, "spectral-test", 1);
  const int n = 5;
  const int grid = 17;  // N + 1 = 18
  SpectralField x = SpectralField::zero(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  auto vals = sine_transform(x, grid);
  double sumsq = 0.0;
  for (double v : vals) sumsq += v * v;
  const double l2 = hnorm(x);
  CHECK(sumsq / (grid + 1) == doctest::Approx(l2 * l2).epsilon(1e-12));
}

TEST_CASE("transform size preconditions are enforced") {
  SpectralField x({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(sine_transform(x, 2), std::invalid_argument);
  std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS(inverse_sine_transform(two, 3), std::invalid_argument);
}

TEST_CASE("non-finite coefficients are detected") {
  SpectralField x({1.0, 2.0});
  CHECK(x.is_finite());
  x[1] = std::nan("");
  CHECK(!x.is_finite());
}
