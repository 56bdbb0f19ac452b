#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spdelab/numerics.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"
#include "spdelab/transport.hpp"

using namespace spdelab;

namespace {

// Brute-force minimum over all m! permutations of mean cost.
double brute_force_wp(const std::vector<SpectralField>& a,
                      const std::vector<SpectralField>& b, int p) {
  const int m = static_cast<int>(a.size());
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      SpectralField d = a[i];
      for (int k = 0; k < d.size(); ++k) d[k] -= b[perm[i]][k];
      const double g = hnorm(d);
      acc += p == 1 ? g : g * g;
    }
    best = std::min(best, acc / m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return p == 1 ? best : std::sqrt(best);
}

std::vector<SpectralField> random_cloud(int m, int dim, RngStream& rng) {
  std::vector<SpectralField> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    SpectralField x = SpectralField::zero(dim);
    for (int k = 0; k < dim; ++k) x[k] = rng.normal();
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

TEST_CASE("assignment solver on hand-checkable matrices") {
  // Identity assignment optimal.
  CHECK(assignment_cost_min({{1.0, 10.0}, {10.0, 1.0}}) == doctest::Approx(2.0));
  // Anti-diagonal optimal.
  CHECK(assignment_cost_min({{10.0, 1.0}, {1.0, 10.0}}) == doctest::Approx(2.0));
  // 3x3 with a forced non-trivial permutation: rows pick columns (1,2,0).
  CHECK(assignment_cost_min({{8.0, 1.0, 9.0},
                             {9.0, 8.0, 1.0},
                             {1.0, 9.0, 8.0}}) == doctest::Approx(3.0));
  CHECK(assignment_cost_min({{5.0}}) == doctest::Approx(5.0));
}

TEST_CASE("one dimensional clouds have sorted-coupling distances") {
  // {0, 4} vs {1, 3}: optimal pairing 0-1, 4-3, so W1 = (1 + 1)/2 = 1 and
  // W2 = sqrt((1 + 1)/2) = 1.
  std::vector<SpectralField> a{SpectralField({0.0}), SpectralField({4.0})};
  std::vector<SpectralField> b{SpectralField({1.0}), SpectralField({3.0})};
  CHECK(w_p_empirical(a, b, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w_p_empirical(a, b, 2) == doctest::Approx(1.0).epsilon(1e-14));
  // Swapping the inputs changes nothing.
  CHECK(w_p_empirical(b, a, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exact solver equals brute force on random instances") {
  RngStream rng(21, "transport-test", 0);
  for (int inst = 0; inst < 100; ++inst) {
    const int m = 2 + static_cast<int>(rng.next_u32() % 5);  // 2..6
    const int dim = 1 + static_cast<int>(rng.next_u32() % 3);
    auto a = random_cloud(m, dim, rng);
    auto b = random_cloud(m, dim, rng);
    for (int p : {1, 2}) {
      const double lib = w_p_empirical(a, b, p);
      const double ref = brute_force_wp(a, b, p);
      CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("empirical distances behave like a metric") {
  RngStream rng(22, "transport-test", 1);
  auto a = random_cloud(12, 3, rng);
  auto b = random_cloud(12, 3, rng);
  auto c = random_cloud(12, 3, rng);
  for (int p : {1, 2}) {
    CHECK(w_p_empirical(a, a, p) == doctest::Approx(0.0));
    const double ab = w_p_empirical(a, b, p);
    const double ba = w_p_empirical(b, a, p);
    const double ac = w_p_empirical(a, c, p);
    const double cb = w_p_empirical(c, b, p);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(ab > 0.0);
  }
  // Order of the distances: W1 <= W2 (Jensen on the optimal W2 coupling).
  CHECK(w_p_empirical(a, b, 1) <= w_p_empirical(a, b, 2) + 1e-12);
}

TEST_CASE("input validation of the empirical distance") {
  RngStream rng(23, "transport-test", 2);
  auto a = random_cloud(3, 2, rng);
  auto b = random_cloud(4, 2, rng);
  CHECK_THROWS_AS(w_p_empirical(a, b, 2), std::invalid_argument);
  auto c = random_cloud(3, 2, rng);
  CHECK_THROWS_AS(w_p_empirical(a, c, 3), std::invalid_argument);
  CHECK_THROWS_AS(w_p_empirical(a, c, 2, /*size_cap=*/2), std::invalid_argument);
  std::vector<SpectralField> empty;
  CHECK_THROWS_AS(w_p_empirical(empty, empty, 2), std::invalid_argument);
}

TEST_CASE("path distance integrates the gap with the trapezoid rule") {
  // Gap ||a_i - b_i|| = {0, 2, 4} at dt = 0.5: integral = (0/2+2+4/2)*0.5 = 2.
  std::vector<SpectralField> a{SpectralField({0.0}), SpectralField({0.0}),
                               SpectralField({0.0})};
  std::vector<SpectralField> b{SpectralField({0.0}), SpectralField({2.0}),
                               SpectralField({4.0})};
  CHECK(path_distance_L1(a, b, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(path_distance_L1(a, a, 0.5) == doctest::Approx(0.0));
  std::vector<SpectralField> shorter{SpectralField({0.0})};
  CHECK_THROWS_AS(path_distance_L1(a, shorter, 0.5), std::invalid_argument);
}

TEST_CASE("observables are 1-Lipschitz and match closed forms") {
  auto lin = LipschitzObservable::linear(SpectralField({3.0, 4.0}), "lin");
  // phi is normalized: <phi, x> = (3 x_1 + 4 x_2) / 5.
  CHECK(lin.eval(SpectralField({5.0, 0.0})) == doctest::Approx(3.0).epsilon(1e-14));
  auto dist = LipschitzObservable::distance(SpectralField({1.0, 0.0}), "d");
  CHECK(dist.eval(SpectralField({4.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-14));
  RngStream rng(24, "transport-test", 3);
  for (int rep = 0; rep < 200; ++rep) {
    SpectralField x({rng.normal(), rng.normal()});
    SpectralField y({rng.normal(), rng.normal()});
    SpectralField d({x[0] - y[0], x[1] - y[1]});
    const double gap = hnorm(d);
    CHECK(std::abs(lin.eval(x) - lin.eval(y)) <= gap + 1e-12);
    CHECK(std::abs(dist.eval(x) - dist.eval(y)) <= gap + 1e-12);
  }
  CHECK_THROWS_AS(LipschitzObservable::linear(SpectralField({0.0, 0.0}), "z"),
                  std::invalid_argument);
}

TEST_CASE("tail and moment statistics against direct computation") {
  RngStream rng(25, "transport-test", 4);
  std::vector<double> samples;
  const int n = 100000;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) samples.push_back(rng.normal());

  std::vector<double> r_grid{0.5, 1.0, 2.0};
  std::vector<double> l_grid{0.5, 1.0};
  auto stats = tail_and_moment_stats(samples, r_grid, l_grid, 77, 200);
  CHECK(stats.n == n);

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  CHECK(stats.mean == doctest::Approx(mean).epsilon(1e-12));

  REQUIRE(stats.tails.size() == 3);
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    long long k = 0;
    for (double s : samples)
      if (s - mean > r_grid[i]) ++k;
    CHECK(stats.tails[i].exceed_count == k);
    CHECK(stats.tails[i].freq == doctest::Approx(static_cast<double>(k) / n));
    CHECK(stats.tails[i].cp_upper ==
          doctest::Approx(clopper_pearson_upper(k, n)).epsilon(1e-12));
    CHECK(stats.tails[i].cp_upper > stats.tails[i].freq);
  }

  REQUIRE(stats.moments.size() == 2);
  for (std::size_t i = 0; i < l_grid.size(); ++i) {
    double acc = 0.0;
    for (double s : samples) acc += std::exp(l_grid[i] * (s - mean));
    acc /= n;
    CHECK(stats.moments[i].mean_exp == doctest::Approx(acc).epsilon(1e-12));
    // E exp(l Z) for centred N(0,1) is e^{l^2/2}; at n = 1e5 the estimate is
    // within a few percent for l <= 1.
    CHECK(stats.moments[i].mean_exp ==
          doctest::Approx(std::exp(0.5 * l_grid[i] * l_grid[i])).epsilon(0.05));
    CHECK(stats.moments[i].boot_upper >= stats.moments[i].mean_exp);
  }

  // The bootstrap band is seeded: same seed reproduces, different seed moves.
  auto again = tail_and_moment_stats(samples, r_grid, l_grid, 77, 200);
  CHECK(again.moments[0].boot_upper == stats.moments[0].boot_upper);
}
