#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spdelab/maps.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"

using namespace spdelab;

TEST_CASE("diffusion acts diagonally and respects its declared bounds") {
  auto spec = DiffusionSpec::bounded_diagonal(
      ScalingRule::list({0.4, 0.3}), BoundedCoefMap::tanh_affine(1.0, 0.5, 2.0),
      /*sigma_bar=*/0.75, /*c_sigma=*/0.4);
  SpectralField x({0.2, -1.0});
  std::vector<double> dW{0.5, -0.25};
  auto out = apply_diffusion(spec, x, dW);
  REQUIRE(out.size() == 2);
  const double g0 = 1.0 + 0.5 * std::tanh(2.0 * 0.2);
  const double g1 = 1.0 + 0.5 * std::tanh(-2.0);
  CHECK(out[0] == doctest::Approx(0.4 * g0 * 0.5).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.3 * g1 * (-0.25)).epsilon(1e-14));

  // HS norm formula and the declared sup bound.
  const double hs = diffusion_hs_norm(spec, x);
  CHECK(hs == doctest::Approx(std::sqrt(0.16 * g0 * g0 + 0.09 * g1 * g1))
                  .epsilon(1e-14));
  RngStream rng(3, "noise-test", 0);
  for (int rep = 0; rep < 200; ++rep) {
    SpectralField y({3.0 * rng.normal(), 3.0 * rng.normal()});
    CHECK(diffusion_hs_norm(spec, y) <= spec.sigma_bar + 1e-12);
  }
  CHECK_THROWS_AS(apply_diffusion(spec, x, std::vector<double>{0.1}),
                  std::invalid_argument);
}

TEST_CASE("declared diffusion constants below tight values are rejected") {
  // ||(0.4, 0.3)|| = 0.5 and sup|g| = 1 for the constant modulation.
  CHECK_THROWS_AS(
      DiffusionSpec::constant_diagonal(ScalingRule::list({0.4, 0.3}), 0.49),
      std::invalid_argument);
  CHECK_NOTHROW(
      DiffusionSpec::constant_diagonal(ScalingRule::list({0.4, 0.3}), 0.5));
  // Unbounded power tail: sigma_bar cannot be certified.
  CHECK(std::isinf(ScalingRule::power(1.0, 0.5).norm_bound()));
}

TEST_CASE("brownian increments have variance dt per coordinate") {
  RngStream rng(4, "noise-test", 1);
  const double dt = 0.01;
  const int n = 3, reps = 20000;
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    auto dW = sample_brownian_increment(n, dt, rng);
    REQUIRE(static_cast<int>(dW.size()) == n);
    for (int i = 0; i < n; ++i) {
      sum[i] += dW[i];
      sumsq[i] += dW[i] * dW[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(sum[i] / reps) < 5.0 * std::sqrt(dt / reps));
    CHECK(std::abs(sumsq[i] / reps - dt) < 5.0 * dt * std::sqrt(2.0 / reps));
  }
}

TEST_CASE("jump coefficient factorizes as mark * direction * modulation") {
  auto spec = JumpSpec::discrete({-1.0, 2.0}, {0.3, 0.1},
                                 ScalingRule::list({0.5, 0.25}),
                                 BoundedCoefMap::tanh_affine(1.0, 0.5, 1.0));
  SpectralField x({0.4, -0.8});
  auto G = jump_coefficient(spec, x, 2.0);
  REQUIRE(G.size() == 2);
  CHECK(G[0] == doctest::Approx(2.0 * 0.5 * (1.0 + 0.5 * std::tanh(0.4)))
                    .epsilon(1e-14));
  CHECK(G[1] == doctest::Approx(2.0 * 0.25 * (1.0 + 0.5 * std::tanh(-0.8)))
                    .epsilon(1e-14));

  // Envelope dominance over random states and every mark.
  RngStream rng(5, "noise-test", 2);
  for (int rep = 0; rep < 200; ++rep) {
    SpectralField y({2.0 * rng.normal(), 2.0 * rng.normal()});
    for (double v : spec.marks)
      CHECK(hnorm(jump_coefficient(spec, y, v)) <= spec.envelope(v) + 1e-12);
  }
}

TEST_CASE("compensator mean integrates G against the mark measure") {
  // Point mass: mark 0.5 with weight 2 on direction e_1, constant modulation,
  // gives integral = 2 * 0.5 * e_1 = e_1 regardless of the state.
  auto spec = JumpSpec::discrete({0.5}, {2.0}, ScalingRule::list({1.0}),
                                 BoundedCoefMap::constant(1.0));
  SpectralField x({0.7, -0.3});
  auto mean = compensator_mean(spec, x);
  REQUIRE(mean.size() == 2);
  CHECK(mean[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean[1] == doctest::Approx(0.0));

  // Two marks, state-dependent modulation: direct weighted sum oracle.
  auto spec2 = JumpSpec::discrete({-1.0, 2.0}, {0.3, 0.1},
                                  ScalingRule::list({0.5, 0.25}),
                                  BoundedCoefMap::tanh_affine(1.0, 0.5, 1.0));
  auto mean2 = compensator_mean(spec2, x);
  for (int k = 0; k < 2; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < spec2.marks.size(); ++i)
      acc += spec2.weights[i] * jump_coefficient(spec2, x, spec2.marks[i])[k];
    CHECK(mean2[k] == doctest::Approx(acc).epsilon(1e-13));
  }
}

TEST_CASE("event sampling matches the intensity and the mark law") {
  auto spec = JumpSpec::discrete({-1.0, 0.5, 2.0}, {0.6, 0.3, 0.1},
                                 ScalingRule::list({1.0}),
                                 BoundedCoefMap::constant(1.0));
  REQUIRE(spec.total_mass() == doctest::Approx(1.0));
  RngStream rng(6, "noise-test", 3);
  const double dt = 0.5;
  const int reps = 40000;
  double total_events = 0.0, total_mark_sum = 0.0;
  std::vector<int> counts(3, 0);
  double prev_sorted_violations = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    auto events = sample_poisson_events(spec, dt, rng);
    total_events += static_cast<double>(events.size());
    double prev = -1.0;
    for (const auto& e : events) {
      REQUIRE(e.t_offset >= 0.0);
      REQUIRE(e.t_offset < dt);
      if (e.t_offset < prev) prev_sorted_violations += 1.0;
      prev = e.t_offset;
      REQUIRE(e.mark_index >= 0);
      REQUIRE(e.mark_index < 3);
      REQUIRE(e.mark == spec.marks[e.mark_index]);
      counts[e.mark_index] += 1;
      total_mark_sum += e.mark;
    }
  }
  CHECK(prev_sorted_violations == 0.0);

  // Mean number of events per step = mass * dt; se = sqrt(mass dt / reps).
  const double lam = spec.total_mass() * dt;
  CHECK(std::abs(total_events / reps - lam) < 5.0 * std::sqrt(lam / reps));

  // Martingale check: mean mark sum per step = m1 * dt. Var of one step's
  // mark sum is dt * m2 (compound Poisson), m2 = sum w v^2.
  const double m1 = spec.mark_moment(1);
  const double m2 = spec.mark_moment(2);
  CHECK(m1 == doctest::Approx(-0.6 + 0.15 + 0.2).epsilon(1e-14));
  CHECK(std::abs(total_mark_sum / reps - m1 * dt) <
        5.0 * std::sqrt(m2 * dt / reps));

  // Chi-square goodness of fit of the categorical mark frequencies, df = 2.
  // 99% critical value of chi2(2) = 9.21034037197618.
  const double n_events = static_cast<double>(counts[0] + counts[1] + counts[2]);
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double expect = n_events * spec.weights[i] / spec.total_mass();
    chi2 += (counts[i] - expect) * (counts[i] - expect) / expect;
  }
  CHECK(chi2 < 9.21034037197618);
}

TEST_CASE("mark moments of the materialized uniform density") {
  // Uniform mass 1.0 on [-0.5, 0.5]: odd moments 0, m2 = 1/12, m4 = 1/80.
  auto gl = JumpSpec::interval_uniform(-0.5, 0.5, 1.0, 64,
                                       ScalingRule::list({1.0}),
                                       BoundedCoefMap::constant(1.0));
  CHECK(gl.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(gl.mark_moment(1)) < 1e-13);
  CHECK(gl.mark_moment(2) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(gl.mark_moment(4) == doctest::Approx(1.0 / 80.0).epsilon(1e-12));

  // A coarse 16-node materialization is still a valid measure but its
  // moments carry discretization error at the per-mille level.
  auto mid = JumpSpec::interval_uniform(-0.5, 0.5, 1.0, 16,
                                        ScalingRule::list({1.0}),
                                        BoundedCoefMap::constant(1.0));
  CHECK(mid.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(mid.mark_moment(2) - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("declared jump constants below tight values are rejected") {
  auto dir = ScalingRule::list({1.0});
  auto one = BoundedCoefMap::constant(1.0);
  // envelope_scale_tight = ||dir|| * sup|g| = 1.
  CHECK_THROWS_AS(JumpSpec::discrete({1.0}, {1.0}, dir, one,
                                     /*envelope_scale=*/0.9),
                  std::invalid_argument);
  CHECK_NOTHROW(JumpSpec::discrete({1.0}, {1.0}, dir, one, 1.0));
  auto spec = JumpSpec::discrete({1.0}, {1.0}, dir, one);
  CHECK(spec.envelope_scale == doctest::Approx(spec.envelope_scale_tight()));
  CHECK(spec.c_g >= spec.c_g_tight() * (1.0 - 1e-12));
  CHECK(spec.c_g6 >= spec.c_g6_tight() * (1.0 - 1e-12));
  CHECK_THROWS_AS(JumpSpec::discrete({1.0}, {-1.0}, dir, one),
                  std::invalid_argument);
  CHECK_THROWS_AS(JumpSpec::discrete({1.0}, {1.0, 2.0}, dir, one),
                  std::invalid_argument);
  CHECK(JumpSpec::none().empty());
}
