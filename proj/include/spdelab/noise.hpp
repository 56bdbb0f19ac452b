#pragma once
// Gaussian and compensated-jump noise specifications.
//
// Diffusion is diagonal in the sine basis with a bounded coefficient-wise
// modulation:  (sigma(x) w)_k = s_k * g(x_k) * w_k.  Declared constants:
//   sigma_bar  >= sup_x ||sigma(x)||_HS       (= ||s|| * sup|g|)
//   c_sigma    >= HS Lipschitz constant        (= max_k|s_k| * Lip(g))
//
// Jumps carry a finite mark measure (a list of marks with positive weights,
// possibly materialized from a density onto quadrature nodes, so sampling
// and all integrals against the measure use the same discrete object) and a
// coefficient field G(x, v) = v * (d_k * g(x_k))_k. The envelope
// Ghat(v) = |v| * envelope_scale dominates ||G(x, v)||_H uniformly in x.
// Declared constants c_g (squared Lipschitz/growth) and c_g6 (sixth moment)
// must dominate the tight values implied by the parameters.

#include <cstdint>
#include <vector>

#include "spdelab/maps.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

struct DiffusionSpec {
  ScalingRule scales = ScalingRule::zero();
  BoundedCoefMap modulation = BoundedCoefMap::constant(1.0);
  double sigma_bar = 0.0;
  double c_sigma = 0.0;

  static DiffusionSpec constant_diagonal(ScalingRule scales, double sigma_bar);
  static DiffusionSpec bounded_diagonal(ScalingRule scales, BoundedCoefMap modulation,
                                        double sigma_bar, double c_sigma);

  double sigma_bar_tight() const { return scales.norm_bound() * modulation.sup_abs(); }
  double c_sigma_tight() const { return scales.max_abs() * modulation.lipschitz(); }
};

struct JumpEvent {
  double t_offset;  // position inside the step, in [0, dt)
  double mark;
  int mark_index;
};

struct JumpSpec {
  std::vector<double> marks;
  std::vector<double> weights;  // positive, sum = total mass of the measure
  ScalingRule direction = ScalingRule::zero();
  BoundedCoefMap modulation = BoundedCoefMap::constant(1.0);
  double envelope_scale = 0.0;
  double c_g = 0.0;
  double c_g6 = 0.0;

  static JumpSpec none();
  static JumpSpec discrete(std::vector<double> marks, std::vector<double> weights,
                           ScalingRule direction, BoundedCoefMap modulation,
                           double envelope_scale = -1.0, double c_g = -1.0,
                           double c_g6 = -1.0);
  // Uniform density of the given total mass on [lo, hi], materialized onto
  // a Gauss-Legendre grid of `nodes` points.
  static JumpSpec interval_uniform(double lo, double hi, double total_mass,
                                   int nodes, ScalingRule direction,
                                   BoundedCoefMap modulation,
                                   double envelope_scale = -1.0,
                                   double c_g = -1.0, double c_g6 = -1.0);

  bool empty() const { return marks.empty(); }
  double total_mass() const;
  double mark_moment(int p) const;  // sum_i w_i v_i^p
  double envelope(double v) const;  // Ghat(v)

  double envelope_scale_tight() const;
  double c_g_tight() const;
  double c_g6_tight() const;
};

// n independent N(0, dt) increments.
std::vector<double> sample_brownian_increment(int n, double dt, RngStream& rng);

// Events of one step: count ~ Poisson(mass * dt), marks ~ weights / mass,
// times uniform on [0, dt), returned sorted by time.
std::vector<JumpEvent> sample_poisson_events(const JumpSpec& spec, double dt,
                                             RngStream& rng);

// (sigma(x) dW)_k; dW must have x.size() entries.
SpectralField apply_diffusion(const DiffusionSpec& spec, const SpectralField& x,
                              const std::vector<double>& dW);

// ||sigma(x)||_HS for the diagonal family.
double diffusion_hs_norm(const DiffusionSpec& spec, const SpectralField& x);

// Jump coefficient G(x, v).
SpectralField jump_coefficient(const JumpSpec& spec, const SpectralField& x,
                               double mark);

// integral of G(x, v) against the mark measure (the compensator drift is
// dt times this).
SpectralField compensator_mean(const JumpSpec& spec, const SpectralField& x);

}  // namespace spdelab
