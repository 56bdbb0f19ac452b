#include "spdelab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spdelab/numerics.hpp"

namespace spdelab {

DiffusionSpec DiffusionSpec::constant_diagonal(ScalingRule scales,
                                               double sigma_bar) {
  DiffusionSpec d;
  d.scales = std::move(scales);
  d.modulation = BoundedCoefMap::constant(1.0);
  d.sigma_bar = sigma_bar;
  d.c_sigma = 0.0;
  if (!(sigma_bar >= 0.0) || sigma_bar < d.sigma_bar_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("DiffusionSpec: sigma_bar below ||scales||");
  return d;
}

DiffusionSpec DiffusionSpec::bounded_diagonal(ScalingRule scales,
                                              BoundedCoefMap modulation,
                                              double sigma_bar, double c_sigma) {
  DiffusionSpec d;
  d.scales = std::move(scales);
  d.modulation = modulation;
  d.sigma_bar = sigma_bar;
  d.c_sigma = c_sigma;
  if (!(sigma_bar >= 0.0) || sigma_bar < d.sigma_bar_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("DiffusionSpec: sigma_bar below tight bound");
  if (!(c_sigma >= 0.0) || c_sigma < d.c_sigma_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("DiffusionSpec: c_sigma below tight bound");
  return d;
}

JumpSpec JumpSpec::none() { return JumpSpec{}; }

namespace {

void finalize_jump_constants(JumpSpec& j, double envelope_scale, double c_g,
                             double c_g6) {
  j.envelope_scale = envelope_scale < 0.0 ? j.envelope_scale_tight() : envelope_scale;
  j.c_g = c_g < 0.0 ? j.c_g_tight() : c_g;
  j.c_g6 = c_g6 < 0.0 ? j.c_g6_tight() : c_g6;
  if (j.envelope_scale < j.envelope_scale_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("JumpSpec: envelope_scale below tight bound");
  if (j.c_g < j.c_g_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("JumpSpec: c_g below tight bound");
  if (j.c_g6 < j.c_g6_tight() * (1.0 - 1e-12))
    throw std::invalid_argument("JumpSpec: c_g6 below tight bound");
}

}  // namespace

JumpSpec JumpSpec::discrete(std::vector<double> marks, std::vector<double> weights,
                            ScalingRule direction, BoundedCoefMap modulation,
                            double envelope_scale, double c_g, double c_g6) {
  if (marks.size() != weights.size() || marks.empty())
    throw std::invalid_argument("JumpSpec: marks/weights size mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("JumpSpec: weights must be > 0");
  for (double v : marks)
    if (!std::isfinite(v)) throw std::invalid_argument("JumpSpec: non-finite mark");
  JumpSpec j;
  j.marks = std::move(marks);
  j.weights = std::move(weights);
  j.direction = std::move(direction);
  j.modulation = modulation;
  if (!std::isfinite(j.direction.norm_bound()))
    throw std::invalid_argument("JumpSpec: direction not square-summable");
  finalize_jump_constants(j, envelope_scale, c_g, c_g6);
  return j;
}

JumpSpec JumpSpec::interval_uniform(double lo, double hi, double total_mass,
                                    int nodes, ScalingRule direction,
                                    BoundedCoefMap modulation,
                                    double envelope_scale, double c_g,
                                    double c_g6) {
  if (!(hi > lo)) throw std::invalid_argument("JumpSpec: empty interval");
  if (!(total_mass > 0.0)) throw std::invalid_argument("JumpSpec: mass must be > 0");
  if (nodes < 1 || nodes > 64)
    throw std::invalid_argument("JumpSpec: nodes must be in [1, 64]");
  const QuadRule& q = gauss_legendre_64();
  // Subsample the 64-point rule? No: build an n-point rule by panel scaling
  // of the 64-point one would bias weights. Use evenly indexed nodes only
  // when nodes == 64; otherwise fall back to midpoint panels, which keeps
  // the weights exact for the uniform density.
  std::vector<double> marks, weights;
  if (nodes == 64) {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < 64; ++i) {
      marks.push_back(mid + half * q.nodes[i]);
      weights.push_back(total_mass * 0.5 * q.weights[i]);
    }
  } else {
    double h = (hi - lo) / nodes;
    for (int i = 0; i < nodes; ++i) {
      marks.push_back(lo + (i + 0.5) * h);
      weights.push_back(total_mass / nodes);
    }
  }
  return discrete(std::move(marks), std::move(weights), std::move(direction),
                  modulation, envelope_scale, c_g, c_g6);
}

double JumpSpec::total_mass() const {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

double JumpSpec::mark_moment(int p) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < marks.size(); ++i)
    acc += weights[i] * std::pow(marks[i], p);
  return acc;
}

double JumpSpec::envelope(double v) const { return std::abs(v) * envelope_scale; }

double JumpSpec::envelope_scale_tight() const {
  return direction.norm_bound() * modulation.sup_abs();
}

double JumpSpec::c_g_tight() const {
  double m2 = 0.0;
  for (std::size_t i = 0; i < marks.size(); ++i)
    m2 += weights[i] * marks[i] * marks[i];
  double lip = direction.max_abs() * modulation.lipschitz();
  double grow = direction.norm_bound() * modulation.sup_abs();
  return m2 * std::max(lip * lip, grow * grow);
}

double JumpSpec::c_g6_tight() const {
  double m6 = 0.0;
  for (std::size_t i = 0; i < marks.size(); ++i)
    m6 += weights[i] * std::pow(std::abs(marks[i]), 6);
  double grow = direction.norm_bound() * modulation.sup_abs();
  return m6 * std::pow(grow, 6);
}

std::vector<double> sample_brownian_increment(int n, double dt, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_brownian_increment: n >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian_increment: dt > 0");
  double s = std::sqrt(dt);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = s * rng.normal();
  return out;
}

std::vector<JumpEvent> sample_poisson_events(const JumpSpec& spec, double dt,
                                             RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_poisson_events: dt > 0");
  std::vector<JumpEvent> events;
  if (spec.empty()) return events;
  double mass = spec.total_mass();
  std::uint64_t count = rng.poisson(mass * dt);
  if (count == 0) return events;
  events.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    double t = dt * rng.uniform();
    double u = rng.uniform() * mass;
    double acc = 0.0;
    int idx = static_cast<int>(spec.marks.size()) - 1;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
      acc += spec.weights[i];
      if (u < acc) {
        idx = static_cast<int>(i);
        break;
      }
    }
    events.push_back(JumpEvent{t, spec.marks[idx], idx});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const JumpEvent& a, const JumpEvent& b) {
                     return a.t_offset < b.t_offset;
                   });
  return events;
}

SpectralField apply_diffusion(const DiffusionSpec& spec, const SpectralField& x,
                              const std::vector<double>& dW) {
  if (static_cast<int>(dW.size()) != x.size())
    throw std::invalid_argument("apply_diffusion: dW size mismatch");
  SpectralField out = SpectralField::zero(x.size());
  for (int i = 0; i < x.size(); ++i)
    out[i] = spec.scales.value(i + 1) * spec.modulation.value(x[i]) * dW[i];
  return out;
}

double diffusion_hs_norm(const DiffusionSpec& spec, const SpectralField& x) {
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double s = spec.scales.value(i + 1) * spec.modulation.value(x[i]);
    acc += s * s;
  }
  return std::sqrt(acc);
}

SpectralField jump_coefficient(const JumpSpec& spec, const SpectralField& x,
                               double mark) {
  SpectralField out = SpectralField::zero(x.size());
  if (spec.empty()) return out;
  for (int i = 0; i < x.size(); ++i)
    out[i] = mark * spec.direction.value(i + 1) * spec.modulation.value(x[i]);
  return out;
}

SpectralField compensator_mean(const JumpSpec& spec, const SpectralField& x) {
  SpectralField out = SpectralField::zero(x.size());
  if (spec.empty()) return out;
  // G is linear in the mark, so the integral factorizes through sum w_i v_i.
  double m1 = spec.mark_moment(1);
  for (int i = 0; i < x.size(); ++i)
    out[i] = m1 * spec.direction.value(i + 1) * spec.modulation.value(x[i]);
  return out;
}

}  // namespace spdelab
