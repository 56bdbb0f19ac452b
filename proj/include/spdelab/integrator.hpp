#pragma once
// Semi-implicit Euler integrator for the spectral Galerkin system
//
//   y (1 + lambda_k dt) = x_k + dt f(x)_k + (sigma(x) dW)_k
//                         + sum_events G(x, v) - dt * compensator(x)_k
//
// The linear part is implicit (stiff eigenvalues), everything else explicit
// at the pre-step state. Jumps inside a step are applied at step end in time
// order; the compensator integral is subtracted as an explicit drift.
//
// Noise streams are addressed (master seed, purpose, member), so a member's
// path never depends on scheduling. Coupled pairs share the Brownian and
// jump streams; multiresolution runs share them across levels by drawing at
// the fine level and handing each coarse level the prefix of the same
// vector.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spdelab/model.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

class blow_up_error : public std::runtime_error {
 public:
  blow_up_error(std::uint64_t member, int step, double norm);
  std::uint64_t member;
  int step;
  double norm;
};

struct InitialLaw {
  enum class Kind { point, gaussian };
  Kind kind = Kind::point;
  std::vector<double> mean;
  std::vector<double> stddev;

  static InitialLaw point(std::vector<double> coeffs);
  static InitialLaw gaussian(std::vector<double> mean, std::vector<double> stddev);

  // Point laws consume no draws; Gaussian laws always consume exactly
  // stddev.size() normals, so the sample is resolution-independent.
  SpectralField sample(int n, RngStream& rng) const;
};

// Materialized per-level kernels (read-only after construction; safe to
// share across threads).
struct ModelContext {
  ModelSpec spec;
  int n;
  std::vector<double> lambda;
  std::vector<double> sigma_scale;
  std::vector<double> jump_dir;
  double jump_mark_mean;  // sum_i w_i v_i
  bool has_jumps;
  ReactionEvaluator reaction;

  explicit ModelContext(const ModelSpec& m);
};

// Number of steps implied by (T, dt); T must sit on the dt grid.
int num_steps(double T, double dt);

// One step with externally supplied noise (pure; used by tests and by all
// drivers below).
SpectralField step(const ModelSpec& model, const SpectralField& x,
                   const std::vector<double>& dW,
                   const std::vector<JumpEvent>& events, double dt);

struct Path {
  double dt = 0.0;
  std::vector<SpectralField> states;  // states[i] at t = i * dt
};

Path simulate_path(const ModelSpec& model, const SpectralField& x0, double T,
                   double dt, std::uint64_t master_seed, std::uint64_t member);

// Callback form: on_step(i, state) for i = 0..M, storing nothing itself.
void simulate_path_observed(
    const ModelSpec& model, const SpectralField& x0, double T, double dt,
    std::uint64_t master_seed, std::uint64_t member,
    const std::function<void(int, const SpectralField&)>& on_step);

struct CoupledPaths {
  double dt = 0.0;
  std::vector<SpectralField> x, y;
};

// Two solutions driven by identical noise from different starting points.
CoupledPaths simulate_coupled_pair(const ModelSpec& model,
                                   const SpectralField& x0,
                                   const SpectralField& y0, double T, double dt,
                                   std::uint64_t master_seed,
                                   std::uint64_t member);

void simulate_coupled_observed(
    const ModelSpec& model, const SpectralField& x0, const SpectralField& y0,
    double T, double dt, std::uint64_t master_seed, std::uint64_t member,
    const std::function<void(int, const SpectralField&, const SpectralField&)>&
        on_step);

struct TrajectoryEnsemble {
  double dt = 0.0;
  std::vector<double> obs_times;
  std::vector<int> obs_steps;
  // members[j][k] is member j at obs_times[k]
  std::vector<std::vector<SpectralField>> members;
};

// Maps observation times to step indices (times must sit on the grid).
std::vector<int> observation_steps(const std::vector<double>& obs_times,
                                   double T, double dt);

TrajectoryEnsemble simulate_ensemble(const ModelSpec& model,
                                     const InitialLaw& law, int m, double T,
                                     double dt,
                                     const std::vector<double>& obs_times,
                                     std::uint64_t master_seed, int threads);

struct MultiresPair {
  double dt = 0.0;
  std::vector<SpectralField> hi, lo;
  double sup_gap_sq = 0.0;  // max over grid times of ||pad(lo) - hi||^2
};

// Coarse and fine solution of the same model driven by the same noise; the
// coarse level starts from the projection of x0.
MultiresPair multiresolution_pair(const ModelSpec& model, int n_hi, int n_lo,
                                  const SpectralField& x0, double T, double dt,
                                  std::uint64_t master_seed,
                                  std::uint64_t member);

// One fine solve shared by several coarse levels; returns sup gap^2 per
// entry of lo_list. Equivalent to repeated multiresolution_pair calls.
std::vector<double> multiresolution_sup_gaps(const ModelSpec& model, int n_hi,
                                             const std::vector<int>& lo_list,
                                             const SpectralField& x0, double T,
                                             double dt,
                                             std::uint64_t master_seed,
                                             std::uint64_t member);

// Deterministic static partition; rethrows the failure of the smallest
// member index if any member throws.
void parallel_for_members(int m, int threads,
                          const std::function<void(int)>& fn);

}  // namespace spdelab
