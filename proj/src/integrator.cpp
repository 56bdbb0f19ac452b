#include "spdelab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include "spdelab/spectral.hpp"

namespace spdelab {

namespace {

std::string blow_up_message(std::uint64_t member, int step, double norm) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "solution blew up: member %llu, step %d, norm %.6g",
                static_cast<unsigned long long>(member), step, norm);
  return std::string(buf);
}

}  // namespace

blow_up_error::blow_up_error(std::uint64_t member_, int step_, double norm_)
    : std::runtime_error(blow_up_message(member_, step_, norm_)),
      member(member_),
      step(step_),
      norm(norm_) {}

InitialLaw InitialLaw::point(std::vector<double> coeffs) {
  InitialLaw law;
  law.kind = Kind::point;
  law.mean = std::move(coeffs);
  return law;
}

InitialLaw InitialLaw::gaussian(std::vector<double> mean,
                                std::vector<double> stddev) {
  for (double s : stddev) {
    if (!(s >= 0.0)) throw std::invalid_argument("initial stddev must be >= 0");
  }
  InitialLaw law;
  law.kind = Kind::gaussian;
  law.mean = std::move(mean);
  law.stddev = std::move(stddev);
  return law;
}

SpectralField InitialLaw::sample(int n, RngStream& rng) const {
  if (n <= 0) throw std::invalid_argument("sample: n must be positive");
  SpectralField x = SpectralField::zero(n);
  const int nm = std::min<int>(n, static_cast<int>(mean.size()));
  for (int k = 0; k < nm; ++k) x.c[k] = mean[k];
  if (kind == Kind::gaussian) {
    for (std::size_t k = 0; k < stddev.size(); ++k) {
      const double z = rng.normal();  // always consume the full draw budget
      if (static_cast<int>(k) < n) x.c[k] += stddev[k] * z;
    }
  }
  return x;
}

ModelContext::ModelContext(const ModelSpec& m)
    : spec(m),
      n(m.n_modes),
      jump_mark_mean(0.0),
      has_jumps(!m.jumps.empty()),
      reaction(m.reaction, m.n_modes) {
  spec.validate();
  lambda.resize(n);
  for (int k = 0; k < n; ++k) lambda[k] = eigenvalue(k + 1);
  sigma_scale = spec.diffusion.scales.materialize(n);
  jump_dir = spec.jumps.direction.materialize(n);
  if (has_jumps) jump_mark_mean = spec.jumps.mark_moment(1);
}

int num_steps(double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  const double raw = T / dt;
  const int M = static_cast<int>(std::llround(raw));
  if (M < 1 || std::abs(M * dt - T) > 1e-9 * std::max(1.0, T)) {
    throw std::invalid_argument("T must be an integer multiple of dt");
  }
  return M;
}

namespace {

struct StepScratch {
  SpectralField f;
  std::vector<double> grid;
};

// In-place semi-implicit step; dW has ctx.n entries (or more, extras
// ignored), mark_sum is the sum of jump marks landing in the step.
void step_inplace(const ModelContext& ctx, SpectralField& x, const double* dW,
                  double mark_sum, double dt, StepScratch& ws) {
  ctx.reaction.eval(x, ws.f, ws.grid);
  const BoundedCoefMap& gs = ctx.spec.diffusion.modulation;
  const BoundedCoefMap& gj = ctx.spec.jumps.modulation;
  const double jump_factor =
      ctx.has_jumps ? (mark_sum - dt * ctx.jump_mark_mean) : 0.0;
  for (int k = 0; k < ctx.n; ++k) {
    double num = x.c[k] + dt * ws.f.c[k];
    if (ctx.sigma_scale[k] != 0.0) {
      num += ctx.sigma_scale[k] * gs.value(x.c[k]) * dW[k];
    }
    if (jump_factor != 0.0 && ctx.jump_dir[k] != 0.0) {
      num += jump_factor * ctx.jump_dir[k] * gj.value(x.c[k]);
    }
    x.c[k] = num / (1.0 + ctx.lambda[k] * dt);
  }
}

void check_state(const ModelContext& ctx, const SpectralField& x, int step,
                 std::uint64_t member) {
  if (!x.is_finite()) {
    throw blow_up_error(member, step, std::numeric_limits<double>::quiet_NaN());
  }
  const double norm = hnorm(x);
  if (norm > ctx.spec.blowup_threshold) {
    throw blow_up_error(member, step, norm);
  }
}

double sum_marks_in_order(const std::vector<JumpEvent>& events) {
  double s = 0.0;
  for (const JumpEvent& e : events) s += e.mark;  // events sorted by time
  return s;
}

// Shared per-member driver: one Brownian + one jump stream feed `levels`
// states in lockstep; state 0 defines the number of Brownian coordinates
// drawn and every other state uses a prefix of the same vector.
void run_lockstep(
    const std::vector<const ModelContext*>& ctxs,
    std::vector<SpectralField>& states, int M, double dt, RngStream& wiener,
    RngStream& jumps, std::uint64_t member,
    const std::function<void(int, const std::vector<SpectralField>&)>&
        on_step) {
  const std::size_t L = ctxs.size();
  const int n_draw = ctxs[0]->n;
  for (std::size_t l = 0; l < L; ++l) {
    if (ctxs[l]->n > n_draw) {
      throw std::logic_error("lockstep levels must not exceed the lead level");
    }
    if (states[l].size() != ctxs[l]->n) {
      throw std::invalid_argument("state size does not match model modes");
    }
    check_state(*ctxs[l], states[l], 0, member);
  }
  if (on_step) on_step(0, states);

  std::vector<double> dW(n_draw);
  std::vector<StepScratch> ws(L);
  const bool has_jumps = ctxs[0]->has_jumps;
  for (int i = 1; i <= M; ++i) {
    for (int k = 0; k < n_draw; ++k) dW[k] = std::sqrt(dt) * wiener.normal();
    double mark_sum = 0.0;
    if (has_jumps) {
      const std::vector<JumpEvent> events =
          sample_poisson_events(ctxs[0]->spec.jumps, dt, jumps);
      mark_sum = sum_marks_in_order(events);
    }
    for (std::size_t l = 0; l < L; ++l) {
      step_inplace(*ctxs[l], states[l], dW.data(), mark_sum, dt, ws[l]);
      check_state(*ctxs[l], states[l], i, member);
    }
    if (on_step) on_step(i, states);
  }
}

}  // namespace

SpectralField step(const ModelSpec& model, const SpectralField& x,
                   const std::vector<double>& dW,
                   const std::vector<JumpEvent>& events, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  ModelContext ctx(model);
  if (x.size() != ctx.n) {
    throw std::invalid_argument("state size does not match model modes");
  }
  if (static_cast<int>(dW.size()) < ctx.n) {
    throw std::invalid_argument("noise increment shorter than mode count");
  }
  SpectralField y = x;
  StepScratch ws;
  step_inplace(ctx, y, dW.data(), sum_marks_in_order(events), dt, ws);
  check_state(ctx, y, 1, 0);
  return y;
}

void simulate_path_observed(
    const ModelSpec& model, const SpectralField& x0, double T, double dt,
    std::uint64_t master_seed, std::uint64_t member,
    const std::function<void(int, const SpectralField&)>& on_step) {
  const int M = num_steps(T, dt);
  ModelContext ctx(model);
  std::vector<const ModelContext*> ctxs{&ctx};
  std::vector<SpectralField> states{pad_to(x0, ctx.n)};
  RngStream wiener(master_seed, "wiener", member);
  RngStream jumps(master_seed, "jumps", member);
  run_lockstep(ctxs, states, M, dt, wiener, jumps, member,
               [&](int i, const std::vector<SpectralField>& s) {
                 if (on_step) on_step(i, s[0]);
               });
}

Path simulate_path(const ModelSpec& model, const SpectralField& x0, double T,
                   double dt, std::uint64_t master_seed, std::uint64_t member) {
  Path p;
  p.dt = dt;
  p.states.reserve(static_cast<std::size_t>(num_steps(T, dt)) + 1);
  simulate_path_observed(
      model, x0, T, dt, master_seed, member,
      [&](int, const SpectralField& s) { p.states.push_back(s); });
  return p;
}

void simulate_coupled_observed(
    const ModelSpec& model, const SpectralField& x0, const SpectralField& y0,
    double T, double dt, std::uint64_t master_seed, std::uint64_t member,
    const std::function<void(int, const SpectralField&, const SpectralField&)>&
        on_step) {
  const int M = num_steps(T, dt);
  ModelContext ctx(model);
  std::vector<const ModelContext*> ctxs{&ctx, &ctx};
  std::vector<SpectralField> states{pad_to(x0, ctx.n), pad_to(y0, ctx.n)};
  RngStream wiener(master_seed, "wiener", member);
  RngStream jumps(master_seed, "jumps", member);
  run_lockstep(ctxs, states, M, dt, wiener, jumps, member,
               [&](int i, const std::vector<SpectralField>& s) {
                 if (on_step) on_step(i, s[0], s[1]);
               });
}

CoupledPaths simulate_coupled_pair(const ModelSpec& model,
                                   const SpectralField& x0,
                                   const SpectralField& y0, double T, double dt,
                                   std::uint64_t master_seed,
                                   std::uint64_t member) {
  CoupledPaths cp;
  cp.dt = dt;
  const std::size_t cap = static_cast<std::size_t>(num_steps(T, dt)) + 1;
  cp.x.reserve(cap);
  cp.y.reserve(cap);
  simulate_coupled_observed(model, x0, y0, T, dt, master_seed, member,
                            [&](int, const SpectralField& a,
                                const SpectralField& b) {
                              cp.x.push_back(a);
                              cp.y.push_back(b);
                            });
  return cp;
}

std::vector<int> observation_steps(const std::vector<double>& obs_times,
                                   double T, double dt) {
  const int M = num_steps(T, dt);
  std::vector<int> steps;
  steps.reserve(obs_times.size());
  for (double t : obs_times) {
    if (!(t >= 0.0) || t > T * (1.0 + 1e-12)) {
      throw std::invalid_argument("observation time outside [0, T]");
    }
    const int s = static_cast<int>(std::llround(t / dt));
    if (s > M || std::abs(s * dt - t) > 1e-9 * std::max(1.0, t)) {
      throw std::invalid_argument(
          "observation times must be integer multiples of dt");
    }
    steps.push_back(s);
  }
  return steps;
}

TrajectoryEnsemble simulate_ensemble(const ModelSpec& model,
                                     const InitialLaw& law, int m, double T,
                                     double dt,
                                     const std::vector<double>& obs_times,
                                     std::uint64_t master_seed, int threads) {
  if (m < 1) throw std::invalid_argument("ensemble size must be >= 1");
  const int M = num_steps(T, dt);
  TrajectoryEnsemble ens;
  ens.dt = dt;
  ens.obs_times = obs_times;
  ens.obs_steps = observation_steps(obs_times, T, dt);
  ens.members.assign(static_cast<std::size_t>(m), {});

  ModelContext ctx(model);  // shared read-only across workers
  std::vector<char> wanted(static_cast<std::size_t>(M) + 1, 0);
  for (int s : ens.obs_steps) wanted[static_cast<std::size_t>(s)] = 1;

  parallel_for_members(m, threads, [&](int j) {
    RngStream init(master_seed, "init", static_cast<std::uint64_t>(j));
    RngStream wiener(master_seed, "wiener", static_cast<std::uint64_t>(j));
    RngStream jumps(master_seed, "jumps", static_cast<std::uint64_t>(j));
    std::vector<const ModelContext*> ctxs{&ctx};
    std::vector<SpectralField> states{law.sample(ctx.n, init)};
    std::vector<SpectralField> snapshots(
        static_cast<std::size_t>(M) + 1);  // sparse: only wanted slots filled
    run_lockstep(ctxs, states, M, dt, wiener, jumps,
                 static_cast<std::uint64_t>(j),
                 [&](int i, const std::vector<SpectralField>& s) {
                   if (wanted[static_cast<std::size_t>(i)]) {
                     snapshots[static_cast<std::size_t>(i)] = s[0];
                   }
                 });
    std::vector<SpectralField>& out = ens.members[static_cast<std::size_t>(j)];
    out.reserve(ens.obs_steps.size());
    for (int s : ens.obs_steps) {
      out.push_back(snapshots[static_cast<std::size_t>(s)]);
    }
  });
  return ens;
}

namespace {

double padded_gap_sq(const SpectralField& lo, const SpectralField& hi) {
  double acc = 0.0;
  const int nl = lo.size();
  const int nh = hi.size();
  for (int k = 0; k < nh; ++k) {
    const double d = (k < nl ? lo.c[k] : 0.0) - hi.c[k];
    acc += d * d;
  }
  return acc;
}

}  // namespace

std::vector<double> multiresolution_sup_gaps(const ModelSpec& model, int n_hi,
                                             const std::vector<int>& lo_list,
                                             const SpectralField& x0, double T,
                                             double dt,
                                             std::uint64_t master_seed,
                                             std::uint64_t member) {
  if (lo_list.empty()) return {};
  for (int n_lo : lo_list) {
    if (n_lo < 1 || n_lo > n_hi) {
      throw std::invalid_argument("coarse mode counts must lie in [1, n_hi]");
    }
  }
  const int M = num_steps(T, dt);
  ModelContext ctx_hi(model.at_modes(n_hi));
  std::vector<ModelContext> ctx_lo;
  ctx_lo.reserve(lo_list.size());
  for (int n_lo : lo_list) ctx_lo.emplace_back(model.at_modes(n_lo));

  std::vector<const ModelContext*> ctxs{&ctx_hi};
  std::vector<SpectralField> states{pad_to(x0, n_hi)};
  for (std::size_t l = 0; l < lo_list.size(); ++l) {
    ctxs.push_back(&ctx_lo[l]);
    states.push_back(pad_to(x0, lo_list[l]));
  }

  std::vector<double> sup(lo_list.size(), 0.0);
  RngStream wiener(master_seed, "wiener", member);
  RngStream jumps(master_seed, "jumps", member);
  run_lockstep(ctxs, states, M, dt, wiener, jumps, member,
               [&](int, const std::vector<SpectralField>& s) {
                 for (std::size_t l = 0; l < sup.size(); ++l) {
                   sup[l] = std::max(sup[l], padded_gap_sq(s[l + 1], s[0]));
                 }
               });
  return sup;
}

MultiresPair multiresolution_pair(const ModelSpec& model, int n_hi, int n_lo,
                                  const SpectralField& x0, double T, double dt,
                                  std::uint64_t master_seed,
                                  std::uint64_t member) {
  if (n_lo < 1 || n_lo > n_hi) {
    throw std::invalid_argument("coarse mode counts must lie in [1, n_hi]");
  }
  const int M = num_steps(T, dt);
  ModelContext ctx_hi(model.at_modes(n_hi));
  ModelContext ctx_lo(model.at_modes(n_lo));
  std::vector<const ModelContext*> ctxs{&ctx_hi, &ctx_lo};
  std::vector<SpectralField> states{pad_to(x0, n_hi), pad_to(x0, n_lo)};

  MultiresPair mp;
  mp.dt = dt;
  mp.hi.reserve(static_cast<std::size_t>(M) + 1);
  mp.lo.reserve(static_cast<std::size_t>(M) + 1);
  RngStream wiener(master_seed, "wiener", member);
  RngStream jumps(master_seed, "jumps", member);
  run_lockstep(ctxs, states, M, dt, wiener, jumps, member,
               [&](int, const std::vector<SpectralField>& s) {
                 mp.hi.push_back(s[0]);
                 mp.lo.push_back(s[1]);
                 mp.sup_gap_sq =
                     std::max(mp.sup_gap_sq, padded_gap_sq(s[1], s[0]));
               });
  return mp;
}

void parallel_for_members(int m, int threads,
                          const std::function<void(int)>& fn) {
  if (m <= 0) return;
  const int nt = std::max(1, std::min(threads, m));
  if (nt == 1) {
    for (int i = 0; i < m; ++i) fn(i);
    return;
  }
  std::mutex err_mu;
  int err_member = -1;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  const int base = m / nt;
  const int rem = m % nt;
  for (int t = 0; t < nt; ++t) {
    const int begin = t * base + std::min(t, rem);
    const int end = begin + base + (t < rem ? 1 : 0);
    pool.emplace_back([&, begin, end]() {
      for (int i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (err_member < 0 || i < err_member) {
            err_member = i;
            err = std::current_exception();
          }
          return;  // first failure in a block has the block's smallest index
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace spdelab
