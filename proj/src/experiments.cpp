#include "spdelab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "spdelab/numerics.hpp"
#include "spdelab/rates.hpp"
#include "spdelab/transport.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

constexpr double kOneSided95 = 1.6448536269514722;  // N(0,1) 95% quantile

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

double gap_sq(const SpectralField& a, const SpectralField& b) {
  const int n = std::max(a.size(), b.size());
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = (k < a.size() ? a.c[k] : 0.0) - (k < b.size() ? b.c[k] : 0.0);
    acc += d * d;
  }
  return acc;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return std::string(buf);
}

void add_check(ExperimentReport& rep, std::string name, double empirical,
               double ci_bound, double theory_bound, std::string outcome,
               std::string note = "") {
  rep.checks.push_back(CheckRecord{std::move(name), empirical, ci_bound,
                                   theory_bound, std::move(outcome),
                                   std::move(note)});
}

void set_overall(ExperimentReport& rep) {
  bool any_fail = false, any_inconclusive = false;
  for (const CheckRecord& c : rep.checks) {
    if (c.outcome == "fail") any_fail = true;
    if (c.outcome == "inconclusive") any_inconclusive = true;
  }
  rep.overall = any_fail ? "fail" : (any_inconclusive ? "inconclusive" : "pass");
}

double require_dissipative(const ModelSpec& model) {
  const double K = compute_K(model);
  if (!(K > 0.0)) {
    throw std::invalid_argument(
        "experiment requires a dissipative model (K > 0); got K = " + fmt(K));
  }
  return K;
}

}  // namespace

std::string bound_outcome(double point_estimate, double ci_upper,
                          double theory_bound) {
  if (ci_upper <= theory_bound) return "pass";
  if (point_estimate > theory_bound) return "fail";
  return "inconclusive";
}

int ExperimentReport::exit_code() const {
  if (overall == "pass") return 0;
  if (overall == "fail") return 2;
  return 3;
}

json ExperimentReport::results_json(const Config& cfg) const {
  json jchecks = json::array();
  for (const CheckRecord& c : checks) {
    jchecks.push_back(json{{"name", c.name},
                           {"empirical", c.empirical},
                           {"ci_bound", c.ci_bound},
                           {"theory_bound", c.theory_bound},
                           {"outcome", c.outcome},
                           {"note", c.note}});
  }
  json jcurves = json::object();
  for (const CurveTable& t : curves) {
    jcurves[t.name] = json{{"columns", t.columns}, {"rows", t.rows}};
  }
  return json{{"kind", kind},        {"overall", overall},
              {"checks", jchecks},   {"curves", jcurves},
              {"extra", extra},      {"config_echo", cfg.to_json()}};
}

std::string ExperimentReport::results_digest(const Config& cfg) const {
  return results_json(cfg).dump();
}

// ---------------------------------------------------------------------------
// contraction: two solutions under the same noise; the mean squared gap must
// shrink at least at the declared fraction of the dissipativity rate K.
// ---------------------------------------------------------------------------

ExperimentReport run_contraction(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "contraction";
  const double K = require_dissipative(cfg.model);
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;
  const int m = run.members;

  const std::vector<int> obs_steps =
      observation_steps(e.obs_times, run.horizon, run.dt);
  const int M = num_steps(run.horizon, run.dt);
  std::vector<int> obs_of_step(static_cast<std::size_t>(M) + 1, -1);
  for (std::size_t oi = 0; oi < obs_steps.size(); ++oi) {
    obs_of_step[static_cast<std::size_t>(obs_steps[oi])] = static_cast<int>(oi);
  }

  const std::size_t n_obs = e.obs_times.size();
  std::vector<std::vector<double>> gapsq(n_obs,
                                         std::vector<double>(m, 0.0));
  const bool keep_fields = m <= 2048;
  std::vector<std::vector<SpectralField>> fx, fy;  // [obs][member]
  if (keep_fields) {
    fx.assign(n_obs, std::vector<SpectralField>(m));
    fy.assign(n_obs, std::vector<SpectralField>(m));
  }

  const SpectralField x0{std::vector<double>(e.x0)};
  const SpectralField y0{std::vector<double>(e.y0)};
  parallel_for_members(m, run.threads, [&](int j) {
    simulate_coupled_observed(
        cfg.model, x0, y0, run.horizon, run.dt, run.seed,
        static_cast<std::uint64_t>(j),
        [&](int i, const SpectralField& a, const SpectralField& b) {
          const int oi = obs_of_step[static_cast<std::size_t>(i)];
          if (oi < 0) return;
          gapsq[static_cast<std::size_t>(oi)][static_cast<std::size_t>(j)] =
              gap_sq(a, b);
          if (keep_fields) {
            fx[static_cast<std::size_t>(oi)][static_cast<std::size_t>(j)] = a;
            fy[static_cast<std::size_t>(oi)][static_cast<std::size_t>(j)] = b;
          }
        });
  });

  const double gap0_sq = gap_sq(x0, y0);
  std::vector<double> mean(n_obs), upper(n_obs);
  for (std::size_t oi = 0; oi < n_obs; ++oi) {
    mean[oi] = mean_of(gapsq[oi]);
    upper[oi] = mean[oi] + kOneSided95 * se_of(gapsq[oi]);
  }

  // Log-linear fit of the mean squared gap over the positive-time points.
  std::vector<double> ft, fy_log;
  for (std::size_t oi = 0; oi < n_obs; ++oi) {
    if (e.obs_times[oi] > 0.0 && mean[oi] > 0.0) {
      ft.push_back(e.obs_times[oi]);
      fy_log.push_back(std::log(mean[oi]));
    }
  }
  const double target_rate = e.rate_fraction * K;
  if (gap0_sq > 0.0 && ft.size() >= 3) {
    const LineFit fit = fit_line(ft, fy_log);
    const double k_hat = -fit.slope;
    const double k_lower = k_hat - kOneSided95 * fit.slope_se;
    std::string outcome = (k_lower >= target_rate)
                              ? "pass"
                              : (k_hat < target_rate ? "fail" : "inconclusive");
    add_check(rep, "gap_rate_fit", k_hat, k_lower, target_rate,
              std::move(outcome),
              "fitted decay rate of the mean squared gap vs " +
                  fmt(e.rate_fraction) + " K");
    rep.extra["fitted_rate"] = k_hat;
    rep.extra["fitted_rate_se"] = fit.slope_se;
  } else {
    add_check(rep, "gap_rate_fit", 0.0, 0.0, target_rate, "info",
              "not enough positive-time observations (or zero initial gap)");
  }

  // Pointwise bound: mean squared gap <= gap(0)^2 exp(-fraction K t).
  double worst_mean_ratio = 0.0, worst_upper_ratio = 0.0;
  for (std::size_t oi = 0; oi < n_obs; ++oi) {
    if (!(e.obs_times[oi] > 0.0)) continue;
    const double bound = gap0_sq * std::exp(-target_rate * e.obs_times[oi]);
    if (bound <= 0.0) continue;
    worst_mean_ratio = std::max(worst_mean_ratio, mean[oi] / bound);
    worst_upper_ratio = std::max(worst_upper_ratio, upper[oi] / bound);
  }
  if (gap0_sq > 0.0) {
    add_check(rep, "mean_gap_bound", worst_mean_ratio, worst_upper_ratio, 1.0,
              bound_outcome(worst_mean_ratio, worst_upper_ratio, 1.0),
              "max over t of mean gap^2 / (gap(0)^2 exp(-" +
                  fmt(e.rate_fraction) + " K t))");
  } else {
    add_check(rep, "mean_gap_bound", 0.0, 0.0, 1.0, "info",
              "zero initial gap; bound is trivial");
  }

  // Optimal-matching cost never exceeds the synchronous-coupling cost.
  CurveTable curve;
  curve.name = "contraction_gap";
  curve.columns = {"t",  "mean_gap_sq",       "upper95_gap_sq",
                   "bound", "w2_sq_empirical", "w1_empirical",
                   "w1_reference"};
  double worst_w2_excess = 0.0;
  double worst_w1_ratio = 0.0;
  for (std::size_t oi = 0; oi < n_obs; ++oi) {
    const double t = e.obs_times[oi];
    const double bound =
        t > 0.0 ? gap0_sq * std::exp(-target_rate * t)
                : gap0_sq;
    double w2sq = std::numeric_limits<double>::quiet_NaN();
    double w1 = std::numeric_limits<double>::quiet_NaN();
    double w1_ref = std::numeric_limits<double>::quiet_NaN();
    if (keep_fields) {
      const double w2 = w_p_empirical(fx[oi], fy[oi], 2);
      w2sq = w2 * w2;
      w1 = w_p_empirical(fx[oi], fy[oi], 1);
      w1_ref = std::sqrt(gap0_sq) * std::exp(-0.5 * K * t);
      if (mean[oi] > 0.0) {
        worst_w2_excess = std::max(worst_w2_excess,
                                   w2sq / mean[oi] - 1.0);
      }
      if (t > 0.0 && w1_ref > 0.0) {
        worst_w1_ratio = std::max(worst_w1_ratio, w1 / w1_ref);
      }
    }
    curve.rows.push_back({t, mean[oi], upper[oi], bound, w2sq, w1, w1_ref});
  }
  if (keep_fields) {
    add_check(rep, "w2_matching_vs_coupling", worst_w2_excess,
              worst_w2_excess, 1e-9,
              worst_w2_excess <= 1e-9 ? "pass" : "fail",
              "optimal matching cost must not exceed the coupled-pair cost");
    add_check(rep, "w1_decay_reference", worst_w1_ratio, worst_w1_ratio, 1.0,
              "info",
              "empirical W1 vs gap(0) exp(-K t / 2); squared-gap rate is the "
              "asserted bound, this line is reference only");
  }
  rep.curves.push_back(std::move(curve));

  rep.extra["K"] = K;
  rep.extra["gap0_sq"] = gap0_sq;
  rep.extra["members"] = m;
  set_overall(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// concentration: time-average of a 1-Lipschitz observable over [0, T]; the
// upward deviation probabilities must respect the path-space rate function
// (strong form) and its closed-chain lower bound (weak form).
// ---------------------------------------------------------------------------

ExperimentReport run_concentration(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "concentration";
  const double K = require_dissipative(cfg.model);
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;
  const double T = run.horizon;
  const int m = run.members;
  const int M = num_steps(T, run.dt);

  RateFunctionSet rfs(cfg.model, T);

  std::vector<double> averages(m, 0.0);
  parallel_for_members(m, run.threads, [&](int j) {
    RngStream init(run.seed, "init", static_cast<std::uint64_t>(j));
    const SpectralField x0 = run.initial.sample(cfg.model.n_modes, init);
    double acc = 0.0;
    simulate_path_observed(
        cfg.model, x0, T, run.dt, run.seed, static_cast<std::uint64_t>(j),
        [&](int i, const SpectralField& x) {
          const double w = (i == 0 || i == M) ? 0.5 : 1.0;  // trapezoid
          acc += w * e.observable.eval(x);
        });
    averages[static_cast<std::size_t>(j)] = acc * run.dt / T;
  });

  const TailMomentStats stats =
      tail_and_moment_stats(averages, e.r_grid, {}, run.seed);

  CurveTable curve;
  curve.name = "concentration_tail";
  curve.columns = {"r",        "exceed_count", "freq",
                   "cp_upper95", "bound_path", "bound_chain"};
  for (const TailRecord& tr : stats.tails) {
    const double bound_path = std::exp(-rfs.alpha_path_at(T * tr.r));
    const double bound_chain =
        std::exp(-T * rfs.gamma_star_at(1.0, K * tr.r));
    curve.rows.push_back({tr.r, static_cast<double>(tr.exceed_count), tr.freq,
                          tr.cp_upper, bound_path, bound_chain});
    const std::string suffix = "_r" + fmt(tr.r);
    if (bound_path < 1.0) {
      add_check(rep, "tail_path" + suffix, tr.freq, tr.cp_upper, bound_path,
                bound_outcome(tr.freq, tr.cp_upper, bound_path),
                "P(avg deviation > r) vs exp(-alpha_path(T r))");
    } else {
      add_check(rep, "tail_path" + suffix, tr.freq, tr.cp_upper, bound_path,
                "info", "bound is vacuous (>= 1) at this r");
    }
    if (bound_chain < 1.0) {
      add_check(rep, "tail_chain" + suffix, tr.freq, tr.cp_upper, bound_chain,
                bound_outcome(tr.freq, tr.cp_upper, bound_chain),
                "P(avg deviation > r) vs exp(-T gamma*_1(K r))");
    } else {
      add_check(rep, "tail_chain" + suffix, tr.freq, tr.cp_upper, bound_chain,
                "info", "bound is vacuous (>= 1) at this r");
    }
  }
  rep.curves.push_back(std::move(curve));

  rep.extra["K"] = K;
  rep.extra["T"] = T;
  rep.extra["members"] = m;
  rep.extra["sample_mean"] = stats.mean;
  set_overall(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// certificates: spaced samples from one long path, compared against the
// invariant-measure transport bound alpha(r) = gamma*_{1/2}(K r) / K through
// both faces of the duality: exp-moments vs exp(alpha*(lambda)) and tails vs
// exp(-alpha(r)).
// ---------------------------------------------------------------------------

ExperimentReport run_certificates(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "certificates";
  const double K = require_dissipative(cfg.model);
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;

  const double needed = e.burn_in + (e.samples - 1) * e.spacing;
  if (run.horizon < needed - 1e-9) {
    throw std::invalid_argument(
        "certificates: horizon shorter than burn_in + (samples-1) * spacing");
  }
  RateFunctionSet rfs(cfg.model, run.horizon);
  const auto alpha_inv = [&](double r) {
    return rfs.gamma_star_at(0.5, K * r) / K;
  };

  const int M = num_steps(run.horizon, run.dt);
  std::vector<int> sample_step(static_cast<std::size_t>(e.samples), 0);
  std::vector<int> sample_of_step(static_cast<std::size_t>(M) + 1, -1);
  for (int i = 0; i < e.samples; ++i) {
    const int s = static_cast<int>(std::llround((e.burn_in + i * e.spacing) / run.dt));
    if (s < 0 || s > M) {
      throw std::invalid_argument("certificates: sample time off the grid");
    }
    sample_step[static_cast<std::size_t>(i)] = s;
    if (sample_of_step[static_cast<std::size_t>(s)] >= 0) {
      throw std::invalid_argument(
          "certificates: spacing shorter than one time step");
    }
    sample_of_step[static_cast<std::size_t>(s)] = i;
  }

  std::vector<double> f_samples(static_cast<std::size_t>(e.samples), 0.0);
  std::vector<SpectralField> fields(static_cast<std::size_t>(e.samples));
  {
    RngStream init(run.seed, "init", 0);
    const SpectralField x0 = run.initial.sample(cfg.model.n_modes, init);
    simulate_path_observed(cfg.model, x0, run.horizon, run.dt, run.seed, 0,
                           [&](int i, const SpectralField& x) {
                             const int si = sample_of_step[static_cast<std::size_t>(i)];
                             if (si < 0) return;
                             f_samples[static_cast<std::size_t>(si)] =
                                 e.observable.eval(x);
                             fields[static_cast<std::size_t>(si)] = x;
                           });
  }

  const TailMomentStats stats = tail_and_moment_stats(
      f_samples, e.r_grid, e.lambda_grid, run.seed, e.bootstrap_replicates);

  CurveTable mcurve;
  mcurve.name = "certificate_moments";
  mcurve.columns = {"lambda", "mean_exp", "boot_upper95", "bound"};
  for (const MomentRecord& mr : stats.moments) {
    const double bound = std::exp(alpha_conjugate(alpha_inv, mr.lambda));
    mcurve.rows.push_back({mr.lambda, mr.mean_exp, mr.boot_upper, bound});
    add_check(rep, "expmoment_lambda" + fmt(mr.lambda), mr.mean_exp,
              mr.boot_upper, bound,
              bound_outcome(mr.mean_exp, mr.boot_upper, bound),
              "E exp(lambda (f - mean)) vs exp(alpha*(lambda)); centered at "
              "the sample mean");
  }
  rep.curves.push_back(std::move(mcurve));

  CurveTable tcurve;
  tcurve.name = "certificate_tails";
  tcurve.columns = {"r", "exceed_count", "freq", "cp_upper95", "bound"};
  for (const TailRecord& tr : stats.tails) {
    const double bound = std::exp(-alpha_inv(tr.r));
    tcurve.rows.push_back({tr.r, static_cast<double>(tr.exceed_count), tr.freq,
                           tr.cp_upper, bound});
    if (bound < 1.0) {
      add_check(rep, "tail_invariant_r" + fmt(tr.r), tr.freq, tr.cp_upper,
                bound, bound_outcome(tr.freq, tr.cp_upper, bound),
                "P(f - mean > r) vs exp(-alpha(r)); samples spaced " +
                    fmt(e.spacing * K) + " relaxation times, treated as "
                    "independent");
    } else {
      add_check(rep, "tail_invariant_r" + fmt(tr.r), tr.freq, tr.cp_upper,
                bound, "info", "bound is vacuous (>= 1) at this r");
    }
  }
  rep.curves.push_back(std::move(tcurve));

  // Serial-dependence diagnostic: lag-1 autocorrelation of the samples.
  {
    const double m0 = stats.mean;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f_samples.size(); ++i) {
      const double d = f_samples[i] - m0;
      den += d * d;
      if (i > 0) num += d * (f_samples[i - 1] - m0);
    }
    const double rho1 = den > 0.0 ? num / den : 0.0;
    const double ess = static_cast<double>(e.samples) *
                       std::max(0.0, 1.0 - rho1) / (1.0 + std::max(0.0, rho1));
    add_check(rep, "effective_sample_size", ess, ess, 0.0, "info",
              "lag-1 autocorrelation " + fmt(rho1));
    rep.extra["lag1_autocorr"] = rho1;
  }

  // Equilibration proxy: transport distance between the first and second
  // half of the sampled states.
  {
    const std::size_t half = fields.size() / 2;
    const std::vector<SpectralField> first(fields.begin(),
                                           fields.begin() + half);
    const std::vector<SpectralField> second(fields.begin() + half,
                                            fields.begin() + 2 * half);
    const double w1 = w_p_empirical(first, second, 1);
    add_check(rep, "w1_split_halves", w1, w1, 0.0, "info",
              "W1 between first- and second-half empirical measures "
              "(equilibration proxy)");
    rep.extra["w1_split_halves"] = w1;
  }

  rep.extra["K"] = K;
  rep.extra["samples"] = e.samples;
  rep.extra["sample_mean"] = stats.mean;
  set_overall(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// galerkin: coarse levels against a fine reference under shared noise; the
// mean sup-in-time squared gap must decrease level over level and the finest
// level must sit below tolerance_ratio times the coarsest.
// ---------------------------------------------------------------------------

ExperimentReport run_galerkin(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "galerkin";
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;
  const int m = run.members;
  const std::size_t L = e.levels.size();

  std::vector<std::vector<double>> sup(L, std::vector<double>(m, 0.0));
  parallel_for_members(m, run.threads, [&](int j) {
    RngStream init(run.seed, "init", static_cast<std::uint64_t>(j));
    const SpectralField x0 = run.initial.sample(e.n_reference, init);
    const std::vector<double> gaps = multiresolution_sup_gaps(
        cfg.model, e.n_reference, e.levels, x0, run.horizon, run.dt, run.seed,
        static_cast<std::uint64_t>(j));
    for (std::size_t l = 0; l < L; ++l) {
      sup[l][static_cast<std::size_t>(j)] = gaps[l];
    }
  });

  std::vector<double> mean(L), lower(L), upper(L);
  CurveTable curve;
  curve.name = "galerkin_errors";
  curve.columns = {"n", "mean_sup_gap_sq", "lower95", "upper95"};
  for (std::size_t l = 0; l < L; ++l) {
    mean[l] = mean_of(sup[l]);
    const double se = se_of(sup[l]);
    lower[l] = mean[l] - kOneSided95 * se;
    upper[l] = mean[l] + kOneSided95 * se;
    curve.rows.push_back({static_cast<double>(e.levels[l]), mean[l], lower[l],
                          upper[l]});
  }
  rep.curves.push_back(std::move(curve));

  for (std::size_t l = 0; l + 1 < L; ++l) {
    const std::string name = "decrease_" + std::to_string(e.levels[l]) +
                             "_to_" + std::to_string(e.levels[l + 1]);
    const double point_ratio = mean[l] > 0.0 ? mean[l + 1] / mean[l] : 0.0;
    const double ci_ratio =
        lower[l] > 0.0 ? upper[l + 1] / lower[l]
                       : std::numeric_limits<double>::infinity();
    std::string outcome = (ci_ratio < 1.0)
                              ? "pass"
                              : (point_ratio >= 1.0 ? "fail" : "inconclusive");
    add_check(rep, name, point_ratio, ci_ratio, 1.0, std::move(outcome),
              "mean sup gap^2 must strictly decrease with the mode count");
  }
  {
    const double point_ratio = mean[0] > 0.0 ? mean[L - 1] / mean[0] : 0.0;
    const double ci_ratio =
        lower[0] > 0.0 ? upper[L - 1] / lower[0]
                       : std::numeric_limits<double>::infinity();
    add_check(rep, "finest_vs_coarsest", point_ratio, ci_ratio,
              e.tolerance_ratio,
              bound_outcome(point_ratio, ci_ratio, e.tolerance_ratio),
              "sup gap^2 at the finest level relative to the coarsest");
  }

  rep.extra["n_reference"] = e.n_reference;
  rep.extra["members"] = m;
  set_overall(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// moments: the normalized sixth-moment / dissipation constants must be
// uniform over the mode count and stable in the sample size.
// ---------------------------------------------------------------------------

ExperimentReport run_moments(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "moments";
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;
  const double T = run.horizon;
  const int m = run.members;

  CurveTable curve;
  curve.name = "moment_constants";
  curve.columns = {"n", "mean_sup_norm6", "c", "c_half"};
  std::vector<double> cs, cs_half;
  for (int n : e.mode_counts) {
    const ModelSpec model_n = cfg.model.at_modes(n);
    require_dissipative(model_n);
    std::vector<double> sup6(static_cast<std::size_t>(m), 0.0);
    std::vector<double> denom6(static_cast<std::size_t>(m), 1.0);
    parallel_for_members(m, run.threads, [&](int j) {
      RngStream init(run.seed, "init", static_cast<std::uint64_t>(j));
      const SpectralField x0 = run.initial.sample(n, init);
      const double x0n2 = hnorm(x0) * hnorm(x0);
      denom6[static_cast<std::size_t>(j)] = 1.0 + x0n2 * x0n2 * x0n2;
      double sup = 0.0;
      simulate_path_observed(model_n, x0, T, run.dt, run.seed,
                             static_cast<std::uint64_t>(j),
                             [&](int, const SpectralField& x) {
                               const double n2 = hnorm(x) * hnorm(x);
                               sup = std::max(sup, n2 * n2 * n2);
                             });
      sup6[static_cast<std::size_t>(j)] = sup;
    });
    // Per-member normalization by 1 + ||x0||^6 (x0 can vary under a random
    // initial law); c is the mean of sup_t ||X_t||^6 / (1 + ||x0||^6).
    double acc = 0.0, acc_half = 0.0;
    const int half = m / 2;
    for (int j = 0; j < m; ++j) {
      const double v = sup6[static_cast<std::size_t>(j)] /
                       denom6[static_cast<std::size_t>(j)];
      acc += v;
      if (j < half) acc_half += v;
    }
    const double c = acc / m;
    const double c_half = half > 0 ? acc_half / half : c;
    cs.push_back(c);
    cs_half.push_back(c_half);
    curve.rows.push_back({static_cast<double>(n), mean_of(sup6), c, c_half});
    add_check(rep, "moment_constant_n" + std::to_string(n), c, c, 0.0, "info",
              "mean of sup_t ||X_t||^6 / (1 + ||x0||^6) over the full grid");
  }
  rep.curves.push_back(std::move(curve));

  const double cmax = *std::max_element(cs.begin(), cs.end());
  const double cmin = *std::min_element(cs.begin(), cs.end());
  const double spread = cmin > 0.0 ? cmax / cmin
                                   : std::numeric_limits<double>::infinity();
  add_check(rep, "uniform_over_modes", spread, spread, e.ratio_cap,
            spread <= e.ratio_cap ? "pass" : "fail",
            "max/min of the moment constant across mode counts");

  double stab = 1.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs_half[i] > 0.0 && cs[i] > 0.0) {
      stab = std::max(stab, std::max(cs[i] / cs_half[i], cs_half[i] / cs[i]));
    }
  }
  add_check(rep, "sample_stability", stab, stab, e.ratio_cap,
            stab <= e.ratio_cap ? "pass" : "fail",
            "full-sample vs half-sample constants");

  rep.extra["members"] = m;
  set_overall(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// rates: evaluate and export the rate-function family, with the built-in
// consistency checks (convexity, monotonicity, chain inequalities,
// stabilization in T).
// ---------------------------------------------------------------------------

ExperimentReport run_rates_export(const Config& cfg) {
  ExperimentReport rep;
  rep.kind = "rates";
  const double K = require_dissipative(cfg.model);
  const ExperimentConfig& e = cfg.experiment;
  const RunConfig& run = cfg.run;
  RateFunctionSet rfs(cfg.model, run.horizon);
  const auto alpha_inv = [&](double r) {
    return rfs.gamma_star_at(0.5, K * r) / K;
  };

  // Clamp the lambda grid below the overflow cap of the jump transform.
  double lambda_hi = e.lambda_max;
  bool clamped = false;
  if (!cfg.model.jumps.empty()) {
    double vmax = 0.0;
    for (double v : cfg.model.jumps.marks) vmax = std::max(vmax, std::abs(v));
    const double g_max = cfg.model.jumps.envelope_scale * vmax;
    if (g_max > 0.0 && lambda_hi > 650.0 / g_max) {
      lambda_hi = 650.0 / g_max;
      clamped = true;
    }
  }

  CurveTable lcurve;
  lcurve.name = "rate_lambda";
  lcurve.columns = {"lambda", "big_lambda", "gamma_half", "gamma_one",
                    "alpha_inv_conjugate"};
  for (int i = 0; i < e.grid_points; ++i) {
    const double lam = lambda_hi * i / (e.grid_points - 1);
    lcurve.rows.push_back({lam, rfs.lambda_of(lam),
                           gamma_a(rfs.jumps, rfs.sigma_bar, 0.5, lam),
                           gamma_a(rfs.jumps, rfs.sigma_bar, 1.0, lam),
                           alpha_conjugate(alpha_inv, lam)});
  }
  rep.curves.push_back(std::move(lcurve));

  CurveTable rcurve;
  rcurve.name = "rate_r";
  rcurve.columns = {"r",          "gamma_star_half", "gamma_star_one",
                    "alpha_T",    "alpha_path",      "alpha_inv",
                    "chain_slack_T", "chain_slack_path"};
  std::vector<double> r_checks;
  for (int i = 1; i < e.grid_points; ++i) {
    const double r = e.r_max * i / (e.grid_points - 1);
    const double gsh = rfs.gamma_star_at(0.5, r);
    const double gso = rfs.gamma_star_at(1.0, r);
    const double aT = rfs.alpha_T_at(r);
    const double aP = rfs.alpha_path_at(r);
    const double slack_T = aT - rfs.gamma_star_at(0.5, K * r) / K;
    const double slack_P =
        aP - rfs.T * rfs.gamma_star_at(1.0, r * K / rfs.T);
    rcurve.rows.push_back({r, gsh, gso, aT, aP, alpha_inv(r), slack_T, slack_P});
    if (r_checks.size() < 9) r_checks.push_back(r);
  }
  rep.curves.push_back(std::move(rcurve));

  for (const RateCheck& rc : rfs.self_check(r_checks)) {
    add_check(rep, rc.name, rc.value, rc.value, 0.0,
              rc.ok ? "pass" : "fail", "built-in rate-function consistency");
  }

  rep.extra["K"] = K;
  rep.extra["sigma_bar"] = rfs.sigma_bar;
  rep.extra["T"] = rfs.T;
  rep.extra["lambda_max_used"] = lambda_hi;
  rep.extra["lambda_clamped"] = clamped;
  set_overall(rep);
  return rep;
}

ExperimentReport run_experiment(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.experiment.kind) {
    case ExperimentKind::contraction:
      rep = run_contraction(cfg);
      break;
    case ExperimentKind::concentration:
      rep = run_concentration(cfg);
      break;
    case ExperimentKind::certificates:
      rep = run_certificates(cfg);
      break;
    case ExperimentKind::galerkin:
      rep = run_galerkin(cfg);
      break;
    case ExperimentKind::moments:
      rep = run_moments(cfg);
      break;
    case ExperimentKind::rates:
      rep = run_rates_export(cfg);
      break;
  }
  const auto t1 = std::chrono::steady_clock::now();
  rep.meta["runtime_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  rep.meta["threads"] = cfg.run.threads;
  return rep;
}

namespace {

void write_csv(const std::string& path, const CurveTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# levy-spde-lab v1\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out << (c ? "," : "") << t.columns[c];
  }
  out << "\n";
  char buf[40];
  for (const std::vector<double>& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace

void write_report(const ExperimentReport& report, const Config& cfg,
                  const std::string& out_dir, const std::string& format) {
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("format must be \"csv\" or \"json\"");
  }
  std::filesystem::create_directories(out_dir);
  {
    json full{{"results", report.results_json(cfg)}, {"meta", report.meta}};
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw std::runtime_error("cannot write " + out_dir + "/report.json");
    out << full.dump(2) << "\n";
  }
  for (const CurveTable& t : report.curves) {
    if (format == "csv") {
      write_csv(out_dir + "/" + t.name + ".csv", t);
    } else {
      json jt{{"columns", t.columns}, {"rows", t.rows}};
      std::ofstream out(out_dir + "/" + t.name + ".json");
      if (!out) {
        throw std::runtime_error("cannot write " + out_dir + "/" + t.name +
                                 ".json");
      }
      out << jt.dump(2) << "\n";
    }
  }
}

}  // namespace spdelab
