#include "spdelab/rates.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spdelab/numerics.hpp"

namespace spdelab {

namespace {

constexpr double kExpArgMax = 700.0;  // e^x overflows just above this
const double kInf = std::numeric_limits<double>::infinity();

// psi(z) = e^z - z - 1, evaluated without cancellation near 0.
double psi(double z) {
  if (std::abs(z) > 0.5) return std::expm1(z) - z;
  // sum_{k>=2} z^k / k!
  double term = z * z / 2.0, acc = term;
  for (int k = 3; k < 40; ++k) {
    term *= z / k;
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

void check_overflow(const JumpSpec& jumps, double lambda) {
  double gmax = 0.0;
  for (double v : jumps.marks) gmax = std::max(gmax, jumps.envelope(v));
  if (lambda * gmax > kExpArgMax) {
    std::ostringstream msg;
    msg << "big_lambda: exp overflow at lambda = " << lambda
        << " (lambda * max envelope = " << lambda * gmax << ")";
    throw std::overflow_error(msg.str());
  }
}

// Largest lambda where Lambda and its derivative stay finite.
double lambda_cap(const JumpSpec& jumps) {
  double gmax = 0.0;
  for (double v : jumps.marks) gmax = std::max(gmax, jumps.envelope(v));
  if (gmax == 0.0) return kInf;
  return (kExpArgMax - 10.0) / gmax;
}

// Maximize the concave h with h(0) = 0, h'(0) = r >= 0 and nonincreasing
// derivative dh. `cap` bounds the search so dh never overflows; when jumps
// are present the derivative is guaranteed negative well before the cap.
// Returns the maximizer.
double maximize(double r, const std::function<double(double)>& dh, double cap) {
  if (r <= 0.0) return 0.0;
  double hi = std::min(1.0, cap);
  double lo = 0.0;
  while (dh(hi) > 0.0) {
    lo = hi;
    if (hi >= cap) {
      throw std::runtime_error(
          "rate function supremum: derivative still positive at the overflow "
          "cap; deviation scale r is far outside the representable range");
    }
    hi = std::min(hi * 2.0, cap);
  }
  return bisect_decreasing(dh, lo, hi);
}

}  // namespace

double compute_K(const ModelSpec& model) {
  double two_l1 = 2.0 * eigenvalue(1);
  double cs = model.diffusion.c_sigma;
  double cg = model.jumps.empty() ? 0.0 : model.jumps.c_g;
  double K;
  if (model.reaction.kind == ReactionSpec::Kind::cubic)
    K = two_l1 - 2.0 * model.reaction.c1 - cs * cs - cg;
  else
    K = two_l1 - (2.0 * model.reaction.c_f + cs * cs + cg);
  return K;
}

double big_lambda(const JumpSpec& jumps, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("big_lambda: lambda must be >= 0");
  if (jumps.empty() || lambda == 0.0) return 0.0;
  check_overflow(jumps, lambda);
  double acc = 0.0;
  for (std::size_t i = 0; i < jumps.marks.size(); ++i)
    acc += jumps.weights[i] * psi(lambda * jumps.envelope(jumps.marks[i]));
  return acc;
}

double big_lambda_prime(const JumpSpec& jumps, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("big_lambda_prime: lambda must be >= 0");
  if (jumps.empty()) return 0.0;
  check_overflow(jumps, lambda);
  double acc = 0.0;
  for (std::size_t i = 0; i < jumps.marks.size(); ++i) {
    double g = jumps.envelope(jumps.marks[i]);
    acc += jumps.weights[i] * g * std::expm1(lambda * g);
  }
  return acc;
}

double gamma_a(const JumpSpec& jumps, double sigma_bar, double a, double lambda) {
  return big_lambda(jumps, lambda) + a * sigma_bar * sigma_bar * lambda * lambda / 2.0;
}

double gamma_star(const JumpSpec& jumps, double sigma_bar, double a, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("gamma_star: r must be >= 0");
  if (!(a > 0.0)) throw std::invalid_argument("gamma_star: a must be > 0");
  if (!(sigma_bar >= 0.0))
    throw std::invalid_argument("gamma_star: sigma_bar must be >= 0");
  if (r == 0.0) return 0.0;
  bool no_jumps = jumps.empty() || jumps.envelope_scale == 0.0;
  if (no_jumps && sigma_bar == 0.0) return kInf;  // gamma == 0 identically
  double as2 = a * sigma_bar * sigma_bar;
  auto dh = [&](double l) { return r - big_lambda_prime(jumps, l) - as2 * l; };
  double lstar = maximize(r, dh, lambda_cap(jumps));
  return r * lstar - gamma_a(jumps, sigma_bar, a, lstar);
}

double eta(double K, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("eta: t must be >= 0");
  if (K == 0.0) return t;
  return -std::expm1(-K * t) / K;
}

double alpha_T(const JumpSpec& jumps, double sigma_bar, double K, double T,
               double r) {
  if (!(K > 0.0)) throw std::invalid_argument("alpha_T: K must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("alpha_T: T must be > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("alpha_T: r must be >= 0");
  if (r == 0.0) return 0.0;
  bool no_jumps = jumps.empty() || jumps.envelope_scale == 0.0;
  if (no_jumps && sigma_bar == 0.0) return kInf;
  double quad = sigma_bar * sigma_bar * (-std::expm1(-2.0 * K * T)) / (4.0 * K);
  auto d_integral = [&](double l) {
    if (no_jumps) return 0.0;
    return integrate_relaxing(
        [&](double t) {
          double e = std::exp(-K * t);
          return e * big_lambda_prime(jumps, e * l);
        },
        T, K);
  };
  auto dh = [&](double l) { return r - d_integral(l) - 2.0 * quad * l; };
  double lstar = maximize(r, dh, lambda_cap(jumps));
  double integral = no_jumps
                        ? 0.0
                        : integrate_relaxing(
                              [&](double t) {
                                return big_lambda(jumps, std::exp(-K * t) * lstar);
                              },
                              T, K);
  return r * lstar - integral - quad * lstar * lstar;
}

double alpha_path_T(const JumpSpec& jumps, double sigma_bar, double K, double T,
                    double r) {
  if (!(K > 0.0)) throw std::invalid_argument("alpha_path_T: K must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("alpha_path_T: T must be > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("alpha_path_T: r must be >= 0");
  if (r == 0.0) return 0.0;
  bool no_jumps = jumps.empty() || jumps.envelope_scale == 0.0;
  if (no_jumps && sigma_bar == 0.0) return kInf;
  double eta_sq =
      integrate_relaxing([&](double t) { double e = eta(K, t); return e * e; }, T, K);
  double quad = sigma_bar * sigma_bar * eta_sq / 2.0;
  // eta <= 1/K, so the overflow cap scales up by K.
  double cap = lambda_cap(jumps);
  if (std::isfinite(cap)) cap *= K;
  auto d_integral = [&](double l) {
    if (no_jumps) return 0.0;
    return integrate_relaxing(
        [&](double t) {
          double e = eta(K, t);
          return e * big_lambda_prime(jumps, e * l);
        },
        T, K);
  };
  auto dh = [&](double l) { return r - d_integral(l) - 2.0 * quad * l; };
  double lstar = maximize(r, dh, cap);
  double integral =
      no_jumps ? 0.0
               : integrate_relaxing(
                     [&](double t) { return big_lambda(jumps, eta(K, t) * lstar); },
                     T, K);
  return r * lstar - integral - quad * lstar * lstar;
}

double alpha_conjugate(const std::function<double(double)>& alpha,
                       double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("alpha_conjugate: lambda must be >= 0");
  auto obj = [&](double r) { return r * lambda - alpha(r); };
  // Expand until the objective stops improving; collect values for a
  // convexity check along the way.
  std::vector<double> rs{0.0}, vals{alpha(0.0)};
  double best_r = 0.0, best = obj(0.0);
  double r = 1e-3;
  int expansions = 0;
  double prev = best;
  while (expansions < 80) {
    double v = obj(r);
    rs.push_back(r);
    vals.push_back(alpha(r));
    if (v > best) {
      best = v;
      best_r = r;
    }
    if (v < prev && v < best) break;  // past the peak
    prev = v;
    r *= 2.0;
    ++expansions;
  }
  if (expansions >= 80) return kInf;  // objective still rising at huge r
  for (std::size_t i = 2; i < rs.size(); ++i) {
    // alpha restricted to a geometric grid must satisfy the chord bound.
    double t = (rs[i - 1] - rs[i - 2]) / (rs[i] - rs[i - 2]);
    double chord = (1.0 - t) * vals[i - 2] + t * vals[i];
    double scale = std::max({1.0, std::abs(vals[i]), std::abs(vals[i - 2])});
    if (vals[i - 1] > chord + 1e-7 * scale)
      throw std::invalid_argument("alpha_conjugate: input not convex on grid");
  }
  double lo = best_r / 4.0, hi = std::min(best_r * 4.0 + 1e-3, rs.back());
  double rstar = golden_max(obj, lo, hi);
  return std::max(best, obj(rstar));
}

RateFunctionSet::RateFunctionSet(const ModelSpec& model, double horizon)
    : jumps(model.jumps),
      sigma_bar(model.diffusion.sigma_bar),
      K(compute_K(model)),
      T(horizon) {
  if (!(K > 0.0))
    throw std::invalid_argument("RateFunctionSet: model is not dissipative (K <= 0)");
  if (!(T > 0.0)) throw std::invalid_argument("RateFunctionSet: horizon must be > 0");
}

std::vector<RateCheck> RateFunctionSet::self_check(
    const std::vector<double>& r_grid) const {
  std::vector<RateCheck> checks;
  checks.push_back({"lambda_at_zero", big_lambda(jumps, 0.0) == 0.0, 0.0});

  // Midpoint convexity of Lambda on a lambda grid.
  bool convex = true;
  double cap = std::min(lambda_cap(jumps), 50.0);
  for (int i = 0; i + 2 < 33; ++i) {
    double l0 = cap * i / 32.0, l2 = cap * (i + 2) / 32.0;
    double mid = 0.5 * (big_lambda(jumps, l0) + big_lambda(jumps, l2));
    double at = big_lambda(jumps, 0.5 * (l0 + l2));
    if (at > mid + 1e-10 * std::max(1.0, mid)) convex = false;
  }
  checks.push_back({"lambda_convex_grid", convex, 0.0});

  bool monotone = true;
  double prev = 0.0;
  double worst_chain = kInf;
  for (double r : r_grid) {
    double g = gamma_star_at(0.5, r);
    if (g < prev - 1e-12) monotone = false;
    prev = g;
    double aT = alpha_T_at(r);
    double aP = alpha_path_at(r);
    double chain1 = aT - gamma_star_at(0.5, K * r) / K;
    double chain2 = aP - T * gamma_star_at(1.0, r * K / T);
    worst_chain = std::min({worst_chain, chain1, chain2});
  }
  checks.push_back({"gamma_star_monotone", monotone, 0.0});
  checks.push_back({"chain_slack_min", worst_chain >= -1e-8, worst_chain});

  // alpha_T stabilizes as T grows (the large-T limit exists).
  double rprobe = r_grid.empty() ? 1.0 : r_grid[r_grid.size() / 2];
  double t1 = 20.0 / K, t2 = 40.0 / K;
  double a1 = alpha_T(jumps, sigma_bar, K, t1, rprobe);
  double a2 = alpha_T(jumps, sigma_bar, K, t2, rprobe);
  double drift = std::abs(a2 - a1) / std::max(1e-300, std::abs(a1));
  checks.push_back({"alpha_T_stabilizes", drift < 1e-6, drift});
  return checks;
}

}  // namespace spdelab
