#pragma once
// Explicit deviation rate functions for dissipative spectral models.
//
// With lambda_1 = pi^2 the declared constants combine into
//     K = 2 lambda_1 - (2 c_f + c_sigma^2 + c_g)   (affine / bounded reaction)
//     K = 2 lambda_1 - 2 c1 - c_sigma^2 - c_g      (cubic reaction)
// and the jump measure enters through
//     Lambda(l)  = integral of  e^{l Ghat(v)} - l Ghat(v) - 1  d theta(v).
//
// From these, with sbar the declared diffusion bound:
//     gamma_a(l)      = Lambda(l) + a sbar^2 l^2 / 2
//     gamma_a*(r)     = sup_{l >= 0} ( r l - gamma_a(l) )
//     alpha_T(r)      = sup_{l > 0} ( r l - int_0^T Lambda(e^{-K t} l) dt
//                                      - sbar^2 l^2 (1 - e^{-2 K T}) / (4 K) )
//     alpha_path_T(r) = sup_{l > 0} ( r l - int_0^T Lambda(eta(t) l) dt
//                                      - sbar^2 l^2 / 2 * int_0^T eta(t)^2 dt )
// with eta(t) = (1 - e^{-K t}) / K. Both suprema dominate their closed
// gamma*-based lower bounds:
//     alpha_T(r)      >= gamma_{1/2}*(K r) / K
//     alpha_path_T(r) >= T gamma_1*(r K / T)
//
// All suprema are 1-d concave maximizations solved by bisection on the
// (monotone) derivative; time integrals use composite 64-point
// Gauss-Legendre panels on the 1/K relaxation scale. A supremum that is
// genuinely unbounded (no noise at all, r > 0) returns +infinity as an
// explicit marker; the exponential overflowing inside Lambda raises
// std::overflow_error naming the offending argument.

#include <functional>
#include <vector>

#include "spdelab/model.hpp"

namespace spdelab {

double compute_K(const ModelSpec& model);

double big_lambda(const JumpSpec& jumps, double lambda);
double big_lambda_prime(const JumpSpec& jumps, double lambda);

double gamma_a(const JumpSpec& jumps, double sigma_bar, double a, double lambda);
double gamma_star(const JumpSpec& jumps, double sigma_bar, double a, double r);

double alpha_T(const JumpSpec& jumps, double sigma_bar, double K, double T,
               double r);
double alpha_path_T(const JumpSpec& jumps, double sigma_bar, double K, double T,
                    double r);

// (1 - e^{-K t}) / K, the variance kernel of the path functional.
double eta(double K, double t);

// Semi-Legendre transform  alpha*(l) = sup_{r >= 0} ( r l - alpha(r) ).
// Rejects input that is detectably non-convex on the evaluation grid.
double alpha_conjugate(const std::function<double(double)>& alpha,
                       double lambda);

struct RateCheck {
  std::string name;
  bool ok;
  double value;
};

// Bundles the rate functions of one model at horizon T.
struct RateFunctionSet {
  JumpSpec jumps;
  double sigma_bar = 0.0;
  double K = 0.0;
  double T = 0.0;

  RateFunctionSet(const ModelSpec& model, double horizon);

  double lambda_of(double l) const { return big_lambda(jumps, l); }
  double gamma_star_at(double a, double r) const {
    return gamma_star(jumps, sigma_bar, a, r);
  }
  double alpha_T_at(double r) const { return alpha_T(jumps, sigma_bar, K, T, r); }
  double alpha_path_at(double r) const {
    return alpha_path_T(jumps, sigma_bar, K, T, r);
  }

  // Numeric self-checks: Lambda(0) = 0, convexity of Lambda on a grid,
  // gamma* monotonicity, the two chain inequalities on a grid, and
  // stabilization of alpha_T for large T.
  std::vector<RateCheck> self_check(const std::vector<double>& r_grid) const;
};

}  // namespace spdelab
