#pragma once
// Small numerical kernels shared by the rate-function and statistics code:
// Gauss-Legendre quadrature, monotone root bracketing, 1-d concave
// maximization, the regularized incomplete beta function, and least squares.

#include <functional>
#include <vector>

namespace spdelab {

struct QuadRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// 64-point Gauss-Legendre rule (computed once, cached).
const QuadRule& gauss_legendre_64();

// Integrate f over [a, b] with one 64-point panel.
double integrate_panel(const std::function<double(double)>& f, double a,
                       double b);

// Integrate f over [0, T] with 64-point panels of width ~ln(2)/K
// (capped at 128 panels). Meant for integrands that relax on the 1/K
// time scale; reduces to a single panel when K*T <= ln 2.
double integrate_relaxing(const std::function<double(double)>& f, double T,
                          double K);

// Root of a nonincreasing function on [lo, hi] with d(lo) >= 0 >= d(hi),
// by bisection to relative tolerance ~1e-15.
double bisect_decreasing(const std::function<double(double)>& d, double lo,
                         double hi);

// Maximum of a concave function on [lo, hi] by golden-section search.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol = 1e-12);

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

// One-sided Clopper-Pearson upper confidence bound for a binomial
// proportion with k successes out of m trials.
double clopper_pearson_upper(long long k, long long m, double confidence = 0.95);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x. Needs >= 3 points for a
// finite standard error.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spdelab
