#pragma once
// Sine eigenbasis on (0,1): e_k(xi) = sqrt(2) sin(k pi xi) with Dirichlet
// eigenvalue lambda_k = (k pi)^2. A SpectralField stores the coefficients of
// a finite expansion; c[i] multiplies e_{i+1}.

#include <vector>

namespace spdelab {

struct SpectralField {
  std::vector<double> c;

  SpectralField() = default;
  explicit SpectralField(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  static SpectralField zero(int n) { return SpectralField(std::vector<double>(n, 0.0)); }

  int size() const { return static_cast<int>(c.size()); }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  bool is_finite() const;
};

double eigenvalue(int k);  // (k pi)^2, k >= 1

// Fractional-power Sobolev norm: ( sum_k lambda_k^theta x_k^2 )^{1/2}.
// theta = 0 is the L2 norm, theta = 1 the V norm, theta = -1 the V* norm.
double hnorm(const SpectralField& x, double theta = 0.0);

// Truncation P_n: keeps the first min(n, size) coefficients.
SpectralField project(const SpectralField& x, int n);

// Zero-pad (or truncate) to exactly n coefficients.
SpectralField pad_to(const SpectralField& x, int n);

// exp(-lambda_k t); t must be >= 0.
double semigroup_factor(int k, double t);

// Dense sine-transform plan between n coefficients and values at the
// interior grid xi_j = j/(N+1), j = 1..N. For band-limited data (n <= N)
// the two directions are exact inverses, and coefficients <-> samples is an
// isometry up to the factor sqrt(N+1).
class DstPlan {
 public:
  DstPlan(int n_modes, int grid_size);

  int modes() const { return n_; }
  int grid() const { return grid_; }

  void to_grid(const double* coeff, double* grid_vals) const;
  void to_coeff(const double* grid_vals, double* coeff) const;

 private:
  int n_, grid_;
  std::vector<double> table_;  // grid_ rows of n_ entries: sqrt(2) sin(k pi xi_j)
};

// Samples of the expansion at the interior grid points. Requires
// grid_size >= x.size(); fewer points would lose information.
std::vector<double> sine_transform(const SpectralField& x, int grid_size);

// L2 projection of grid samples onto the first n_modes coefficients
// (the exact inverse of sine_transform for band-limited data).
// Requires n_modes <= samples.size().
SpectralField inverse_sine_transform(const std::vector<double>& samples,
                                     int n_modes);

}  // namespace spdelab
