#pragma once
// Empirical transport distances and deviation statistics.
//
// w_p_empirical solves the exact assignment problem between two equal-size
// samples (shortest augmenting path, O(m^3)), so small-m results can be
// checked against brute-force enumeration. Sizes above the cap are rejected
// rather than silently approximated; subsample instead.

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/rng.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

// Minimal total cost of a perfect matching on a square cost matrix.
double assignment_cost_min(const std::vector<std::vector<double>>& cost);

// p-Wasserstein distance (p = 1 or 2) between uniform empirical measures of
// equal size in the L2 norm. Throws on size mismatch or size > cap.
double w_p_empirical(const std::vector<SpectralField>& a,
                     const std::vector<SpectralField>& b, int p,
                     int size_cap = 2048);

// L1-in-time path distance: integral over the shared time grid of the L2
// gap, by the trapezoid rule. Both paths must have the same dt and length.
double path_distance_L1(const std::vector<SpectralField>& a,
                        const std::vector<SpectralField>& b, double dt);

struct LipschitzObservable {
  enum class Kind { linear, distance };
  Kind kind = Kind::linear;
  SpectralField ref;  // unit direction, or distance anchor
  std::string label;

  double eval(const SpectralField& x) const;

  // <phi, x> with phi normalized to unit norm; rejects the zero vector.
  static LipschitzObservable linear(const SpectralField& phi, std::string label);
  // x -> ||x - anchor||, always 1-Lipschitz.
  static LipschitzObservable distance(const SpectralField& anchor,
                                      std::string label);
};

struct TailRecord {
  double r;
  long long exceed_count;
  double freq;
  double cp_upper;  // one-sided 95% Clopper-Pearson
};

struct MomentRecord {
  double lambda;
  double mean_exp;
  double boot_upper;  // one-sided 95% bootstrap percentile
};

struct TailMomentStats {
  double mean = 0.0;
  long long n = 0;
  std::vector<TailRecord> tails;      // exceedance of (sample - mean) > r
  std::vector<MomentRecord> moments;  // mean exp(lambda (sample - mean))
};

TailMomentStats tail_and_moment_stats(const std::vector<double>& samples,
                                      const std::vector<double>& r_grid,
                                      const std::vector<double>& lambda_grid,
                                      std::uint64_t boot_seed,
                                      int boot_replicates = 400);

}  // namespace spdelab
