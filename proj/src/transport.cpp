#include "spdelab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdelab/numerics.hpp"

namespace spdelab {

double assignment_cost_min(const std::vector<std::vector<double>>& cost) {
  int m = static_cast<int>(cost.size());
  if (m == 0) throw std::invalid_argument("assignment_cost_min: empty matrix");
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != m)
      throw std::invalid_argument("assignment_cost_min: matrix not square");

  // Jonker-Volgenant style shortest augmenting paths with potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= m; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= m; ++j) total += cost[match[j] - 1][j - 1];
  return total;
}

namespace {

double l2_gap(const SpectralField& x, const SpectralField& y) {
  int n = std::max(x.size(), y.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = (i < x.size() ? x[i] : 0.0) - (i < y.size() ? y[i] : 0.0);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double w_p_empirical(const std::vector<SpectralField>& a,
                     const std::vector<SpectralField>& b, int p, int size_cap) {
  if (a.size() != b.size())
    throw std::invalid_argument(
        "w_p_empirical: sample sizes differ; subsample to equal sizes first");
  if (a.empty()) throw std::invalid_argument("w_p_empirical: empty samples");
  if (p != 1 && p != 2) throw std::invalid_argument("w_p_empirical: p must be 1 or 2");
  int m = static_cast<int>(a.size());
  if (m > size_cap)
    throw std::invalid_argument(
        "w_p_empirical: sample size exceeds cap; subsample before matching");
  std::vector<std::vector<double>> cost(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double d = l2_gap(a[i], b[j]);
      cost[i][j] = (p == 1) ? d : d * d;
    }
  double total = assignment_cost_min(cost);
  double mean = total / m;
  return (p == 1) ? mean : std::sqrt(mean);
}

double path_distance_L1(const std::vector<SpectralField>& a,
                        const std::vector<SpectralField>& b, double dt) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("path_distance_L1: paths must share the grid");
  if (!(dt > 0.0)) throw std::invalid_argument("path_distance_L1: dt must be > 0");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    acc += 0.5 * (l2_gap(a[i], b[i]) + l2_gap(a[i + 1], b[i + 1])) * dt;
  return acc;
}

double LipschitzObservable::eval(const SpectralField& x) const {
  if (kind == Kind::linear) {
    int n = std::min(x.size(), ref.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += ref[i] * x[i];
    return acc;
  }
  return l2_gap(x, ref);
}

LipschitzObservable LipschitzObservable::linear(const SpectralField& phi,
                                                std::string label) {
  double norm = hnorm(phi);
  if (!(norm > 0.0))
    throw std::invalid_argument("LipschitzObservable: zero direction");
  LipschitzObservable o;
  o.kind = Kind::linear;
  o.ref = phi;
  for (double& c : o.ref.c) c /= norm;
  o.label = std::move(label);
  return o;
}

LipschitzObservable LipschitzObservable::distance(const SpectralField& anchor,
                                                  std::string label) {
  LipschitzObservable o;
  o.kind = Kind::distance;
  o.ref = anchor;
  o.label = std::move(label);
  return o;
}

TailMomentStats tail_and_moment_stats(const std::vector<double>& samples,
                                      const std::vector<double>& r_grid,
                                      const std::vector<double>& lambda_grid,
                                      std::uint64_t boot_seed,
                                      int boot_replicates) {
  if (samples.size() < 2)
    throw std::invalid_argument("tail_and_moment_stats: need >= 2 samples");
  TailMomentStats out;
  out.n = static_cast<long long>(samples.size());
  double acc = 0.0;
  for (double s : samples) acc += s;
  out.mean = acc / static_cast<double>(out.n);

  for (double r : r_grid) {
    long long k = 0;
    for (double s : samples)
      if (s - out.mean > r) ++k;
    TailRecord rec;
    rec.r = r;
    rec.exceed_count = k;
    rec.freq = static_cast<double>(k) / static_cast<double>(out.n);
    rec.cp_upper = clopper_pearson_upper(k, out.n);
    out.tails.push_back(rec);
  }

  if (lambda_grid.empty()) return out;
  std::size_t n = samples.size();
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = samples[i] - out.mean;
  for (double lam : lambda_grid) {
    std::vector<double> expv(n);
    double mean_exp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      expv[i] = std::exp(lam * centered[i]);
      mean_exp += expv[i];
    }
    mean_exp /= static_cast<double>(n);
    // Percentile bootstrap over resampled means.
    RngStream rng(boot_seed, "bootstrap", static_cast<std::uint64_t>(
                                              std::llround(lam * 1e6)) ^ n);
    std::vector<double> boot(boot_replicates);
    for (int b = 0; b < boot_replicates; ++b) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        m += expv[rng.next_u64() % n];
      boot[b] = m / static_cast<double>(n);
    }
    std::sort(boot.begin(), boot.end());
    int idx = std::min<int>(boot_replicates - 1,
                            static_cast<int>(std::ceil(0.95 * boot_replicates)));
    MomentRecord rec;
    rec.lambda = lam;
    rec.mean_exp = mean_exp;
    rec.boot_upper = boot[idx];
    out.moments.push_back(rec);
  }
  return out;
}

}  // namespace spdelab
