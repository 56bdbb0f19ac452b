#include "spdelab/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdelab {

namespace {

QuadRule make_gauss_legendre(int n) {
  // Newton iteration on P_n with the three-term recurrence.
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const QuadRule& gauss_legendre_64() {
  static const QuadRule rule = make_gauss_legendre(64);
  return rule;
}

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b) {
  const QuadRule& q = gauss_legendre_64();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    acc += q.weights[i] * f(mid + half * q.nodes[i]);
  return acc * half;
}

double integrate_relaxing(const std::function<double(double)>& f, double T,
                          double K) {
  if (T < 0.0) throw std::invalid_argument("integrate_relaxing: T < 0");
  if (T == 0.0) return 0.0;
  double width = (K > 0.0) ? std::numbers::ln2 / K : T;
  int panels = (width >= T) ? 1 : static_cast<int>(std::ceil(T / width));
  if (panels > 128) panels = 128;
  double acc = 0.0;
  double h = T / panels;
  for (int p = 0; p < panels; ++p)
    acc += integrate_panel(f, p * h, (p + 1) * h);
  return acc;
}

double bisect_decreasing(const std::function<double(double)>& d, double lo,
                         double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (d(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 300 && (b - a) > rel_tol * std::max(1.0, std::abs(b));
       ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

namespace {

// Continued fraction for the incomplete beta function (Lentz).
double beta_cf(double a, double b, double x) {
  const double eps = 1e-15, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double clopper_pearson_upper(long long k, long long m, double confidence) {
  if (m <= 0 || k < 0 || k > m)
    throw std::invalid_argument("clopper_pearson_upper: bad counts");
  if (k == m) return 1.0;
  // Upper bound is the `confidence` quantile of Beta(k+1, m-k).
  double a = static_cast<double>(k) + 1.0, b = static_cast<double>(m - k);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < confidence)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double resid = y[i] - fit.intercept - fit.slope * x[i];
      ss += resid * resid;
    }
    fit.slope_se = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  }
  return fit;
}

}  // namespace spdelab
