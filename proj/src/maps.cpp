#include "spdelab/maps.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdelab {

ScalingRule ScalingRule::list(std::vector<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("ScalingRule: non-finite entry");
  ScalingRule r;
  r.kind_ = Kind::list;
  r.values_ = std::move(values);
  return r;
}

ScalingRule ScalingRule::power(double amplitude, double exponent, int cutoff) {
  if (!std::isfinite(amplitude) || !std::isfinite(exponent))
    throw std::invalid_argument("ScalingRule: non-finite parameter");
  if (exponent < 0.0)
    throw std::invalid_argument("ScalingRule: power exponent must be >= 0");
  if (cutoff < 0) throw std::invalid_argument("ScalingRule: cutoff must be >= 0");
  ScalingRule r;
  r.kind_ = Kind::power;
  r.amplitude_ = amplitude;
  r.exponent_ = exponent;
  r.cutoff_ = cutoff;
  return r;
}

double ScalingRule::value(int k) const {
  if (k < 1) throw std::invalid_argument("ScalingRule: k must be >= 1");
  if (kind_ == Kind::list) {
    if (static_cast<std::size_t>(k) > values_.size()) return 0.0;
    return values_[k - 1];
  }
  if (cutoff_ > 0 && k > cutoff_) return 0.0;
  return amplitude_ * std::pow(static_cast<double>(k), -exponent_);
}

std::vector<double> ScalingRule::materialize(int n) const {
  std::vector<double> out(n);
  for (int k = 1; k <= n; ++k) out[k - 1] = value(k);
  return out;
}

double ScalingRule::max_abs() const {
  if (kind_ == Kind::list) {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  return std::abs(amplitude_);  // k^-p peaks at k = 1
}

double ScalingRule::norm_bound() const {
  if (kind_ == Kind::list) {
    double acc = 0.0;
    for (double v : values_) acc += v * v;
    return std::sqrt(acc);
  }
  if (amplitude_ == 0.0) return 0.0;
  if (cutoff_ > 0) {
    double acc = 0.0;
    for (int k = 1; k <= cutoff_; ++k) {
      double v = value(k);
      acc += v * v;
    }
    return std::sqrt(acc);
  }
  if (2.0 * exponent_ <= 1.0) return std::numeric_limits<double>::infinity();
  // Partial sum plus integral bound on the tail: sum_{k>K} k^-2p <= K^{1-2p}/(2p-1).
  const int K = 4096;
  double acc = 0.0;
  for (int k = 1; k <= K; ++k) acc += std::pow(static_cast<double>(k), -2.0 * exponent_);
  acc += std::pow(static_cast<double>(K), 1.0 - 2.0 * exponent_) / (2.0 * exponent_ - 1.0);
  return std::abs(amplitude_) * std::sqrt(acc);
}

bool ScalingRule::is_zero() const {
  if (kind_ == Kind::power) return amplitude_ == 0.0;
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

BoundedCoefMap BoundedCoefMap::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("BoundedCoefMap: non-finite");
  BoundedCoefMap m;
  m.kind_ = Kind::constant;
  m.base_ = value;
  return m;
}

BoundedCoefMap BoundedCoefMap::tanh_affine(double base, double amplitude,
                                           double slope) {
  if (!std::isfinite(base) || !std::isfinite(amplitude) || !std::isfinite(slope))
    throw std::invalid_argument("BoundedCoefMap: non-finite");
  BoundedCoefMap m;
  m.kind_ = Kind::tanh_affine;
  m.base_ = base;
  m.amplitude_ = amplitude;
  m.slope_ = slope;
  return m;
}

double BoundedCoefMap::value(double u) const {
  if (kind_ == Kind::constant) return base_;
  return base_ + amplitude_ * std::tanh(slope_ * u);
}

double BoundedCoefMap::sup_abs() const {
  if (kind_ == Kind::constant) return std::abs(base_);
  return std::abs(base_) + std::abs(amplitude_);
}

double BoundedCoefMap::lipschitz() const {
  if (kind_ == Kind::constant) return 0.0;
  return std::abs(amplitude_ * slope_);
}

}  // namespace spdelab
