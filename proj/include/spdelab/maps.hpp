#pragma once
// Resolution-independent building blocks for model coefficients.
//
// ScalingRule is a per-mode sequence (explicit list, or a power law
// a * k^-p) that can be materialized at any Galerkin level; the same rule
// then describes the model at every resolution, which is what makes
// multiresolution runs comparable.
//
// BoundedCoefMap is a scalar map applied coefficient-wise, with known sup
// bound and Lipschitz constant.

#include <vector>

namespace spdelab {

class ScalingRule {
 public:
  enum class Kind { list, power };

  static ScalingRule list(std::vector<double> values);
  // value(k) = amplitude * k^-exponent for k <= cutoff (0 = no cutoff).
  static ScalingRule power(double amplitude, double exponent, int cutoff = 0);
  static ScalingRule zero() { return list({}); }

  Kind kind() const { return kind_; }
  double value(int k) const;  // k >= 1
  std::vector<double> materialize(int n) const;

  // Upper bound on sup_k |value(k)|.
  double max_abs() const;
  // Upper bound on the l2 norm of the full (infinite) sequence; for power
  // rules the tail is bounded by an integral estimate. Infinite if the
  // sequence is not square-summable.
  double norm_bound() const;

  bool is_zero() const;

  const std::vector<double>& values() const { return values_; }
  double amplitude() const { return amplitude_; }
  double exponent() const { return exponent_; }
  int cutoff() const { return cutoff_; }

 private:
  Kind kind_ = Kind::list;
  std::vector<double> values_;
  double amplitude_ = 0.0, exponent_ = 0.0;
  int cutoff_ = 0;
};

class BoundedCoefMap {
 public:
  enum class Kind { constant, tanh_affine };

  static BoundedCoefMap constant(double value);
  // u -> base + amplitude * tanh(slope * u)
  static BoundedCoefMap tanh_affine(double base, double amplitude, double slope);

  Kind kind() const { return kind_; }
  double value(double u) const;
  double sup_abs() const;    // sup_u |value(u)|
  double lipschitz() const;  // Lipschitz constant of value()
  bool is_constant() const { return kind_ == Kind::constant; }

  double base() const { return base_; }
  double amplitude() const { return amplitude_; }
  double slope() const { return slope_; }

 private:
  Kind kind_ = Kind::constant;
  double base_ = 0.0, amplitude_ = 0.0, slope_ = 0.0;
};

}  // namespace spdelab
