#include "spdelab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdelab {

bool SpectralField::is_finite() const {
  for (double v : c)
    if (!std::isfinite(v)) return false;
  return true;
}

double eigenvalue(int k) {
  if (k < 1) throw std::invalid_argument("eigenvalue: k must be >= 1");
  double kpi = k * std::numbers::pi;
  return kpi * kpi;
}

double hnorm(const SpectralField& x, double theta) {
  double acc = 0.0;
  if (theta == 0.0) {
    for (double v : x.c) acc += v * v;
  } else if (theta == 1.0) {
    for (int i = 0; i < x.size(); ++i) acc += eigenvalue(i + 1) * x[i] * x[i];
  } else if (theta == -1.0) {
    for (int i = 0; i < x.size(); ++i) acc += x[i] * x[i] / eigenvalue(i + 1);
  } else {
    for (int i = 0; i < x.size(); ++i)
      acc += std::pow(eigenvalue(i + 1), theta) * x[i] * x[i];
  }
  return std::sqrt(acc);
}

SpectralField project(const SpectralField& x, int n) {
  if (n < 0) throw std::invalid_argument("project: n must be >= 0");
  int keep = std::min(n, x.size());
  return SpectralField(std::vector<double>(x.c.begin(), x.c.begin() + keep));
}

SpectralField pad_to(const SpectralField& x, int n) {
  if (n < 0) throw std::invalid_argument("pad_to: n must be >= 0");
  std::vector<double> out(n, 0.0);
  int keep = std::min(n, x.size());
  for (int i = 0; i < keep; ++i) out[i] = x[i];
  return SpectralField(std::move(out));
}

double semigroup_factor(int k, double t) {
  if (t < 0.0) throw std::invalid_argument("semigroup_factor: t must be >= 0");
  return std::exp(-eigenvalue(k) * t);
}

DstPlan::DstPlan(int n_modes, int grid_size) : n_(n_modes), grid_(grid_size) {
  if (n_modes < 1) throw std::invalid_argument("DstPlan: n_modes must be >= 1");
  if (grid_size < n_modes)
    throw std::invalid_argument("DstPlan: grid_size < n_modes loses information");
  table_.resize(static_cast<std::size_t>(grid_) * n_);
  const double sqrt2 = std::numbers::sqrt2;
  for (int j = 0; j < grid_; ++j) {
    double xi = static_cast<double>(j + 1) / (grid_ + 1);
    for (int k = 0; k < n_; ++k)
      table_[static_cast<std::size_t>(j) * n_ + k] =
          sqrt2 * std::sin((k + 1) * std::numbers::pi * xi);
  }
}

void DstPlan::to_grid(const double* coeff, double* grid_vals) const {
  for (int j = 0; j < grid_; ++j) {
    const double* row = &table_[static_cast<std::size_t>(j) * n_];
    double acc = 0.0;
    for (int k = 0; k < n_; ++k) acc += row[k] * coeff[k];
    grid_vals[j] = acc;
  }
}

void DstPlan::to_coeff(const double* grid_vals, double* coeff) const {
  // Discrete orthogonality: sum_j e_k(xi_j) e_l(xi_j) = (N+1) delta_kl.
  double scale = 1.0 / (grid_ + 1);
  for (int k = 0; k < n_; ++k) coeff[k] = 0.0;
  for (int j = 0; j < grid_; ++j) {
    const double* row = &table_[static_cast<std::size_t>(j) * n_];
    double v = grid_vals[j] * scale;
    for (int k = 0; k < n_; ++k) coeff[k] += row[k] * v;
  }
}

std::vector<double> sine_transform(const SpectralField& x, int grid_size) {
  if (x.size() < 1) throw std::invalid_argument("sine_transform: empty field");
  if (grid_size < x.size())
    throw std::invalid_argument("sine_transform: grid_size < n loses information");
  DstPlan plan(x.size(), grid_size);
  std::vector<double> out(grid_size);
  plan.to_grid(x.c.data(), out.data());
  return out;
}

SpectralField inverse_sine_transform(const std::vector<double>& samples,
                                     int n_modes) {
  if (n_modes < 1)
    throw std::invalid_argument("inverse_sine_transform: n_modes must be >= 1");
  if (static_cast<std::size_t>(n_modes) > samples.size())
    throw std::invalid_argument(
        "inverse_sine_transform: n_modes exceeds sample count");
  DstPlan plan(n_modes, static_cast<int>(samples.size()));
  SpectralField out = SpectralField::zero(n_modes);
  plan.to_coeff(samples.data(), out.c.data());
  return out;
}

}  // namespace spdelab
