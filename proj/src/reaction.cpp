#include "spdelab/reaction.hpp"

#include <cmath>
#include <stdexcept>

namespace spdelab {

ReactionSpec ReactionSpec::affine(ScalingRule slopes, ScalingRule offsets,
                                  double c_f) {
  if (!(c_f >= 0.0)) throw std::invalid_argument("ReactionSpec: c_f must be >= 0");
  if (slopes.max_abs() > c_f * (1.0 + 1e-12))
    throw std::invalid_argument("ReactionSpec: declared c_f below max slope");
  ReactionSpec s;
  s.kind = Kind::affine;
  s.slopes = std::move(slopes);
  s.offsets = std::move(offsets);
  s.c_f = c_f;
  return s;
}

ReactionSpec ReactionSpec::bounded(double amp, double slope, double c_f) {
  if (!(amp >= 0.0) || !(slope >= 0.0))
    throw std::invalid_argument("ReactionSpec: bounded map needs amp, slope >= 0");
  if (!(c_f >= 0.0)) throw std::invalid_argument("ReactionSpec: c_f must be >= 0");
  if (amp * slope > c_f * (1.0 + 1e-12))
    throw std::invalid_argument("ReactionSpec: declared c_f below amp*slope");
  ReactionSpec s;
  s.kind = Kind::bounded;
  s.amp = amp;
  s.slope = slope;
  s.c_f = c_f;
  return s;
}

ReactionSpec ReactionSpec::cubic(double c1) {
  if (!std::isfinite(c1)) throw std::invalid_argument("ReactionSpec: c1 non-finite");
  ReactionSpec s;
  s.kind = Kind::cubic;
  s.c1 = c1;
  return s;
}

double ReactionSpec::lipschitz_tight() const {
  switch (kind) {
    case Kind::affine:
      return slopes.max_abs();
    case Kind::bounded:
      return amp * slope;
    case Kind::cubic:
      break;
  }
  throw std::logic_error("lipschitz_tight: cubic reaction is not Lipschitz");
}

ReactionEvaluator::ReactionEvaluator(const ReactionSpec& spec, int n_modes)
    : spec_(spec), n_(n_modes) {
  if (n_modes < 1)
    throw std::invalid_argument("ReactionEvaluator: n_modes must be >= 1");
  if (spec_.kind == ReactionSpec::Kind::affine) {
    a_ = spec_.slopes.materialize(n_);
    b_ = spec_.offsets.materialize(n_);
  } else {
    // 3n grid points: products of three n-mode sine series are band-limited
    // to 3n modes, so the cubic is dealiased exactly. The bounded map shares
    // the plan; its Lipschitz bound holds on any grid >= n.
    plan_ = std::make_unique<DstPlan>(n_, 3 * n_);
  }
}

int ReactionEvaluator::grid() const { return plan_ ? plan_->grid() : 0; }

void ReactionEvaluator::eval(const SpectralField& x, SpectralField& out,
                             std::vector<double>& scratch) const {
  if (x.size() != n_)
    throw std::invalid_argument("ReactionEvaluator: field size mismatch");
  if (out.size() != n_) out = SpectralField::zero(n_);

  if (spec_.kind == ReactionSpec::Kind::affine) {
    for (int i = 0; i < n_; ++i) out[i] = a_[i] * x[i] + b_[i];
    return;
  }

  if (static_cast<int>(scratch.size()) != plan_->grid())
    scratch.resize(plan_->grid());
  plan_->to_grid(x.c.data(), scratch.data());
  if (spec_.kind == ReactionSpec::Kind::cubic) {
    for (double& u : scratch) u = -u * u * u + spec_.c1 * u;
  } else {
    for (double& u : scratch) u = spec_.amp * std::tanh(spec_.slope * u);
  }
  plan_->to_coeff(scratch.data(), out.c.data());
  if (!out.is_finite())
    throw std::runtime_error("eval_reaction: non-finite value (state blew up?)");
}

SpectralField ReactionEvaluator::operator()(const SpectralField& x) const {
  SpectralField out = SpectralField::zero(n_);
  std::vector<double> scratch;
  eval(x, out, scratch);
  return out;
}

SpectralField eval_reaction(const ReactionSpec& spec, const SpectralField& x) {
  if (x.size() < 1) throw std::invalid_argument("eval_reaction: empty field");
  if (!x.is_finite()) throw std::invalid_argument("eval_reaction: non-finite input");
  ReactionEvaluator ev(spec, x.size());
  return ev(x);
}

}  // namespace spdelab
