#pragma once
// Reaction terms f : H -> H.
//
//   affine   f(x)_k = a_k x_k + b_k with diagonal slopes a and offsets b;
//            Lipschitz with constant max_k |a_k|.
//   bounded  Nemytskii map u -> amp * tanh(slope * u) evaluated pointwise on
//            a physical grid; Lipschitz with constant amp * slope.
//   cubic    u -> -u^3 + c1 * u evaluated pointwise on a grid of 3n points,
//            which resolves the cubic of an n-mode field exactly.
//
// The declared constant c_f (or c1 for the cubic) is what enters the
// dissipativity constant K; it must dominate the map's true constant.

#include <memory>

#include "spdelab/maps.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

struct ReactionSpec {
  enum class Kind { affine, bounded, cubic };

  Kind kind = Kind::affine;
  // affine
  ScalingRule slopes = ScalingRule::zero();
  ScalingRule offsets = ScalingRule::zero();
  // bounded
  double amp = 0.0, slope = 0.0;
  // declared constants
  double c_f = 0.0;  // affine / bounded Lipschitz bound
  double c1 = 0.0;   // cubic linear coefficient

  static ReactionSpec affine(ScalingRule slopes, ScalingRule offsets, double c_f);
  static ReactionSpec bounded(double amp, double slope, double c_f);
  static ReactionSpec cubic(double c1);

  // Declared one-sided / Lipschitz constant entering K.
  double dissipativity_constant() const { return kind == Kind::cubic ? c1 : c_f; }
  // Tight Lipschitz constant implied by the parameters (affine/bounded only).
  double lipschitz_tight() const;
};

// Holds the materialized coefficients / grid plan for a fixed mode count.
// Safe to share across threads; eval() writes only through its arguments.
class ReactionEvaluator {
 public:
  ReactionEvaluator(const ReactionSpec& spec, int n_modes);

  int modes() const { return n_; }
  int grid() const;  // 0 for affine

  // scratch must have grid() entries (ignored for affine).
  void eval(const SpectralField& x, SpectralField& out,
            std::vector<double>& scratch) const;
  SpectralField operator()(const SpectralField& x) const;

 private:
  ReactionSpec spec_;
  int n_;
  std::vector<double> a_, b_;
  std::unique_ptr<DstPlan> plan_;
};

// One-shot convenience (builds an evaluator internally).
SpectralField eval_reaction(const ReactionSpec& spec, const SpectralField& x);

}  // namespace spdelab
