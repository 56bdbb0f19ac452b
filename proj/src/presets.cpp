#include "spdelab/presets.hpp"

namespace spdelab {
namespace presets {

JumpSpec jump_symmetric_pair() {
  return JumpSpec::discrete({-1.0, 1.0}, {0.25, 0.25},
                            ScalingRule::power(0.1, 1.5),
                            BoundedCoefMap::constant(1.0));
}

JumpSpec jump_point_mass() {
  return JumpSpec::discrete({0.5}, {2.0}, ScalingRule::list({1.0}),
                            BoundedCoefMap::constant(1.0),
                            /*envelope_scale=*/-1.0, /*c_g=*/1.0);
}

JumpSpec jump_interval() {
  return JumpSpec::interval_uniform(-0.5, 0.5, 1.0, 16,
                                    ScalingRule::list({0.3, 0.2}),
                                    BoundedCoefMap::constant(1.0));
}

ModelSpec model_affine_demo() {
  ModelSpec m;
  m.n_modes = 8;
  m.reaction = ReactionSpec::affine(ScalingRule::power(1.0, 0.0),
                                    ScalingRule::zero(), /*c_f=*/1.0);
  m.diffusion = DiffusionSpec::bounded_diagonal(ScalingRule::list({1.0}),
                                                BoundedCoefMap::constant(1.0),
                                                /*sigma_bar=*/1.0,
                                                /*c_sigma=*/1.0);
  m.jumps = jump_point_mass();
  return m;
}

ModelSpec model_cubic_demo() {
  ModelSpec m;
  m.n_modes = 8;
  m.reaction = ReactionSpec::cubic(2.0);
  m.diffusion = DiffusionSpec::bounded_diagonal(ScalingRule::list({0.5}),
                                                BoundedCoefMap::constant(1.0),
                                                /*sigma_bar=*/0.5,
                                                /*c_sigma=*/0.5);
  m.jumps = jump_point_mass();
  return m;
}

}  // namespace presets
}  // namespace spdelab
