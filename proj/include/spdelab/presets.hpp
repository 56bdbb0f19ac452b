#pragma once
// Small canned model pieces shared by tests and the demo runs: three jump
// families (symmetric discrete pair, a single point mass, a smoothed
// interval measure) and two fully assembled demo models whose dissipativity
// constants are round numbers that are easy to verify by hand.

#include "spdelab/model.hpp"

namespace spdelab {
namespace presets {

// marks +-1 with weight 1/4 each, direction 0.1 k^{-3/2}.
JumpSpec jump_symmetric_pair();

// mark measure 2 * delta_{1/2} acting on the first mode; the envelope bound
// at v = 1/2 equals 1/2 and the mean compensator direction is e_1.
JumpSpec jump_point_mass();

// uniform density of total mass 1 on [-1/2, 1/2], materialized on 16 nodes,
// direction (0.3, 0.2) on the first two modes.
JumpSpec jump_interval();

// Affine reaction, declared constants (c_f, sigma_bar, c_sigma, c_g)
// = (1, 1, 1, 1), so K = 2 pi^2 - (2 c_f + c_sigma^2 + c_g) = 2 pi^2 - 4.
ModelSpec model_affine_demo();

// Cubic reaction with c1 = 2, sigma_bar = c_sigma = 1/2, c_g = 1, so
// K = 2 pi^2 - 2 c1 - c_sigma^2 - c_g = 2 pi^2 - 5.25.
ModelSpec model_cubic_demo();

}  // namespace presets
}  // namespace spdelab
