#pragma once
// A complete model instance: mode count plus reaction, diffusion and jump
// specifications. The declared constants on the parts feed the
// dissipativity constant (see rates.hpp) and every analytic bound.

#include <stdexcept>

#include "spdelab/noise.hpp"
#include "spdelab/reaction.hpp"

namespace spdelab {

struct ModelSpec {
  int n_modes = 0;
  ReactionSpec reaction = ReactionSpec::cubic(0.0);
  DiffusionSpec diffusion;
  JumpSpec jumps = JumpSpec::none();
  double blowup_threshold = 1e6;

  void validate() const {
    if (n_modes < 1) throw std::invalid_argument("ModelSpec: n_modes must be >= 1");
    if (!(blowup_threshold > 0.0))
      throw std::invalid_argument("ModelSpec: blowup_threshold must be > 0");
  }

  // Copy of the spec at a different Galerkin level (rules are
  // resolution-independent, so only n_modes changes).
  ModelSpec at_modes(int n) const {
    ModelSpec m = *this;
    m.n_modes = n;
    m.validate();
    return m;
  }
};

}  // namespace spdelab
