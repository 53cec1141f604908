#pragma once

#include "bwlab/controversy.hpp"

namespace fixtures {

// Spectrum {+1.0, -1.2}, ones presets.
inline bwlab::ModelConfig dim4(double coulomb = 0.1, double delta = 0.05) {
  bwlab::ModelConfig c;
  c.positive_energies = {1.0};
  c.negative_energies = {-1.2};
  c.coulomb.scale = coulomb;
  c.delta.scale = delta;
  return c;
}

inline double max_abs(const bwlab::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace fixtures
