#include "decoherence/foam.hpp"

#include <cmath>

#include "decoherence/errors.hpp"

namespace decoherence::foam {

void FoamParams::validate() const {
  if (!(n_particles > 0.0) || !(coupling_d > 0.0) || !(planck_mass > 0.0) || !(particle_mass > 0.0)) {
    throw ArgumentError("foam params: all values must be positive");
  }
}

double wormhole_exponent(double n_particles, double coupling_d, double separation, double t) {
  if (!(n_particles > 0.0) || !(coupling_d >= 0.0)) {
    throw ArgumentError("wormhole_exponent: need N > 0 and D >= 0");
  }
  if (!(t >= 0.0)) {
    throw ArgumentError("wormhole_exponent: t must be >= 0");
  }
  return n_particles * coupling_d * separation * separation * t;
}

double wormhole_envelope(double n_particles, double coupling_d, double separation, double t) {
  return std::exp(-wormhole_exponent(n_particles, coupling_d, separation, t));
}

double coupling_estimate(double particle_mass, double planck_mass) {
  if (!(particle_mass > 0.0) || !(planck_mass > 0.0)) {
    throw ArgumentError("coupling_estimate: masses must be positive");
  }
  return std::pow(particle_mass, 6) / std::pow(planck_mass, 3);
}

double delta_h_magnitude(double energy_scale, double planck_mass) {
  if (!(energy_scale > 0.0) || !(planck_mass > 0.0)) {
    throw ArgumentError("delta_h_magnitude: inputs must be positive");
  }
  return energy_scale * energy_scale / planck_mass;
}

}  // namespace decoherence::foam
