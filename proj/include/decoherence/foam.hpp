#pragma once

#include <cstddef>

namespace decoherence::foam {

// Natural-unit conversions (hbar = c = 1).
inline constexpr double kSecondInGeVInverse = 1.519e24;
inline constexpr double kCentimeterInGeVInverse = 5.068e13;
inline constexpr double kPlanckMassGeV = 1.22e19;
inline constexpr double kKaonMassGeV = 0.497648;
inline constexpr double kProtonMassGeV = 0.938;

/// N particles coupled to a wormhole background with coupling D (GeV^3).
/// Order-of-magnitude physics: only scaling laws are meaningful.
struct FoamParams {
  double n_particles = 1.0;
  double coupling_d = 0.0;
  double planck_mass = kPlanckMassGeV;
  double particle_mass = kProtonMassGeV;

  void validate() const;
};

/// N D dX^2 t (dimensionless for D in GeV^3, dX and t in GeV^-1).
double wormhole_exponent(double n_particles, double coupling_d, double separation, double t);

/// Off-diagonal suppression exp(-N D dX^2 t).
double wormhole_envelope(double n_particles, double coupling_d, double separation, double t);

/// D ~ m^6 / M_P^3, one wormhole per Planck volume.
double coupling_estimate(double particle_mass, double planck_mass = kPlanckMassGeV);

/// E^2 / M_P, the largest decoherence scale expected at energy E.
double delta_h_magnitude(double energy_scale, double planck_mass = kPlanckMassGeV);

}  // namespace decoherence::foam
