#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "decoherence/core.hpp"
#include "decoherence/lindblad.hpp"

namespace decoherence::cavity {

/// N two-level atoms in one cavity mode. All frequencies share one angular
/// unit (the CLI uses 2*pi*kHz).
struct TavisCummingsParams {
  std::size_t n_atoms = 1;
  double omega0 = 0.0;  ///< atomic transition
  double omega = 0.0;   ///< cavity mode
  double lam = 0.0;     ///< coupling; the vacuum Rabi frequency is 2*lam
  double kappa = 0.0;   ///< cavity leakage
  std::size_t n_max = 1;

  void validate() const;
};

/// H = omega0 S_z + omega a^dagger a + lam (S+ a + a^dagger S-) on the Dicke (S = N/2)
/// ⊗ Fock space, atoms as factor 0. Adds B = sqrt(kappa) a when kappa > 0.
LindbladModel build_tavis_cummings(const TavisCummingsParams& params);

/// Index of |k excitations, n photons> in the Dicke ⊗ Fock basis.
std::size_t tavis_cummings_index(const TavisCummingsParams& params, std::size_t excitations, std::size_t photons);

/// Numerically diagonalized energies of the one-quantum manifold, measured
/// from the ground level |S, -S>|0>, ascending.
std::pair<double, double> single_excitation_energies(const TavisCummingsParams& params);

/// Gap of the one-quantum doublet, computed without the large common offset.
double single_excitation_splitting(const TavisCummingsParams& params);

struct RabiSpectrumParams {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double detuning = 0.0;  ///< omega0 - omega
  std::size_t n_atoms = 1;
  double lam = 0.0;
  double omega0 = 0.0;
  double theta = 0.7853981633974483;  ///< mixing angle, pi/4 at resonance

  void validate() const;
};

/// Absorption doublet Im chi(Omega): two Lorentzians weighted cos^2 theta and
/// sin^2 theta, each normalized to its weight.
std::vector<double> absorption_spectrum(const RabiSpectrumParams& params, std::span<const double> omega_grid);

/// (Omega_-, Omega_+) = omega0 - detuning/2 ∓ sqrt(detuning^2 + 4 N lam^2)/2.
std::pair<double, double> rabi_peak_positions(double omega0, double detuning, double lam, std::size_t n_atoms);

/// Probe phase after time t: omega_ef t + lam^2 n t / detuning.
double probe_phase_shift(double omega_ef, double lam, double n_photons, double detuning, double t);

/// Normalized |e>|alpha e^{i phi}> + |g>|alpha e^{-i phi}> on atom ⊗ field.
Ket cat_state(Complex alpha, double phi, std::size_t n_max);

/// Pointer-state distance 2 sqrt(n_bar) sin(phi).
double cat_distance(double n_bar, double phi);

struct CatParams {
  double n_bar = 0.0;
  double phi = 0.0;     ///< dephasing angle
  double t_r = 1.0;     ///< cavity relaxation time
  double lam = 0.0;
  double detuning = 0.0;
  double t_int = 0.0;   ///< atom-cavity interaction time

  void validate() const;
};

struct CatDistance {
  double exact = 0.0;
  /// 2 n^{3/2} lam^2 t / detuning, present when lam, detuning and t_int are set.
  std::optional<double> small_angle;
};

CatDistance cat_distance(const CatParams& params);

/// 2 T_r / D^2; nullopt when D = 0 (no decoherence).
std::optional<double> decoherence_time(double t_r, double distance);

}  // namespace decoherence::cavity
