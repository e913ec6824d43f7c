#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "decoherence/core.hpp"
#include "decoherence/lindblad.hpp"

namespace decoherence {

/// Euler-Maruyama step size and the master seed every trajectory stream is
/// derived from.
struct NoiseSpec {
  std::uint64_t master_seed = 1;
  double dt = 1e-3;
};

/// Quantum-state-diffusion unraveling of a LindbladModel with Hermitian h_eff.
///
/// The master equation carries its operators as 2 B rho B^dagger - {B^dagger B, rho},
/// so each channel is unraveled with L = sqrt(2) B, for which
///
///   |dpsi> = -i H |psi> dt + sum_m (<L_m^dagger> L_m - L_m^dagger L_m / 2 - |<L_m>|^2 / 2) |psi> dt
///            + sum_m (L_m - <L_m>) |psi> dxi_m,   E[dxi dxi*] = dt, E[dxi dxi] = 0
///
/// averages to the same rho(t) that `evolve` produces.
class QsdUnraveling {
 public:
  explicit QsdUnraveling(const LindbladModel& model);

  const LindbladModel& model() const noexcept { return model_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }

  /// Deterministic part of |dpsi>/dt.
  Vector drift(const Vector& psi) const;
  /// (L_m - <L_m>)|psi> for every channel m.
  std::vector<Vector> diffusion(const Vector& psi) const;

  /// One Euler-Maruyama step, renormalized. Throws StepFailure on non-finite
  /// amplitudes.
  Vector step(const Vector& psi, double dt, std::span<const Complex> noise) const;

 private:
  LindbladModel model_;
  std::vector<Matrix> channels_;
  std::vector<Matrix> channel_products_;
};

/// Functional form of QsdUnraveling::step.
Ket qsd_step(const Ket& psi, const LindbladModel& model, double dt, std::span<const Complex> noise_draws);

struct Trajectory {
  /// Noise stream identifier.
  std::uint64_t seed = 0;
  std::vector<double> times;
  /// Unit-norm amplitudes at each grid point.
  std::vector<Vector> amplitudes;
  HilbertSpace space{{1}};

  Ket state(std::size_t k) const { return Ket(amplitudes.at(k), space); }
};

struct Ensemble {
  std::vector<Trajectory> trajectories;
  std::vector<DensityMatrix> mean_states;
};

struct EnsembleOptions {
  /// 0 means default_thread_count().
  std::size_t threads = 0;
  /// Drop per-trajectory states after reduction.
  bool keep_trajectories = true;
};

/// M independent trajectories and their mean projector at every grid point.
/// The result depends only on (model, psi0, times, M, noise); the thread
/// count and schedule never change a bit of it.
Ensemble run_ensemble(const LindbladModel& model, const Ket& psi0, std::span<const double> times, std::size_t m,
                      const NoiseSpec& noise, const EnsembleOptions& options = {});

/// Frobenius norm of a - b.
double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace decoherence
