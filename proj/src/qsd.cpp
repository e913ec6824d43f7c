#include "decoherence/qsd.hpp"

#include <cmath>
#include <numbers>

#include "decoherence/parallel.hpp"
#include "decoherence/rng.hpp"

namespace decoherence {

QsdUnraveling::QsdUnraveling(const LindbladModel& model) : model_(model) {
  if (!model.trace_preserving()) {
    throw ArgumentError("QSD unraveling requires a Hermitian h_eff");
  }
  for (const Matrix& b : model.diagonal_operators()) {
    channels_.push_back(std::numbers::sqrt2 * b);
    channel_products_.push_back(channels_.back().adjoint() * channels_.back());
  }
}

Vector QsdUnraveling::drift(const Vector& psi) const {
  Vector out = Complex(0.0, -1.0) * (model_.h_eff() * psi);
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const Vector l_psi = channels_[m] * psi;
    const Complex mean_l = psi.dot(l_psi);  // <psi|L|psi>
    out += std::conj(mean_l) * l_psi - 0.5 * (channel_products_[m] * psi) - 0.5 * std::norm(mean_l) * psi;
  }
  return out;
}

std::vector<Vector> QsdUnraveling::diffusion(const Vector& psi) const {
  std::vector<Vector> out;
  out.reserve(channels_.size());
  for (const Matrix& l : channels_) {
    const Vector l_psi = l * psi;
    const Complex mean_l = psi.dot(l_psi);
    out.push_back(l_psi - mean_l * psi);
  }
  return out;
}

Vector QsdUnraveling::step(const Vector& psi, double dt, std::span<const Complex> noise) const {
  if (noise.size() != channels_.size()) {
    throw ArgumentError("qsd_step: expected one noise draw per Lindblad channel");
  }
  if (!(dt > 0.0)) {
    throw ArgumentError("qsd_step: dt must be positive");
  }
  Vector next = psi + drift(psi) * dt;
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const Vector l_psi = channels_[m] * psi;
    const Complex mean_l = psi.dot(l_psi);
    next += (l_psi - mean_l * psi) * noise[m];
  }
  const double n = next.norm();
  if (!std::isfinite(n) || !(n > 0.0)) {
    throw StepFailure("qsd_step: non-finite or vanishing amplitudes");
  }
  return next / n;
}

Ket qsd_step(const Ket& psi, const LindbladModel& model, double dt, std::span<const Complex> noise_draws) {
  if (psi.dimension() != model.dimension()) {
    throw ArgumentError("qsd_step: state dimension does not match model");
  }
  // Diagonal-form channels; the noise vector is indexed the same way.
  const QsdUnraveling unraveling(model);
  return Ket(unraveling.step(psi.amplitudes(), dt, noise_draws), psi.space());
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

namespace {

std::vector<std::uint64_t> steps_per_interval(std::span<const double> times, double dt) {
  if (times.empty() || times.front() != 0.0) {
    throw ArgumentError("run_ensemble: time grid must start at 0");
  }
  if (!(dt > 0.0)) {
    throw ArgumentError("run_ensemble: dt must be positive");
  }
  std::vector<std::uint64_t> steps;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double gap = times[k] - times[k - 1];
    if (!(gap > 0.0)) {
      throw ArgumentError("run_ensemble: time grid must be strictly increasing");
    }
    const double ratio = gap / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw ArgumentError("run_ensemble: grid spacing must be an integer multiple of dt");
    }
    steps.push_back(static_cast<std::uint64_t>(rounded));
  }
  return steps;
}

// Fixed-shape pairwise sum of projectors over trajectories [lo, hi).
Matrix pairwise_projector_sum(const std::vector<Trajectory>& trajectories, std::size_t lo, std::size_t hi,
                              std::size_t point) {
  if (hi - lo == 1) {
    const Vector& psi = trajectories[lo].amplitudes[point];
    return psi * psi.adjoint();
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_projector_sum(trajectories, lo, mid, point) + pairwise_projector_sum(trajectories, mid, hi, point);
}

}  // namespace

Ensemble run_ensemble(const LindbladModel& model, const Ket& psi0, std::span<const double> times, std::size_t m,
                      const NoiseSpec& noise, const EnsembleOptions& options) {
  if (m < 1) {
    throw ArgumentError("run_ensemble: trajectory count must be >= 1");
  }
  if (psi0.dimension() != model.dimension()) {
    throw ArgumentError("run_ensemble: initial state dimension does not match model");
  }
  const std::vector<std::uint64_t> steps = steps_per_interval(times, noise.dt);
  const QsdUnraveling unraveling(model);
  const Ket start = psi0.normalized();
  const std::size_t threads = options.threads == 0 ? default_thread_count() : options.threads;

  Ensemble ensemble;
  ensemble.trajectories.resize(m);
  parallel_for(m, threads, [&](std::size_t index) {
    const NoiseStream stream(noise.master_seed, index);
    Trajectory& traj = ensemble.trajectories[index];
    traj.seed = stream.id();
    traj.times.assign(times.begin(), times.end());
    traj.space = psi0.space();
    traj.amplitudes.reserve(times.size());
    traj.amplitudes.push_back(start.amplitudes());

    Vector psi = start.amplitudes();
    std::vector<Complex> draws(unraveling.channel_count());
    std::uint64_t step = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      for (std::uint64_t s = 0; s < steps[k]; ++s, ++step) {
        for (std::size_t c = 0; c < draws.size(); ++c) {
          draws[c] = stream.complex_gaussian(step, static_cast<std::uint32_t>(c), noise.dt);
        }
        try {
          psi = unraveling.step(psi, noise.dt, draws);
        } catch (const StepFailure& e) {
          throw EnsembleFailure(index, times[k] + static_cast<double>(s) * noise.dt, e.what());
        }
      }
      traj.amplitudes.push_back(psi);
    }
  });

  std::vector<Matrix> sums(times.size());
  parallel_for(times.size(), threads, [&](std::size_t point) {
    sums[point] = pairwise_projector_sum(ensemble.trajectories, 0, m, point) / static_cast<double>(m);
  });

  DensityValidation validation;
  validation.positivity = 5e-3 / std::sqrt(static_cast<double>(m));
  ensemble.mean_states.reserve(times.size());
  for (Matrix& s : sums) {
    ensemble.mean_states.emplace_back(hermitian_part(s), psi0.space(), validation);
  }
  if (!options.keep_trajectories) {
    ensemble.trajectories.clear();
  }
  return ensemble;
}

}  // namespace decoherence
