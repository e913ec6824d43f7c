#include "decoherence/cavity_qed.hpp"

#include <cmath>
#include <numbers>

#include "decoherence/operators.hpp"

namespace decoherence::cavity {

void TavisCummingsParams::validate() const {
  if (n_atoms < 1) {
    throw ArgumentError("Tavis-Cummings: n_atoms must be >= 1");
  }
  if (!(lam >= 0.0) || !(kappa >= 0.0)) {
    throw ArgumentError("Tavis-Cummings: lam and kappa must be >= 0");
  }
  if (n_max < 1) {
    throw ArgumentError("Tavis-Cummings: n_max must be >= 1");
  }
  if (!std::isfinite(omega0) || !std::isfinite(omega) || !std::isfinite(lam) || !std::isfinite(kappa)) {
    throw ArgumentError("Tavis-Cummings: parameters must be finite");
  }
  if ((n_atoms + 1) > kMaxDimension / (n_max + 1)) {
    throw ArgumentError("Tavis-Cummings: (N+1)(n_max+1) exceeds the dimension cap");
  }
}

LindbladModel build_tavis_cummings(const TavisCummingsParams& params) {
  params.validate();
  const std::size_t atom_dim = params.n_atoms + 1;
  const std::size_t field_dim = params.n_max + 1;
  const Matrix id_atoms = ops::identity(atom_dim);
  const Matrix id_field = ops::identity(field_dim);
  const Matrix a = ops::annihilation(params.n_max);
  const Matrix sp = ops::collective_splus(params.n_atoms);

  const Matrix coupling = tensor_product(sp, a);
  Matrix h = params.omega0 * tensor_product(ops::collective_sz(params.n_atoms), id_field) +
             params.omega * tensor_product(id_atoms, ops::number(params.n_max)) +
             params.lam * (coupling + coupling.adjoint());

  std::vector<Matrix> dissipators;
  if (params.kappa > 0.0) {
    dissipators.push_back(std::sqrt(params.kappa) * tensor_product(id_atoms, a));
  }
  return LindbladModel(std::move(h), std::move(dissipators), HilbertSpace({atom_dim, field_dim}, {"atoms", "field"}));
}

std::size_t tavis_cummings_index(const TavisCummingsParams& params, std::size_t excitations, std::size_t photons) {
  if (excitations > params.n_atoms || photons > params.n_max) {
    throw ArgumentError("tavis_cummings_index: level out of range");
  }
  return excitations * (params.n_max + 1) + photons;
}

namespace {

// One-quantum block shifted by its mean diagonal, and that mean relative to
// the ground level.
std::pair<Eigen::Vector2d, double> shifted_single_excitation(const TavisCummingsParams& params) {
  const LindbladModel model = build_tavis_cummings(params);
  const Matrix& h = model.h_eff();
  const auto i_atom = static_cast<Eigen::Index>(tavis_cummings_index(params, 1, 0));
  const auto i_field = static_cast<Eigen::Index>(tavis_cummings_index(params, 0, 1));
  const auto i_ground = static_cast<Eigen::Index>(tavis_cummings_index(params, 0, 0));

  // The excitation number S_z + a^dagger a is conserved, so the one-quantum
  // manifold is an exact 2x2 block.
  const double mean = 0.5 * (h(i_atom, i_atom).real() + h(i_field, i_field).real());
  Eigen::Matrix2cd block;
  block << h(i_atom, i_atom) - mean, h(i_atom, i_field), h(i_field, i_atom), h(i_field, i_field) - mean;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(block, Eigen::EigenvaluesOnly);
  return {solver.eigenvalues(), mean - h(i_ground, i_ground).real()};
}

}  // namespace

std::pair<double, double> single_excitation_energies(const TavisCummingsParams& params) {
  const auto [shifted, offset] = shifted_single_excitation(params);
  return {offset + shifted(0), offset + shifted(1)};
}

double single_excitation_splitting(const TavisCummingsParams& params) {
  const Eigen::Vector2d shifted = shifted_single_excitation(params).first;
  return shifted(1) - shifted(0);
}

void RabiSpectrumParams::validate() const {
  if (!(gamma_plus > 0.0) || !(gamma_minus > 0.0)) {
    throw ArgumentError("absorption spectrum: gamma_plus and gamma_minus must be > 0");
  }
  if (n_atoms < 1 || !(lam >= 0.0)) {
    throw ArgumentError("absorption spectrum: need n_atoms >= 1 and lam >= 0");
  }
}

std::vector<double> absorption_spectrum(const RabiSpectrumParams& p, std::span<const double> omega_grid) {
  p.validate();
  const double root = std::sqrt(p.detuning * p.detuning + 4.0 * static_cast<double>(p.n_atoms) * p.lam * p.lam);
  const double w_minus = std::cos(p.theta) * std::cos(p.theta);
  const double w_plus = std::sin(p.theta) * std::sin(p.theta);
  std::vector<double> out;
  out.reserve(omega_grid.size());
  for (double omega : omega_grid) {
    const double x_minus = omega - p.omega0 + p.detuning / 2.0 - root / 2.0;
    const double x_plus = omega - p.omega0 + p.detuning / 2.0 + root / 2.0;
    out.push_back(w_minus * (p.gamma_minus / std::numbers::pi) / (p.gamma_minus * p.gamma_minus + x_minus * x_minus) +
                  w_plus * (p.gamma_plus / std::numbers::pi) / (p.gamma_plus * p.gamma_plus + x_plus * x_plus));
  }
  return out;
}

std::pair<double, double> rabi_peak_positions(double omega0, double detuning, double lam, std::size_t n_atoms) {
  const double root = std::sqrt(detuning * detuning + 4.0 * static_cast<double>(n_atoms) * lam * lam);
  return {omega0 - detuning / 2.0 - root / 2.0, omega0 - detuning / 2.0 + root / 2.0};
}

double probe_phase_shift(double omega_ef, double lam, double n_photons, double detuning, double t) {
  if (detuning == 0.0) {
    throw ArgumentError("probe_phase_shift: detuning must be nonzero in the dispersive regime");
  }
  return omega_ef * t + lam * lam * n_photons * t / detuning;
}

Ket cat_state(Complex alpha, double phi, std::size_t n_max) {
  const Complex rotation = std::polar(1.0, phi);
  const Ket plus = coherent_state(alpha * rotation, n_max);
  const Ket minus = coherent_state(alpha * std::conj(rotation), n_max);
  const Vector ground = ops::basis(2, 0);
  const Vector excited = ops::basis(2, 1);
  Vector amplitudes = tensor_product(excited, plus.amplitudes()) + tensor_product(ground, minus.amplitudes());
  const HilbertSpace space = HilbertSpace::single(2, "atom").tensor(plus.space());
  return Ket(std::move(amplitudes), space).normalized();
}

double cat_distance(double n_bar, double phi) {
  if (!(n_bar >= 0.0)) {
    throw ArgumentError("cat_distance: n_bar must be >= 0");
  }
  return 2.0 * std::sqrt(n_bar) * std::sin(phi);
}

void CatParams::validate() const {
  if (!(n_bar >= 0.0)) {
    throw ArgumentError("cat params: n_bar must be >= 0");
  }
  if (!(t_r > 0.0)) {
    throw ArgumentError("cat params: t_r must be > 0");
  }
}

CatDistance cat_distance(const CatParams& params) {
  params.validate();
  CatDistance out;
  out.exact = cat_distance(params.n_bar, params.phi);
  if (params.lam > 0.0 && params.detuning != 0.0 && params.t_int > 0.0) {
    out.small_angle = 2.0 * std::pow(params.n_bar, 1.5) * params.lam * params.lam * params.t_int / params.detuning;
  }
  return out;
}

std::optional<double> decoherence_time(double t_r, double distance) {
  if (!(t_r > 0.0)) {
    throw ArgumentError("decoherence_time: t_r must be > 0");
  }
  if (distance < 0.0 || !std::isfinite(distance)) {
    throw ArgumentError("decoherence_time: distance must be finite and >= 0");
  }
  if (distance == 0.0) {
    return std::nullopt;
  }
  return 2.0 * t_r / (distance * distance);
}

}  // namespace decoherence::cavity
