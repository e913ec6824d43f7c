#include "decoherence/kaon.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "decoherence/operators.hpp"

namespace decoherence::kaon {

namespace {

std::array<Eigen::Matrix2cd, 4> pauli_basis() {
  return {Eigen::Matrix2cd::Identity(), Eigen::Matrix2cd(ops::pauli_x()), Eigen::Matrix2cd(ops::pauli_y()),
          Eigen::Matrix2cd(ops::pauli_z())};
}

}  // namespace

void KaonParams::validate() const {
  if (!(gamma_s > gamma_l) || !(gamma_l > 0.0)) {
    throw ConstraintError("kaon params: need Gamma_S > Gamma_L > 0");
  }
  if (!(delta_m > 0.0)) {
    throw ConstraintError("kaon params: need delta_m > 0");
  }
  if (!std::isfinite(std::abs(epsilon)) || !std::isfinite(gamma_s) || !std::isfinite(delta_m)) {
    throw ConstraintError("kaon params: non-finite value");
  }
  const PositivityVerdict verdict = check_positivity(alpha, beta, gamma);
  if (!verdict.valid) {
    throw ConstraintError("kaon params: " + verdict.reason);
  }
}

PositivityVerdict check_positivity(double alpha, double beta, double gamma) {
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) {
    return {true, "quantum-mechanical limit"};
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    return {false, "non-finite decoherence parameter"};
  }
  if (!(alpha > 0.0)) {
    return {false, "alpha must be > 0"};
  }
  if (!(gamma > 0.0)) {
    return {false, "gamma must be > 0"};
  }
  if (!(alpha * gamma > beta * beta)) {
    return {false, "alpha*gamma must exceed beta^2"};
  }
  return {true, "positive"};
}

KaonParams preset_cplear_bounds() {
  KaonParams p;
  p.alpha = 4.0e-17;
  p.beta = 2.3e-19;
  p.gamma = 3.7e-21;
  return p;
}

KaonState KaonState::from_matrix(const Eigen::Matrix2cd& rho) {
  const auto basis = pauli_basis();
  KaonState s;
  for (int mu = 0; mu < 4; ++mu) {
    s.pauli(mu) = (basis[static_cast<std::size_t>(mu)] * rho).trace().real();
  }
  return s;
}

KaonState KaonState::from_ket(const Eigen::Vector2cd& psi) { return from_matrix(psi * psi.adjoint()); }

Eigen::Matrix2cd KaonState::matrix() const {
  const auto basis = pauli_basis();
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (int mu = 0; mu < 4; ++mu) {
    rho += 0.5 * pauli(mu) * basis[static_cast<std::size_t>(mu)];
  }
  return rho;
}

double KaonState::min_eigenvalue() const { return 0.5 * (pauli(0) - pauli.tail<3>().norm()); }

Eigen::Vector2cd k1() { return {1.0, 0.0}; }
Eigen::Vector2cd k2() { return {0.0, 1.0}; }
Eigen::Vector2cd k0() { return Eigen::Vector2cd(1.0, 1.0) / std::numbers::sqrt2; }
Eigen::Vector2cd k0bar() { return Eigen::Vector2cd(1.0, -1.0) / std::numbers::sqrt2; }

Eigen::Vector2cd k_short(const KaonParams& params) { return (k1() + params.epsilon * k2()).normalized(); }
Eigen::Vector2cd k_long(const KaonParams& params) { return (k2() + params.epsilon * k1()).normalized(); }

Eigen::Matrix2cd kaon_hamiltonian(const KaonParams& params) {
  Eigen::Matrix2cd v;
  v.col(0) = k_short(params);
  v.col(1) = k_long(params);
  Eigen::Matrix2cd lambda = Eigen::Matrix2cd::Zero();
  lambda(0, 0) = Complex(0.0, -params.gamma_s / 2.0);
  lambda(1, 1) = Complex(params.delta_m, -params.gamma_l / 2.0);
  return v * lambda * v.inverse();
}

Eigen::Matrix4d decoherence_block(double alpha, double beta, double gamma) {
  Eigen::Matrix4d block = Eigen::Matrix4d::Zero();
  block(2, 2) = -2.0 * alpha;
  block(2, 3) = -2.0 * beta;
  block(3, 2) = -2.0 * beta;
  block(3, 3) = -2.0 * gamma;
  return block;
}

Eigen::Matrix4d pauli_generator(const LindbladModel& model) {
  if (model.dimension() != 2) {
    throw ArgumentError("pauli_generator: model must act on a two-level space");
  }
  const auto basis = pauli_basis();
  Eigen::Matrix4d g;
  for (int nu = 0; nu < 4; ++nu) {
    const Matrix image = lindblad_rhs(model, Matrix(basis[static_cast<std::size_t>(nu)]));
    for (int mu = 0; mu < 4; ++mu) {
      g(mu, nu) = 0.5 * (Matrix(basis[static_cast<std::size_t>(mu)]) * image).trace().real();
    }
  }
  return g;
}

Eigen::Matrix4d build_kaon_generator(const KaonParams& params) {
  params.validate();
  const LindbladModel qm(Matrix(kaon_hamiltonian(params)), {}, HilbertSpace::single(2, "kaon"));
  return pauli_generator(qm) + decoherence_block(params.alpha, params.beta, params.gamma);
}

std::vector<KaonState> evolve_kaon(const KaonParams& params, const KaonState& state0, std::span<const double> times) {
  const Eigen::Matrix4d generator = build_kaon_generator(params);
  const Eigen::Vector4d& r0 = state0.pauli;
  if (!(r0(0) > 0.0) || r0.tail<3>().squaredNorm() > r0(0) * r0(0) + 1e-12) {
    throw ArgumentError("evolve_kaon: initial state is not a positive density matrix");
  }
  if (times.empty() || times.front() != 0.0) {
    throw ArgumentError("evolve_kaon: time grid must start at 0");
  }
  std::vector<KaonState> out;
  out.reserve(times.size());
  double previous = 0.0;
  for (double t : times) {
    if (t < previous || !std::isfinite(t)) {
      throw ArgumentError("evolve_kaon: time grid must be non-decreasing and finite");
    }
    previous = t;
    const Eigen::Matrix4d propagator = (generator * t).exp();
    KaonState s{propagator * r0};
    if (s.min_eigenvalue() < -1e-9 * s.pauli(0) || !s.pauli.allFinite()) {
      throw IntegrationError("evolve_kaon: state positivity violated at t=" + std::to_string(t));
    }
    out.push_back(s);
  }
  return out;
}

double rate(const KaonState& state, const Eigen::Matrix2cd& observable) {
  if (hermiticity_defect(Matrix(observable)) > kHermiticityTolerance) {
    throw ArgumentError("rate: observable must be Hermitian");
  }
  return (observable * state.matrix()).trace().real();
}

Eigen::Matrix2cd observable_2pi() { return k1() * k1().adjoint(); }
Eigen::Matrix2cd observable_lepton_plus() { return k0() * k0().adjoint(); }
Eigen::Matrix2cd observable_lepton_minus() { return k0bar() * k0bar().adjoint(); }

namespace {

std::optional<double> ratio(double numerator, double denominator) {
  if (!(std::abs(denominator) > 0.0) || !std::isfinite(numerator) || !std::isfinite(denominator)) {
    return std::nullopt;
  }
  return numerator / denominator;
}

}  // namespace

std::vector<std::optional<double>> asymmetry_2pi(const KaonParams& params, std::span<const double> times) {
  const auto tagged = evolve_kaon(params, KaonState::from_ket(k0()), times);
  const auto tagged_bar = evolve_kaon(params, KaonState::from_ket(k0bar()), times);
  const Eigen::Matrix2cd o = observable_2pi();
  std::vector<std::optional<double>> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double r = rate(tagged[k], o);
    const double r_bar = rate(tagged_bar[k], o);
    out.push_back(ratio(r_bar - r, r_bar + r));
  }
  return out;
}

std::vector<std::optional<double>> asymmetry_dm(const KaonParams& params, std::span<const double> times) {
  const auto tagged = evolve_kaon(params, KaonState::from_ket(k0()), times);
  const auto tagged_bar = evolve_kaon(params, KaonState::from_ket(k0bar()), times);
  const Eigen::Matrix2cd to_pi_plus = observable_lepton_minus();
  const Eigen::Matrix2cd to_pi_minus = observable_lepton_plus();
  std::vector<std::optional<double>> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double k_pi_plus = rate(tagged[k], to_pi_plus);
    const double kbar_pi_minus = rate(tagged_bar[k], to_pi_minus);
    const double kbar_pi_plus = rate(tagged_bar[k], to_pi_plus);
    const double k_pi_minus = rate(tagged[k], to_pi_minus);
    out.push_back(ratio(k_pi_plus + kbar_pi_minus - kbar_pi_plus - k_pi_minus,
                        k_pi_plus + kbar_pi_minus + kbar_pi_plus + k_pi_minus));
  }
  return out;
}

LindbladModel decoherence_lindblad_model(const Eigen::Matrix2cd& hamiltonian, double alpha, double beta,
                                         double gamma) {
  const PositivityVerdict verdict = check_positivity(alpha, beta, gamma);
  if (!verdict.valid) {
    throw ConstraintError("decoherence_lindblad_model: " + verdict.reason);
  }
  if (hermiticity_defect(Matrix(hamiltonian)) > kHermiticityTolerance) {
    throw ArgumentError("decoherence_lindblad_model: hamiltonian must be Hermitian");
  }
  // Real symmetric C over (sigma_1, sigma_2, sigma_3) acts on the Bloch vector
  // as -4 (Tr C - C); solve for C given the target block.
  Eigen::Matrix3d target = Eigen::Matrix3d::Zero();
  target(1, 1) = alpha / 2.0;
  target(1, 2) = beta / 2.0;
  target(2, 1) = beta / 2.0;
  target(2, 2) = gamma / 2.0;
  const double trace_c = target.trace() / 2.0;
  const Eigen::Matrix3d c = trace_c * Eigen::Matrix3d::Identity() - target;

  std::vector<Matrix> ops{ops::pauli_x(), ops::pauli_y(), ops::pauli_z()};
  return LindbladModel(Matrix(hamiltonian), std::move(ops), Matrix(c.cast<Complex>()),
                       HilbertSpace::single(2, "kaon"));
}

}  // namespace decoherence::kaon
