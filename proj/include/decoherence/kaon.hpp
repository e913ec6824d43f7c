#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decoherence/core.hpp"
#include "decoherence/lindblad.hpp"

namespace decoherence::kaon {

/// hbar in GeV s.
inline constexpr double kHbarGeVSeconds = 6.582e-25;

/// Neutral-kaon parameters in GeV. The QM constants are configuration
/// (particle-data values), not results of this library.
struct KaonParams {
  double gamma_s = 7.351e-15;
  double gamma_l = 1.286e-17;
  double delta_m = 3.484e-15;  ///< m_L - m_S
  Complex epsilon{2.23e-3, 0.0};
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Throws ConstraintError on invalid widths, masses or (alpha, beta, gamma).
  void validate() const;
  bool has_decoherence() const noexcept { return alpha != 0.0 || beta != 0.0 || gamma != 0.0; }
  double tau_s() const noexcept { return 1.0 / gamma_s; }
};

struct PositivityVerdict {
  bool valid = false;
  std::string reason;
};

/// alpha > 0, gamma > 0, alpha*gamma > beta^2 (strict), or all three zero.
PositivityVerdict check_positivity(double alpha, double beta, double gamma);

/// Upper limits alpha = 4.0e-17, beta = 2.3e-19, gamma = 3.7e-21 GeV on top of
/// the default QM constants.
KaonParams preset_cplear_bounds();

/// rho = (1/2) sum_mu rho_mu sigma_mu in the (K1, K2) basis, sigma_0 = identity.
struct KaonState {
  Eigen::Vector4d pauli = Eigen::Vector4d::Zero();

  static KaonState from_matrix(const Eigen::Matrix2cd& rho);
  static KaonState from_ket(const Eigen::Vector2cd& psi);
  Eigen::Matrix2cd matrix() const;
  double trace() const noexcept { return pauli(0); }
  /// Lowest eigenvalue of the 2x2 matrix.
  double min_eigenvalue() const;
};

/// Flavour and CP eigenstates as (K1, K2) amplitudes.
Eigen::Vector2cd k1();
Eigen::Vector2cd k2();
Eigen::Vector2cd k0();
Eigen::Vector2cd k0bar();
/// Normalized |K_S> ∝ |K1> + eps |K2> and |K_L> ∝ |K2> + eps |K1>.
Eigen::Vector2cd k_short(const KaonParams& params);
Eigen::Vector2cd k_long(const KaonParams& params);

/// H = V diag(m_S - i Gamma_S/2, m_L - i Gamma_L/2) V^{-1} with V = [K_S, K_L],
/// m_S = 0 and m_L = delta_m.
Eigen::Matrix2cd kaon_hamiltonian(const KaonParams& params);

/// The (alpha, beta, gamma) block: zero except rows/columns 2, 3, which hold
/// (-2 alpha, -2 beta; -2 beta, -2 gamma).
Eigen::Matrix4d decoherence_block(double alpha, double beta, double gamma);

/// Real 4x4 generator on the Pauli components: G_{mu nu} = Tr[sigma_mu L_QM(sigma_nu)] / 2
/// with L_QM(rho) = -i(H rho - rho H^dagger), plus decoherence_block.
Eigen::Matrix4d build_kaon_generator(const KaonParams& params);

/// Exact exp(G t) propagation. Times in GeV^-1, starting at 0.
std::vector<KaonState> evolve_kaon(const KaonParams& params, const KaonState& state0, std::span<const double> times);

/// Tr(O rho). Throws ArgumentError for a non-Hermitian observable.
double rate(const KaonState& state, const Eigen::Matrix2cd& observable);

/// |K1><K1|, the two-pion rate to leading order in epsilon.
Eigen::Matrix2cd observable_2pi();
/// |K0><K0| (l+ nu pi-).
Eigen::Matrix2cd observable_lepton_plus();
/// |K0bar><K0bar| (l- nu-bar pi+).
Eigen::Matrix2cd observable_lepton_minus();

/// Per-point asymmetries; nullopt where the denominator vanishes.
std::vector<std::optional<double>> asymmetry_2pi(const KaonParams& params, std::span<const double> times);
std::vector<std::optional<double>> asymmetry_dm(const KaonParams& params, std::span<const double> times);

/// Two-level model whose Pauli-space generator is `hamiltonian` plus the
/// (alpha, beta, gamma) block, written as a general Lindblad coefficient
/// matrix over (sigma_1, sigma_2, sigma_3). `hamiltonian` must be Hermitian.
LindbladModel decoherence_lindblad_model(const Eigen::Matrix2cd& hamiltonian, double alpha, double beta,
                                         double gamma);

/// Pauli projection G_{mu nu} = Tr[sigma_mu L(sigma_nu)] / 2 of any two-level
/// LindbladModel.
Eigen::Matrix4d pauli_generator(const LindbladModel& model);

}  // namespace decoherence::kaon
