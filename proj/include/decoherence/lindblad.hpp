#pragma once

#include <optional>
#include <span>
#include <vector>

#include "decoherence/core.hpp"

namespace decoherence {

/// Markov-type generator
///
///   d rho/dt = -i(H rho - rho H^dagger) + sum_jk c_jk (2 F_j rho F_k^dagger - {F_k^dagger F_j, rho})
///
/// With c = identity (the default) this is the diagonal form
/// -i[H, rho] - sum_m {B_m^dagger B_m, rho} + 2 sum_m B_m rho B_m^dagger,
/// so a cavity leaking at rate kappa uses B = sqrt(kappa) a. A general
/// Hermitian coefficient matrix c admits dissipators (such as the kaon
/// sigma_2/sigma_3 block) that have no diagonal form with positive weights.
class LindbladModel {
 public:
  LindbladModel(Matrix h_eff, std::vector<Matrix> lindblad_ops, HilbertSpace space);
  LindbladModel(Matrix h_eff, std::vector<Matrix> lindblad_ops, Matrix coefficients, HilbertSpace space);

  const Matrix& h_eff() const noexcept { return h_eff_; }
  const std::vector<Matrix>& lindblad_ops() const noexcept { return ops_; }
  /// Empty when the model is in diagonal form.
  const std::optional<Matrix>& coefficients() const noexcept { return coefficients_; }
  const HilbertSpace& space() const noexcept { return space_; }
  std::size_t dimension() const noexcept { return space_.dimension(); }

  /// True iff h_eff is Hermitian to 1e-12.
  bool trace_preserving() const noexcept { return trace_preserving_; }

  /// Equivalent operators B_m in diagonal form. Throws ArgumentError when the
  /// coefficient matrix has a negative eigenvalue.
  std::vector<Matrix> diagonal_operators() const;

 private:
  Matrix h_eff_;
  std::vector<Matrix> ops_;
  std::optional<Matrix> coefficients_;
  HilbertSpace space_;
  bool trace_preserving_ = false;
};

/// Column-stacking vectorization: vec(rho)[i + d*j] = rho(i, j).
Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, std::size_t dim);

inline constexpr std::size_t kMaxSuperoperatorDimension = 64;

/// d^2 x d^2 matrix L with L vec(rho) = vec(rhs(rho)). Requires d <= 64.
Matrix build_superoperator(const LindbladModel& model);

/// Right-hand side evaluated directly on the matrix.
Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho);

struct Diagnostics {
  double trace = 0.0;
  double purity = 0.0;
  double entropy = 0.0;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<Diagnostics> diagnostics;
};

enum class EvolutionMethod { Automatic, MatrixExponential, RungeKutta };

struct EvolveOptions {
  EvolutionMethod method = EvolutionMethod::Automatic;
  /// Matrix exponential is used up to this superoperator size.
  std::size_t exponential_limit = 1024;
  double rk_relative_tolerance = 1e-10;
  double rk_absolute_tolerance = 1e-13;
  /// Right-hand-side evaluations allowed before the RK path gives up.
  std::size_t rk_max_evaluations = 1'000'000;
  /// Output states whose lowest eigenvalue falls below -this abort the run.
  double failure_positivity = 1e-6;
};

/// Propagate rho0 over a grid that starts at 0 and is strictly increasing.
EvolutionResult evolve(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> times,
                       const EvolveOptions& options = {});

/// rho_ij(t) = rho_ij(0) exp[(-i(E_i - E_j) - Gamma_ij) t]. Gamma must be
/// symmetric, non-negative, with zero diagonal.
DensityMatrix secular_propagate(const DensityMatrix& rho0, std::span<const double> energies,
                                const RealMatrix& dampings, double t);

Diagnostics diagnose(const Matrix& rho);

}  // namespace decoherence
