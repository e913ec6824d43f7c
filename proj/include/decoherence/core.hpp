#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decoherence/errors.hpp"

namespace decoherence {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr std::size_t kMaxDimension = 4096;
inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-9;
inline constexpr double kTraceTolerance = 1e-12;

/// Ordered tensor factors. Factor 0 is the slowest-varying index of the
/// product basis.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<std::size_t> factor_dims, std::vector<std::string> labels = {});

  static HilbertSpace single(std::size_t dim, std::string label = {});

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t factor_count() const noexcept { return factor_dims_.size(); }
  std::span<const std::size_t> factor_dims() const noexcept { return factor_dims_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// The space spanned by the listed factors, in ascending factor order.
  HilbertSpace subspace(std::span<const std::size_t> keep) const;

  /// Space of this ⊗ other.
  HilbertSpace tensor(const HilbertSpace& other) const;

  bool operator==(const HilbertSpace& other) const { return factor_dims_ == other.factor_dims_; }

 private:
  std::vector<std::size_t> factor_dims_;
  std::vector<std::string> labels_;
  std::size_t dimension_ = 1;
};

class Ket {
 public:
  Ket(Vector amplitudes, HilbertSpace space);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  const HilbertSpace& space() const noexcept { return space_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  double norm() const { return amplitudes_.norm(); }

  Ket normalized() const;

 private:
  Vector amplitudes_;
  HilbertSpace space_;
};

/// Tolerances applied when a DensityMatrix is constructed.
struct DensityValidation {
  double hermiticity = kHermiticityTolerance;
  double positivity = kPositivityTolerance;
  double trace = kTraceTolerance;
};

/// Hermitian, positive, 0 < trace <= 1. The trace may sit below 1 for
/// decaying systems.
class DensityMatrix {
 public:
  DensityMatrix(Matrix entries, HilbertSpace space, const DensityValidation& validation = {});

  static DensityMatrix from_ket(const Ket& psi);
  static DensityMatrix maximally_mixed(const HilbertSpace& space);

  const Matrix& entries() const noexcept { return entries_; }
  const HilbertSpace& space() const noexcept { return space_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  double trace() const { return entries_.trace().real(); }

 private:
  Matrix entries_;
  HilbertSpace space_;
};

/// Kronecker product with `a` as the slow index.
Matrix tensor_product(const Matrix& a, const Matrix& b);
Vector tensor_product(const Vector& a, const Vector& b);
Ket tensor_product(const Ket& a, const Ket& b);

/// Reduced state over the kept factors (any order; result uses ascending
/// factor order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Truncated coherent state |alpha> on Fock levels 0..n_max, renormalized.
Ket coherent_state(Complex alpha, std::size_t n_max);

/// Squared norm captured by Fock levels 0..n_max before renormalization.
double coherent_captured_norm(Complex alpha, std::size_t n_max);

/// Eigenvalues of rho / Tr(rho), ascending. Throws PositivityError below
/// -kPositivityTolerance.
RealVector normalized_spectrum(const Matrix& rho);

/// Von Neumann entropy in nats of rho / Tr(rho), with 0 ln 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const Matrix& rho);

/// Tr(rho^2) / Tr(rho)^2.
double purity(const DensityMatrix& rho);
double purity(const Matrix& rho);

/// max |m - m^dagger| entrywise.
double hermiticity_defect(const Matrix& m);

/// Hermitian part (m + m^dagger) / 2.
Matrix hermitian_part(const Matrix& m);

}  // namespace decoherence
