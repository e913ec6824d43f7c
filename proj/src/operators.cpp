#include "decoherence/operators.hpp"

#include <cmath>

namespace decoherence::ops {

namespace {
Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
}  // namespace

Matrix identity(std::size_t dim) { return Matrix::Identity(idx(dim), idx(dim)); }

Matrix annihilation(std::size_t n_max) {
  Matrix a = Matrix::Zero(idx(n_max + 1), idx(n_max + 1));
  for (std::size_t n = 1; n <= n_max; ++n) {
    a(idx(n - 1), idx(n)) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

Matrix creation(std::size_t n_max) { return annihilation(n_max).adjoint(); }

Matrix number(std::size_t n_max) {
  Matrix n = Matrix::Zero(idx(n_max + 1), idx(n_max + 1));
  for (std::size_t k = 0; k <= n_max; ++k) {
    n(idx(k), idx(k)) = static_cast<double>(k);
  }
  return n;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Matrix sigma_plus() { return sigma_minus().adjoint(); }

Matrix collective_sz(std::size_t n_atoms) {
  const double s = static_cast<double>(n_atoms) / 2.0;
  Matrix sz = Matrix::Zero(idx(n_atoms + 1), idx(n_atoms + 1));
  for (std::size_t k = 0; k <= n_atoms; ++k) {
    sz(idx(k), idx(k)) = static_cast<double>(k) - s;
  }
  return sz;
}

Matrix collective_splus(std::size_t n_atoms) {
  const double s = static_cast<double>(n_atoms) / 2.0;
  Matrix sp = Matrix::Zero(idx(n_atoms + 1), idx(n_atoms + 1));
  for (std::size_t k = 0; k < n_atoms; ++k) {
    const double m = static_cast<double>(k) - s;
    sp(idx(k + 1), idx(k)) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  return sp;
}

Matrix collective_sminus(std::size_t n_atoms) { return collective_splus(n_atoms).adjoint(); }

Vector basis(std::size_t dim, std::size_t k) {
  if (k >= dim) {
    throw ArgumentError("basis: index out of range");
  }
  Vector e = Vector::Zero(idx(dim));
  e(idx(k)) = 1.0;
  return e;
}

}  // namespace decoherence::ops
