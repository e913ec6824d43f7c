#pragma once

#include <cstddef>

#include "decoherence/core.hpp"

namespace decoherence::ops {

Matrix identity(std::size_t dim);

/// Fock-space operators on levels 0..n_max.
Matrix annihilation(std::size_t n_max);
Matrix creation(std::size_t n_max);
Matrix number(std::size_t n_max);

/// Two-level operators in the (|g>, |e>) basis: index 0 is the ground state.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix sigma_minus();
Matrix sigma_plus();

/// Collective spin S = N/2 in the Dicke basis |S, m>, index k = m + S
/// (number of excitations).
Matrix collective_sz(std::size_t n_atoms);
Matrix collective_splus(std::size_t n_atoms);
Matrix collective_sminus(std::size_t n_atoms);

/// Basis vector e_k of length dim.
Vector basis(std::size_t dim, std::size_t k);

}  // namespace decoherence::ops
