// Named states of the qubit register (no resonators).
//
// Basis labels spell one letter per qubit, g e f h for levels 0..3, qubit 1
// first: "eg" has qubit 1 excited. Two qubits also know the single-excitation
// eigenstates T (symmetric) and S (antisymmetric); three qubits know the
// chain eigenstates W A B (one excitation) and C D E (two excitations).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qbath/hilbert.hpp"

namespace qbath {

bool is_qubit_state_name(const std::string& name, std::size_t n_qubits, int qubit_dim = 2);

// Normalized state vector on the qubit register of n_qubits modes of qubit_dim levels.
StateVector qubit_state(const std::string& name, std::size_t n_qubits, int qubit_dim = 2);

// Labels of every computational basis state in index order.
std::vector<std::string> basis_labels(std::size_t n_qubits, int qubit_dim = 2);

std::vector<std::string> named_eigenstates(std::size_t n_qubits);

// Occupation list for a basis label, or throws.
std::vector<int> occupations_from_label(const std::string& label, int qubit_dim = 2);

} // namespace qbath
