// Rotating-frame Hamiltonians and collapse operators built from a scenario.
//
// The dispersive model uses a cross-Kerr term 2*chi * n_qubit * n_resonator,
// so chi is half the resonator pull and the AC Stark shift is 2 n chi.
// Qubits sit in a manifold frame: the k-excitation manifold rotates at E_k,
// with E_{k+1} - E_k the frequency of the pump that drives k -> k+1. With a
// single pump this is the ordinary frame at the pump frequency. Each
// resonator rotates at its own drive frequency.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qbath/device.hpp"
#include "qbath/hilbert.hpp"

namespace qbath {

enum class ModelKind { dispersive, jaynes_cummings };

struct ResonatorDrive {
    std::size_t resonator{0};   // index into config.resonators
    bool active{false};
    double detuning{0.0};       // omega_r - omega_d actually applied, MHz
    double drive_freq{0.0};     // MHz
    std::complex<double> epsilon{0.0}; // drive amplitude, linear MHz
    double n_bar{0.0};          // steady photon number of the empty resonator
    std::complex<double> alpha{0.0};   // coherent amplitude, dimensionless
    double stark_shift{0.0};    // 2 n_bar chi, MHz
};

struct Frame {
    std::vector<double> manifold_energies; // MHz, index = excitation number
    std::vector<int> manifold_pump;        // pump driving k -> k+1, or -1
    std::vector<ResonatorDrive> drives;    // one per config resonator
    std::vector<std::size_t> resonator_modes; // config resonator index per space resonator mode
    ResonatorFrame resonator_frame{ResonatorFrame::displaced};
    double common_frequency{0.0};          // JC model only
};

struct HamiltonianModel {
    ModelKind kind{ModelKind::dispersive};
    Operator h; // angular units, rad/us
    Frame frame;
    std::size_t n_qubits{0};
};

struct CollapseTerm {
    std::string label;
    Operator op;
    double rate{0.0}; // 1/us, multiplies D(op)
};

using CollapseSet = std::vector<CollapseTerm>;

struct BuildOptions {
    bool include_resonators{true};
};

// Drive bookkeeping per resonator: detuning after the configured reference,
// amplitude from n_bar (or the reverse), coherent amplitude and Stark shift.
std::vector<ResonatorDrive> resonator_drives(const ScenarioConfig& config);

// Config resonators that must be simulated: driven ones, plus idle ones when
// requested or when the initial state excites them.
std::vector<std::size_t> simulated_resonators(const ScenarioConfig& config);

SpacePtr scenario_space(const ScenarioConfig& config, bool include_resonators = true);

HamiltonianModel build_dispersive(const ScenarioConfig& config, const BuildOptions& options = {});

// All modes rotate at one frequency; refuses drives at several frequencies.
HamiltonianModel build_jaynes_cummings(const ScenarioConfig& config,
                                       std::optional<double> frame_frequency = std::nullopt);

CollapseSet build_collapse_set(const ScenarioConfig& config, const HamiltonianModel& model);

// <bra| sum_i Omega_i b_i^dagger |ket> on the bare qubit register, linear MHz.
std::complex<double> pump_matrix_element(const PumpDrive& pump, const StateVector& bra, const StateVector& ket,
                                         int qubit_dim = 2);

// Register operator lifted to a space whose first modes are the qubits.
Operator lift_register_operator(const SpacePtr& space, const SparseMatrix& register_op);

// Projector onto the resonator vacuum times a qubit state, as a full-space vector.
StateVector register_state_in_space(const CompositeSpace& space, const StateVector& register_state);

// Initial density matrix of a scenario on the given space.
DensityMatrix initial_density(const ScenarioConfig& config, const SpacePtr& space);

// Dispersive-shift estimates for one transmon and one resonator, linear MHz,
// delta = omega_q - omega_r. chi is half the resonator pull.
double chi_closed_form(double g, double alpha, double delta);   // alpha (g/delta)^2
double chi_transmon(double g, double alpha, double delta);      // g^2 alpha / (delta (delta + alpha))
double coupling_from_chi(double chi, double alpha, double delta); // inverse of chi_transmon

// Half the resonator pull from exact diagonalization of the single-mode JC
// Hamiltonian with a qubit_dim-level transmon.
double chi_from_jaynes_cummings(double omega_q, double alpha, double omega_r, double g, int qubit_dim = 3,
                                int resonator_dim = 6);

} // namespace qbath
