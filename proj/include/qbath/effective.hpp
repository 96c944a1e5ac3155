// Three-level {gg, S, T} model of Bell stabilization and fidelity estimates.
//
// H = (Omega/2)(|gg><S| + h.c.); jumps sqrt(G1)|gg><T|, sqrt(G1)|gg><S|,
// sqrt(Gs)|T><S|, sqrt(Gphi)|S><T|. Omega is given as linear MHz and enters
// the dynamics as 2 pi omega_p, so it is commensurate with the rates in 1/us.

#pragma once

#include <string>
#include <vector>

#include "qbath/hamiltonian.hpp"
#include "qbath/lindblad.hpp"

namespace qbath {

struct ThreeLevelParams {
    double omega_p{0.0};   // MHz, linear
    double gamma1{0.0};    // 1/us
    double gamma_phi{0.0}; // 1/us
    double gamma_s{0.0};   // 1/us
};

void validate(const ThreeLevelParams& p);

// Closed-form steady population of T.
double exact_fidelity(const ThreeLevelParams& p);

// Large-drive limit (Gs/2) / (G1 + Gphi + Gs/2).
double approx_fidelity(double gamma1, double gamma_phi, double gamma_s);

// 1 - T_s * mean(1/T1) - T_s / T_phi. Times in us; infinity allowed.
double experiment_estimate(double t_s, const std::vector<double>& t1_list, double t_phi);

// Basis index order: gg, S, T.
enum ThreeLevelIndex { kGroundGG = 0, kSinglet = 1, kTriplet = 2 };

SpacePtr three_level_space();
Operator three_level_hamiltonian(const ThreeLevelParams& p);
CollapseSet three_level_collapse(const ThreeLevelParams& p);

// Numerical steady population of T from the nullspace solve.
double three_level_steady_fidelity(const ThreeLevelParams& p);

// Populations (gg, S, T) at each time, starting from the given diagonal populations.
std::vector<std::vector<double>> three_level_trajectory(const ThreeLevelParams& p, const std::vector<double>& times,
                                                       const std::vector<double>& initial_populations);

struct ThreeLevelFit {
    ThreeLevelParams params;
    double residual{0.0}; // RMS over all fitted populations
};

struct ThreeLevelTraceNames {
    std::string ground{"P_gg"};
    std::string singlet{"P_S"};
    std::string triplet{"P_T"};
};

// Least-squares fit of the model to population traces. The model starts from
// the populations at the first sample. Throws FitError on non-convergence.
ThreeLevelFit fit_three_level(const EvolutionResult& result, const ThreeLevelTraceNames& names = {});
ThreeLevelFit fit_three_level(const std::vector<double>& times, const std::vector<std::vector<double>>& populations);

} // namespace qbath
