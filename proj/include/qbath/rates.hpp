// Closed-form drive calibration and engineered dissipation rates.
// Arguments are linear MHz; rates come back in 1/us.

#pragma once

namespace qbath {

// Steady photon number of a driven damped resonator, |eps|^2 / (delta^2 + (kappa/2)^2).
double photon_number(double epsilon, double delta_r, double kappa);

// Drive amplitude that produces n_bar photons at the given detuning.
double drive_amplitude(double n_bar, double delta_r, double kappa);

// Qubit frequency shift from n_bar photons, 2 n_bar chi, linear MHz.
double stark_shift(double n_bar, double chi);

struct RateEstimate {
    double forward{0.0};  // upper eigenstate p -> lower eigenstate l, 1/us
    double reverse{0.0};  // l -> p
    double ratio{0.0};    // forward / reverse
    double optimal_detuning{0.0}; // MHz
};

// Raman transfer between two array eigenstates split by gap = lambda_p - lambda_l,
// mediated by resonator k with overlaps m_kl, m_kp of the k-th qubit on each state.
RateEstimate golden_rule_rate(double chi_kk, double m_kl, double m_kp, double n_bar, double kappa, double gap,
                              double delta_r);

// forward / reverse at the optimal detuning: 16 (gap/kappa)^2 + 1.
double directionality_ratio(double gap, double kappa);

} // namespace qbath
