// End-to-end runs: Bell and W stabilization, spectroscopy, parameter sweeps,
// readout mitigation.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbath/device.hpp"
#include "qbath/effective.hpp"
#include "qbath/fitting.hpp"
#include "qbath/lindblad.hpp"

namespace qbath {

struct RunOptions {
    bool trajectory{true};         // time evolution on [0, t_final]
    bool steady{true};             // steady-state solve
    bool cross_check_steady{false}; // also run the other steady method and record the difference
    double window_start{4.0};      // us; mean target fidelity over [window_start, t_final]
};

struct SteadySummary {
    double fidelity{0.0};
    double residual{0.0};
    std::string method;
    bool degenerate_nullspace{false};
    DensityDiagnostics state; // of the steady density matrix
    double simulated_time{0.0};
    std::optional<double> cross_check_fidelity; // from the other method
    std::optional<double> cross_check_difference;
    std::string cross_check_error;
};

struct ScenarioReport {
    std::string scenario;
    nlohmann::json config;
    std::string target;
    std::string initial;
    Eigen::Index dimension{0};

    std::vector<double> times;
    std::vector<std::string> trace_names; // "F_target" first, then populations and photon numbers
    std::vector<std::vector<double>> traces;

    std::optional<SteadySummary> steady;
    std::optional<double> windowed_fidelity;
    std::optional<ExponentialFit> stabilization_fit; // on F_target
    std::string fit_error;
    std::optional<ThreeLevelFit> three_level_fit; // Bell only
    std::string three_level_error;
    EvolutionDiagnostics diagnostics;

    const std::vector<double>& trace(const std::string& name) const;
    double final_fidelity() const;
    // 1 / fitted rate, us.
    std::optional<double> stabilization_time() const;
};

// Observables of a scenario: target fidelity, every register basis state, the
// named eigenstates, and the photon number of each simulated resonator.
// Photon numbers count the coherent part in the displaced frame.
std::vector<Observable> scenario_observables(const ScenarioConfig& config, const HamiltonianModel& model);

// Runs the scenario as configured.
ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

enum class BellChannels { r1, r2, both };
enum class BellPumps { p1, p1_p2 };

BellChannels parse_bell_channels(const std::string& text);
BellPumps parse_bell_pumps(const std::string& text);
std::string to_string(BellChannels c);
std::string to_string(BellPumps p);

// Copy of a two-qubit config with the requested channels and pumps enabled
// and the initial state replaced (unless empty).
ScenarioConfig configure_bell(const ScenarioConfig& config, BellChannels channels, BellPumps pumps,
                              const std::string& initial);

ScenarioReport run_bell(const ScenarioConfig& config, BellChannels channels, BellPumps pumps,
                        const std::string& initial, const RunOptions& options = {});

ScenarioReport run_w(const ScenarioConfig& config, const std::string& initial, const RunOptions& options = {});

struct SpectroscopyOptions {
    std::size_t drive_qubit{0};
    double amplitude{0.05}; // MHz, linear
    double duration{4.0};   // us
    double sample_step{0.02};
};

struct SpectroscopyResult {
    std::vector<double> frequencies;
    std::vector<std::string> labels;               // populations reported, basis labels then named states
    std::vector<std::vector<double>> populations;  // populations[label][frequency], time averaged
    std::vector<double> excited;                   // 1 - P(ground), time averaged
};

// Qubit register only, with a weak square drive on one qubit at each
// frequency; populations averaged over the drive duration.
SpectroscopyResult run_spectroscopy(const ScenarioConfig& config, const std::vector<double>& frequencies,
                                    const SpectroscopyOptions& options = {});

// Local maxima of a sampled curve whose height exceeds min_height.
std::vector<double> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_height);

enum class SweepAxis { n_bar, chi, kappa, t1, t_phi };

SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis a);

// Config with the axis value applied: n_bar to every enabled channel, chi and
// kappa to every resonator, T1 or T_phi to every qubit. Changing one qubit
// time keeps the other rate fixed by rewriting T2e under the configured
// dephasing convention.
ScenarioConfig apply_sweep_value(const ScenarioConfig& config, SweepAxis axis, double value);

struct TransferRates {
    double forward{0.0}; // S -> T, 1/us
    double reverse{0.0}; // T -> S, 1/us
    ExponentialFit fit;  // on P_S
    double duration{0.0};
};

// Exchange rates between the Bell single-excitation states, from a run that
// starts in S with the pump off and no qubit decoherence.
TransferRates measure_transfer_rates(const ScenarioConfig& config);

struct SweepPoint {
    double value{0.0};
    bool ok{false};
    std::string error;
    double steady_fidelity{0.0};
    double steady_residual{0.0};
    std::string steady_method;
    std::optional<TransferRates> transfer; // two-qubit configs only
    std::string transfer_error;
};

struct SweepResult {
    SweepAxis axis{SweepAxis::n_bar};
    std::vector<SweepPoint> points; // ordered as the requested values
};

// Points run in parallel on `threads` workers (0: hardware concurrency).
// A failing point is recorded and the sweep continues.
SweepResult run_sweep(const ScenarioConfig& config, SweepAxis axis, const std::vector<double>& values,
                      unsigned threads = 0);

// "a:b:n" -> n evenly spaced values from a to b inclusive.
std::vector<double> parse_range(const std::string& text);

// Column-stochastic matrix of measured-given-prepared probabilities.
class ReadoutMatrix {
public:
    explicit ReadoutMatrix(Eigen::MatrixXd m);
    const Eigen::MatrixXd& matrix() const { return m_; }
    Eigen::Index size() const { return m_.rows(); }

    // Independent single-qubit readout: kron of per-qubit 2x2 matrices, qubit 1 most significant.
    static ReadoutMatrix tensor(const std::vector<ReadoutMatrix>& per_qubit);

private:
    Eigen::MatrixXd m_;
};

struct MitigatedPopulations {
    Eigen::VectorXd probabilities;
    Eigen::VectorXd raw; // M^-1 measured, before clipping
    double condition_number{0.0};
};

// M^-1 measured, then negative entries clipped to zero and renormalized.
MitigatedPopulations apply_readout_mitigation(const ReadoutMatrix& m, const Eigen::VectorXd& measured);

} // namespace qbath
