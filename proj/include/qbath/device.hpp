// Device, drive and scenario configuration. Every frequency here is linear
// MHz and every time is us; conversion to angular units happens at the point
// of use.

#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qbath {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised for malformed or inconsistent configuration; the message starts
// with the offending field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(path)
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct QubitParams {
    std::string label;
    double omega_q{0.0};      // idle frequency
    double alpha{0.0};        // anharmonicity, negative for transmons
    double t1{kInfinity};     // us; infinity disables relaxation
    double t2e{kInfinity};    // us, spin echo
    double working_freq{0.0}; // frequency the qubit is tuned to during stabilization
};

struct ResonatorParams {
    std::string label;
    double omega_r{0.0};
    double kappa{0.0};
    double chi{0.0}; // half the resonator pull between qubit g and e
    std::optional<double> g;
};

struct CouplingParams {
    std::vector<double> j; // one per adjacent qubit pair
};

struct PumpDrive {
    std::string label;
    std::vector<std::complex<double>> amplitudes; // Omega_i / 2pi per qubit
    double frequency{0.0};
    int source_manifold{0}; // excitation manifold this pump drives upward from
    bool enabled{true};
};

enum class DetuningReference {
    bare,   // detuning measured from the undressed resonator frequency
    target, // measured from the resonator frequency pulled by the target state
};

struct RamanChannel {
    double detuning{0.0}; // omega_r - omega_d
    std::optional<double> amplitude; // epsilon / 2pi
    std::optional<double> n_bar;
    bool enabled{true};
};

struct RamanDrive {
    DetuningReference reference{DetuningReference::bare};
    std::vector<RamanChannel> channels; // one per resonator
};

struct Truncation {
    int qubit_dim{2};
    int resonator_dim{4};
    bool keep_idle_resonators{false};
};

enum class SteadyMethod { automatic, nullspace, long_time };

struct SolverSettings {
    double rtol{1e-8};
    double atol{1e-10};
    SteadyMethod steady_method{SteadyMethod::automatic};
    double steady_tol{1e-7};            // max |d rho / dt| accepted as stationary, rad/us
    long long nullspace_max_dim2{40000};
    double long_time_max{3000.0};       // us of simulated time before giving up
};

enum class DephasingConvention { direct, pure_dephasing };

enum class ResonatorFrame { displaced, lab };

struct InitialState {
    std::string name;            // qubit state name, resonators in vacuum
    std::vector<int> occupations; // used when name is empty
};

struct ScenarioConfig {
    std::string name;
    std::vector<QubitParams> qubits;
    std::vector<ResonatorParams> resonators;
    CouplingParams couplings;
    std::vector<PumpDrive> pumps;
    RamanDrive raman;
    std::string target_state;
    InitialState initial_state;
    double t_final{10.0};
    double t_step{0.05};
    Truncation truncation;
    SolverSettings solver;
    DephasingConvention dephasing{DephasingConvention::direct};
    bool stark_compensation{true};
    ResonatorFrame resonator_frame{ResonatorFrame::displaced};
    bool decoherence{true}; // qubit T1 and dephasing collapse operators

    std::size_t qubit_count() const { return qubits.size(); }
};

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& config);

ScenarioConfig load_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioConfig& config);
std::string dump_scenario(const ScenarioConfig& config);

ScenarioConfig default_bell_scenario();
ScenarioConfig default_w_scenario();

struct QubitRates {
    double gamma1{0.0};    // 1/us
    double gamma_phi{0.0}; // 1/us, rate on the number-operator dissipator
};

QubitRates derive_rates(const QubitParams& q, DephasingConvention convention);

// Single-excitation eigenfrequencies of the hopping chain at working
// frequencies, ascending, with eigenvectors as columns (basis: qubit 1 excited, ...).
struct ChainLevels {
    std::vector<double> frequencies;
    std::vector<std::vector<double>> vectors;
};
ChainLevels single_excitation_levels(const ScenarioConfig& config);

// Frequency of the named single-excitation state, matched by overlap.
double named_level_frequency(const ScenarioConfig& config, const std::string& name);

std::string to_string(DetuningReference r);
std::string to_string(SteadyMethod m);
std::string to_string(DephasingConvention c);
std::string to_string(ResonatorFrame f);

} // namespace qbath
