// qbath: command-line front end for the scenario runners.
//
// Exit codes: 0 success, 1 configuration or solver failure, 2 bad usage.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbath/device.hpp"
#include "qbath/effective.hpp"
#include "qbath/hamiltonian.hpp"
#include "qbath/rates.hpp"
#include "qbath/report.hpp"
#include "qbath/scenarios.hpp"
#include "qbath/states.hpp"

namespace {

using namespace qbath;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

ScenarioConfig load_or_default(const std::string& path, bool three_qubits)
{
    if (!path.empty()) return load_scenario_file(path);
    return three_qubits ? default_w_scenario() : default_bell_scenario();
}

void print_summary(const ScenarioReport& r)
{
    std::printf("scenario          %s\n", r.scenario.c_str());
    std::printf("target / initial  %s / %s\n", r.target.c_str(), r.initial.c_str());
    std::printf("hilbert dimension %lld\n", static_cast<long long>(r.dimension));
    if (r.steady) {
        std::printf("steady fidelity   %.6f  (%s, residual %.2e)\n", r.steady->fidelity, r.steady->method.c_str(),
                    r.steady->residual);
        if (r.steady->cross_check_difference) {
            std::printf("cross-check diff  %.2e\n", *r.steady->cross_check_difference);
        }
    }
    if (!r.times.empty()) {
        std::printf("final fidelity    %.6f at %.3f us\n", r.final_fidelity(), r.times.back());
        if (r.windowed_fidelity) std::printf("windowed fidelity %.6f\n", *r.windowed_fidelity);
        if (auto ts = r.stabilization_time()) std::printf("T_s               %.4f us\n", *ts);
        else if (!r.fit_error.empty()) std::printf("T_s               unavailable (%s)\n", r.fit_error.c_str());
        std::printf("max trace error   %.2e, min eigenvalue %.2e\n", r.diagnostics.max_trace_error,
                    r.diagnostics.min_eigenvalue);
    }
}

// Name of the single-excitation eigenstate closest to a chain vector.
std::string level_name(const ScenarioConfig& config, const std::vector<double>& v)
{
    const std::size_t n = config.qubit_count();
    std::string best = "?";
    double best_overlap = 0.5;
    for (const auto& name : named_eigenstates(n)) {
        const StateVector psi = qubit_state(name, n, 2);
        double overlap = 0.0;
        Complex amp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::string label(n, 'g');
            label[i] = 'e';
            const auto occ = occupations_from_label(label, 2);
            Eigen::Index idx = 0;
            for (std::size_t m = 0; m < n; ++m) idx = idx * 2 + occ[m];
            amp += std::conj(psi(idx)) * v[i];
        }
        overlap = std::norm(amp);
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = name;
        }
    }
    return best;
}

int cmd_rates(const ScenarioConfig& config)
{
    validate(config);
    const ChainLevels levels = single_excitation_levels(config);
    const auto drives = resonator_drives(config);
    std::printf("%-8s %-6s %-6s %10s %10s %8s %14s %14s %12s %12s\n", "channel", "from", "to", "gap_MHz",
                "delta_MHz", "n_bar", "forward_1/us", "reverse_1/us", "ratio", "optimal_MHz");
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        if (!drives[k].active) continue;
        for (std::size_t p = 0; p < levels.frequencies.size(); ++p) {
            for (std::size_t l = 0; l < p; ++l) {
                const double gap = levels.frequencies[p] - levels.frequencies[l];
                const RateEstimate e =
                    golden_rule_rate(config.resonators[k].chi, levels.vectors[l][k], levels.vectors[p][k],
                                     drives[k].n_bar, config.resonators[k].kappa, gap, drives[k].detuning);
                std::printf("%-8s %-6s %-6s %10.4f %10.4f %8.4f %14.6e %14.6e %12.4f %12.4f\n",
                            config.resonators[k].label.c_str(), level_name(config, levels.vectors[p]).c_str(),
                            level_name(config, levels.vectors[l]).c_str(), gap, drives[k].detuning, drives[k].n_bar,
                            e.forward, e.reverse, e.ratio, e.optimal_detuning);
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Driven-dissipative qubit array simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* bell = app.add_subcommand("bell", "Two-qubit Bell-state stabilization");
    std::string channels = "both", pumps = "P1", initial;
    bool cross_check = false;
    bell->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
    bell->add_option("--out", out_dir, "Output directory for report.json and traces.csv");
    bell->add_option("--channels", channels, "R1, R2 or both")->check(CLI::IsMember({"R1", "R2", "both"}));
    bell->add_option("--pumps", pumps, "P1 or P1+P2")->check(CLI::IsMember({"P1", "P1+P2"}));
    bell->add_option("--initial", initial, "Initial register state, e.g. gg or eg");
    bell->add_flag("--cross-check", cross_check, "Also solve the steady state with the other method");

    auto* w = app.add_subcommand("w", "Three-qubit W-state stabilization");
    w->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
    w->add_option("--out", out_dir, "Output directory for report.json and traces.csv");
    w->add_option("--initial", initial, "Initial register state, e.g. ggg");
    w->add_flag("--cross-check", cross_check, "Also solve the steady state with the other method");

    auto* spec = app.add_subcommand("spectroscopy", "Weak-drive spectroscopy of the qubit register");
    std::string freq_range;
    SpectroscopyOptions spec_opts;
    std::size_t drive_qubit = 1;
    bool three = false;
    spec->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
    spec->add_option("--out", out_dir, "Output directory for spectroscopy.csv");
    spec->add_option("--range", freq_range, "start:stop:count in MHz")->required();
    spec->add_option("--qubit", drive_qubit, "Driven qubit, counted from 1")->check(CLI::PositiveNumber);
    spec->add_option("--amplitude", spec_opts.amplitude, "Drive amplitude, MHz")->check(CLI::PositiveNumber);
    spec->add_option("--duration", spec_opts.duration, "Drive duration, us")->check(CLI::PositiveNumber);
    spec->add_flag("--three-qubit", three, "Use the built-in three-qubit device when no config is given");

    auto* sweep = app.add_subcommand("sweep", "Steady fidelity and transfer rate over one parameter");
    std::string axis, values;
    unsigned threads = 0;
    sweep->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "Output directory for sweep.csv and sweep.json");
    sweep->add_option("--axis", axis, "n_bar, chi, kappa, T1 or T_phi")
        ->required()
        ->check(CLI::IsMember({"n_bar", "chi", "kappa", "T1", "T_phi"}));
    sweep->add_option("--values", values, "start:stop:count")->required();
    sweep->add_option("--threads", threads, "Worker threads, 0 for all cores");

    auto* rates = app.add_subcommand("rates", "Golden-rule transfer rates for each driven resonator");
    rates->add_option("--config", config_path, "Scenario JSON")->check(CLI::ExistingFile);
    rates->add_flag("--three-qubit", three, "Use the built-in three-qubit device when no config is given");

    auto* eff = app.add_subcommand("effective", "Three-level model fidelities");
    ThreeLevelParams tl{0.53 * std::sqrt(2.0), 1.0 / 27.0, 1.0 / 18.0, 1.0 / 0.9};
    std::optional<double> t_s, t_phi;
    std::vector<double> t1_list{27.0, 27.0};
    eff->add_option("--omega-p", tl.omega_p, "Pump Rabi frequency on gg-S, MHz");
    eff->add_option("--gamma1", tl.gamma1, "Relaxation rate, 1/us")->check(CLI::NonNegativeNumber);
    eff->add_option("--gamma-phi", tl.gamma_phi, "Back-scatter rate, 1/us")->check(CLI::NonNegativeNumber);
    eff->add_option("--gamma-s", tl.gamma_s, "Transfer rate, 1/us")->check(CLI::NonNegativeNumber);
    eff->add_option("--Ts", t_s, "Stabilization time for the estimate, us")->check(CLI::PositiveNumber);
    eff->add_option("--T1", t1_list, "Qubit T1 values for the estimate, us")->check(CLI::PositiveNumber);
    eff->add_option("--Tphi", t_phi, "Dephasing time for the estimate, us")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        if (bell->parsed() || w->parsed()) {
            RunOptions options;
            options.cross_check_steady = cross_check;
            ScenarioReport report;
            if (bell->parsed()) {
                const ScenarioConfig config = load_or_default(config_path, false);
                report = run_bell(config, parse_bell_channels(channels), parse_bell_pumps(pumps), initial, options);
            } else {
                const ScenarioConfig config = load_or_default(config_path, true);
                report = run_w(config, initial, options);
            }
            print_summary(report);
            if (!out_dir.empty()) write_scenario_outputs(report, out_dir);
        } else if (spec->parsed()) {
            const ScenarioConfig config = load_or_default(config_path, three);
            spec_opts.drive_qubit = drive_qubit - 1;
            const SpectroscopyResult s = run_spectroscopy(config, parse_range(freq_range), spec_opts);
            const std::string csv = spectroscopy_csv(s);
            if (out_dir.empty()) {
                std::cout << csv;
            } else {
                write_text(std::filesystem::path(out_dir) / "spectroscopy.csv", csv);
                double top = 0.0;
                for (double v : s.excited) top = std::max(top, v);
                std::printf("peaks (MHz):");
                for (double p : find_peaks(s.frequencies, s.excited, 0.1 * top)) std::printf(" %.4f", p);
                std::printf("\n");
            }
        } else if (sweep->parsed()) {
            const ScenarioConfig config = load_or_default(config_path, false);
            const SweepResult r = run_sweep(config, parse_sweep_axis(axis), parse_range(values), threads);
            const std::string csv = sweep_csv(r);
            if (out_dir.empty()) {
                std::cout << csv;
            } else {
                write_text(std::filesystem::path(out_dir) / "sweep.csv", csv);
                write_text(std::filesystem::path(out_dir) / "sweep.json", sweep_to_json(r).dump(2) + "\n");
            }
            for (const auto& p : r.points) {
                if (!p.ok) std::cerr << "point " << p.value << " failed: " << p.error << "\n";
            }
        } else if (rates->parsed()) {
            return cmd_rates(load_or_default(config_path, three));
        } else if (eff->parsed()) {
            std::printf("%-12s %-12s %-12s\n", "exact", "approx", "estimate");
            const double exact = exact_fidelity(tl);
            const double approx = tl.gamma_s > 0.0 ? approx_fidelity(tl.gamma1, tl.gamma_phi, tl.gamma_s) : NAN;
            std::string estimate = "-";
            if (t_s) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6f", experiment_estimate(*t_s, t1_list, t_phi.value_or(kInfinity)));
                estimate = buf;
            }
            std::printf("%-12.6f %-12.6f %-12s\n", exact, approx, estimate.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
