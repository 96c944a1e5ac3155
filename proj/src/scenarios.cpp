#include "qbath/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/SVD>

#include "qbath/hamiltonian.hpp"
#include "qbath/states.hpp"

namespace qbath {

namespace {

// Tr(P rho) for sparse P.
double trace_product(const SparseMatrix& p, const DenseMatrix& rho)
{
    Complex sum = 0.0;
    for (Eigen::Index k = 0; k < p.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(p, k); it; ++it) sum += it.value() * rho(it.col(), it.row());
    }
    return sum.real();
}

SparseMatrix projector(const StateVector& psi)
{
    DenseMatrix d = psi * psi.adjoint();
    SparseMatrix s = d.sparseView();
    prune(s);
    return s;
}

std::vector<double> time_grid(double t_final, double t_step)
{
    const auto n = static_cast<long>(std::llround(t_final / t_step));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) grid.push_back(std::min(t_final, double(i) * t_step));
    if (grid.back() < t_final) grid.push_back(t_final);
    return grid;
}

std::string initial_label(const ScenarioConfig& config)
{
    if (!config.initial_state.name.empty()) return config.initial_state.name;
    std::ostringstream out;
    for (int o : config.initial_state.occupations) out << o;
    return out.str();
}

EvolveOptions evolve_options(const ScenarioConfig& config)
{
    EvolveOptions o;
    o.rtol = config.solver.rtol;
    o.atol = config.solver.atol;
    return o;
}

double mean_after(const std::vector<double>& t, const std::vector<double>& y, double start)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= start - 1e-12) {
            sum += y[i];
            ++count;
        }
    }
    return count ? sum / double(count) : y.back();
}

// T2e that yields the requested rates under a dephasing convention.
double t2e_for(double gamma1, double gamma_phi, DephasingConvention convention)
{
    const double echo = convention == DephasingConvention::direct ? gamma_phi : gamma_phi + 0.5 * gamma1;
    return echo > 0.0 ? 1.0 / echo : kInfinity;
}

} // namespace

const std::vector<double>& ScenarioReport::trace(const std::string& name) const
{
    for (std::size_t k = 0; k < trace_names.size(); ++k) {
        if (trace_names[k] == name) return traces[k];
    }
    throw std::out_of_range("no trace named '" + name + "'");
}

double ScenarioReport::final_fidelity() const
{
    const auto& f = trace("F_target");
    if (f.empty()) throw std::logic_error("report has no trajectory");
    return f.back();
}

std::optional<double> ScenarioReport::stabilization_time() const
{
    if (!stabilization_fit || !(stabilization_fit->rate > 0.0)) return std::nullopt;
    return 1.0 / stabilization_fit->rate;
}

std::vector<Observable> scenario_observables(const ScenarioConfig& config, const HamiltonianModel& model)
{
    const SpacePtr& space = model.h.space;
    const std::size_t n = config.qubit_count();
    const int qd = config.truncation.qubit_dim;
    std::vector<Observable> out;

    auto population = [&](const std::string& name, const StateVector& reg_state) {
        const SparseMatrix p = lift_register_operator(space, projector(reg_state)).matrix;
        out.push_back({name, [p](const DenseMatrix& rho) { return trace_product(p, rho); }});
    };
    population("F_target", qubit_state(config.target_state, n, qd));
    for (const auto& label : basis_labels(n, qd)) population("P_" + label, qubit_state(label, n, qd));
    for (const auto& name : named_eigenstates(n)) population("P_" + name, qubit_state(name, n, qd));

    for (std::size_t j = 0; j < model.frame.resonator_modes.size(); ++j) {
        const std::size_t k = model.frame.resonator_modes[j];
        const std::size_t mode = n + j;
        const SparseMatrix num = number_op(space, mode).matrix;
        const SparseMatrix low = lowering_op(space, mode).matrix;
        const Complex alpha =
            model.frame.resonator_frame == ResonatorFrame::displaced ? model.frame.drives[k].alpha : Complex(0.0);
        out.push_back({"n_" + config.resonators[k].label, [num, low, alpha](const DenseMatrix& rho) {
                           Complex d = 0.0;
                           for (Eigen::Index c = 0; c < low.outerSize(); ++c) {
                               for (SparseMatrix::InnerIterator it(low, c); it; ++it) {
                                   d += it.value() * rho(it.col(), it.row());
                               }
                           }
                           return trace_product(num, rho) + 2.0 * (std::conj(alpha) * d).real() + std::norm(alpha);
                       }});
    }
    return out;
}

ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    validate(config);
    const HamiltonianModel model = build_dispersive(config);
    const CollapseSet collapse = build_collapse_set(config, model);
    const SpacePtr space = model.h.space;
    const Eigen::Index dim = space->total_dim();
    const long long dim2 = static_cast<long long>(dim) * dim;
    const bool may_use_nullspace = config.solver.steady_method != SteadyMethod::long_time &&
                                   dim2 <= config.solver.nullspace_max_dim2;
    const bool need_matrix = options.steady && (may_use_nullspace || options.cross_check_steady);
    const Liouvillian l = build_liouvillian(model.h, collapse, need_matrix);
    const DensityMatrix rho0 = initial_density(config, space);
    const auto observables = scenario_observables(config, model);

    ScenarioReport report;
    report.scenario = config.name;
    report.config = to_json(config);
    report.target = config.target_state;
    report.initial = initial_label(config);
    report.dimension = dim;
    for (const auto& o : observables) report.trace_names.push_back(o.name);

    if (options.trajectory) {
        const EvolutionResult r = evolve(l, rho0, time_grid(config.t_final, config.t_step), observables,
                                         evolve_options(config));
        report.times = r.times;
        report.traces = r.traces;
        report.diagnostics = r.diagnostics;
        const auto& f = report.traces.front();
        report.windowed_fidelity = mean_after(report.times, f, std::min(options.window_start, config.t_final));
        try {
            report.stabilization_fit = fit_exponential(report.times, f);
        } catch (const std::exception& e) {
            report.fit_error = e.what();
        }
    } else {
        report.traces.assign(observables.size(), {});
    }

    if (options.steady) {
        const SteadyOptions so = steady_options_from(config.solver);
        const SteadyState s = steady_state(l, so, &rho0);
        SteadySummary sum;
        sum.fidelity = observables.front().eval(s.rho.matrix);
        sum.residual = s.residual;
        sum.method = to_string(s.method);
        sum.degenerate_nullspace = s.degenerate_nullspace;
        sum.state = diagnose(s.rho.matrix);
        sum.simulated_time = s.simulated_time;
        if (options.cross_check_steady) {
            SteadyOptions other = so;
            other.method = s.method == SteadyMethod::nullspace ? SteadyMethod::long_time : SteadyMethod::nullspace;
            other.nullspace_max_dim2 = std::max(other.nullspace_max_dim2, dim2);
            try {
                const SteadyState t = steady_state(l, other, &rho0);
                sum.cross_check_fidelity = observables.front().eval(t.rho.matrix);
                sum.cross_check_difference = std::abs(*sum.cross_check_fidelity - sum.fidelity);
            } catch (const std::exception& e) {
                sum.cross_check_error = e.what();
            }
        }
        report.steady = sum;
    }
    return report;
}

BellChannels parse_bell_channels(const std::string& text)
{
    if (text == "R1") return BellChannels::r1;
    if (text == "R2") return BellChannels::r2;
    if (text == "both") return BellChannels::both;
    throw std::invalid_argument("channels must be R1, R2 or both, got '" + text + "'");
}

BellPumps parse_bell_pumps(const std::string& text)
{
    if (text == "P1") return BellPumps::p1;
    if (text == "P1+P2") return BellPumps::p1_p2;
    throw std::invalid_argument("pumps must be P1 or P1+P2, got '" + text + "'");
}

std::string to_string(BellChannels c)
{
    switch (c) {
    case BellChannels::r1: return "R1";
    case BellChannels::r2: return "R2";
    case BellChannels::both: return "both";
    }
    return "?";
}

std::string to_string(BellPumps p) { return p == BellPumps::p1 ? "P1" : "P1+P2"; }

ScenarioConfig configure_bell(const ScenarioConfig& config, BellChannels channels, BellPumps pumps,
                              const std::string& initial)
{
    if (config.qubit_count() != 2) throw ConfigError("qubits", "the Bell scenario needs two qubits");
    ScenarioConfig c = config;
    auto& ch = c.raman.channels;
    if (ch.size() != 2) throw ConfigError("raman.channels", "the Bell scenario needs two channels");
    ch[0].enabled = channels != BellChannels::r2;
    ch[1].enabled = channels != BellChannels::r1;
    if (c.pumps.empty()) throw ConfigError("pumps", "the Bell scenario needs a pump");
    if (pumps == BellPumps::p1_p2 && c.pumps.size() < 2) {
        throw ConfigError("pumps", "P1+P2 requested but only one pump is configured");
    }
    for (std::size_t p = 0; p < c.pumps.size(); ++p) {
        c.pumps[p].enabled = p == 0 || (p == 1 && pumps == BellPumps::p1_p2);
    }
    if (!initial.empty()) {
        c.initial_state.name = initial;
        c.initial_state.occupations.clear();
    }
    validate(c);
    return c;
}

ScenarioReport run_bell(const ScenarioConfig& config, BellChannels channels, BellPumps pumps,
                        const std::string& initial, const RunOptions& options)
{
    const ScenarioConfig c = configure_bell(config, channels, pumps, initial);
    ScenarioReport report = run_scenario(c, options);
    if (options.trajectory) {
        try {
            report.three_level_fit =
                fit_three_level(report.times, {report.trace("P_gg"), report.trace("P_S"), report.trace("P_T")});
        } catch (const std::exception& e) {
            report.three_level_error = e.what();
        }
    }
    return report;
}

ScenarioReport run_w(const ScenarioConfig& config, const std::string& initial, const RunOptions& options)
{
    if (config.qubit_count() != 3) throw ConfigError("qubits", "the W scenario needs three qubits");
    ScenarioConfig c = config;
    if (!initial.empty()) {
        c.initial_state.name = initial;
        c.initial_state.occupations.clear();
    }
    return run_scenario(c, options);
}

SpectroscopyResult run_spectroscopy(const ScenarioConfig& config, const std::vector<double>& frequencies,
                                    const SpectroscopyOptions& options)
{
    const std::size_t n = config.qubit_count();
    if (options.drive_qubit >= n) throw std::invalid_argument("spectroscopy: drive qubit out of range");
    if (!(options.amplitude > 0.0)) throw std::invalid_argument("spectroscopy: amplitude must be positive");
    if (!(options.duration > 0.0) || !(options.sample_step > 0.0)) {
        throw std::invalid_argument("spectroscopy: duration and sample step must be positive");
    }
    const int qd = config.truncation.qubit_dim;

    SpectroscopyResult out;
    out.frequencies = frequencies;
    for (const auto& label : basis_labels(n, qd)) out.labels.push_back(label);
    for (const auto& name : named_eigenstates(n)) out.labels.push_back(name);
    out.populations.assign(out.labels.size(), std::vector<double>(frequencies.size(), 0.0));
    out.excited.assign(frequencies.size(), 0.0);

    const std::vector<double> grid = time_grid(options.duration, options.sample_step);
    for (std::size_t f = 0; f < frequencies.size(); ++f) {
        ScenarioConfig c = config;
        for (auto& ch : c.raman.channels) ch.enabled = false;
        PumpDrive probe;
        probe.label = "probe";
        probe.amplitudes.assign(n, 0.0);
        probe.amplitudes[options.drive_qubit] = options.amplitude;
        probe.frequency = frequencies[f];
        c.pumps = {probe};
        c.initial_state = {std::string(n, 'g'), {}};
        c.truncation.keep_idle_resonators = false;

        BuildOptions bo;
        bo.include_resonators = false;
        const HamiltonianModel model = build_dispersive(c, bo);
        const Liouvillian l = build_liouvillian(model.h, build_collapse_set(c, model), false);
        std::vector<Observable> obs;
        for (const auto& label : out.labels) {
            const SparseMatrix p = lift_register_operator(model.h.space, projector(qubit_state(label, n, qd))).matrix;
            obs.push_back({label, [p](const DenseMatrix& rho) { return trace_product(p, rho); }});
        }
        const EvolutionResult r = evolve(l, initial_density(c, model.h.space), grid, obs, evolve_options(c));
        // Trapezoid time average.
        for (std::size_t k = 0; k < obs.size(); ++k) {
            const auto& y = r.traces[k];
            double acc = 0.0;
            for (std::size_t i = 1; i < y.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (r.times[i] - r.times[i - 1]);
            out.populations[k][f] = acc / (r.times.back() - r.times.front());
        }
        out.excited[f] = 1.0 - out.populations[0][f];
    }
    return out;
}

std::vector<double> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_height)
{
    if (x.size() != y.size()) throw std::invalid_argument("find_peaks: length mismatch");
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > min_height)) continue;
        // Parabola through the three samples around the maximum.
        const double den = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double shift = 0.0;
        if (den < 0.0) shift = 0.5 * (y[i - 1] - y[i + 1]) / den;
        const double h = shift >= 0.0 ? x[i + 1] - x[i] : x[i] - x[i - 1];
        peaks.push_back(x[i] + shift * h);
    }
    return peaks;
}

SweepAxis parse_sweep_axis(const std::string& text)
{
    if (text == "n_bar") return SweepAxis::n_bar;
    if (text == "chi") return SweepAxis::chi;
    if (text == "kappa") return SweepAxis::kappa;
    if (text == "T1") return SweepAxis::t1;
    if (text == "T_phi") return SweepAxis::t_phi;
    throw std::invalid_argument("axis must be one of n_bar, chi, kappa, T1, T_phi; got '" + text + "'");
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::n_bar: return "n_bar";
    case SweepAxis::chi: return "chi";
    case SweepAxis::kappa: return "kappa";
    case SweepAxis::t1: return "T1";
    case SweepAxis::t_phi: return "T_phi";
    }
    return "?";
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& config, SweepAxis axis, double value)
{
    ScenarioConfig c = config;
    switch (axis) {
    case SweepAxis::n_bar:
        for (auto& ch : c.raman.channels) {
            if (!ch.enabled) continue;
            ch.n_bar = value;
            ch.amplitude.reset();
        }
        break;
    case SweepAxis::chi:
        for (auto& r : c.resonators) r.chi = value;
        break;
    case SweepAxis::kappa:
        for (auto& r : c.resonators) r.kappa = value;
        break;
    case SweepAxis::t1:
        for (auto& q : c.qubits) {
            const double gamma_phi = derive_rates(q, c.dephasing).gamma_phi;
            q.t1 = value;
            const double gamma1 = std::isinf(value) ? 0.0 : 1.0 / value;
            q.t2e = t2e_for(gamma1, gamma_phi, c.dephasing);
        }
        break;
    case SweepAxis::t_phi:
        for (auto& q : c.qubits) {
            const double gamma1 = derive_rates(q, c.dephasing).gamma1;
            q.t2e = t2e_for(gamma1, std::isinf(value) ? 0.0 : 1.0 / value, c.dephasing);
        }
        break;
    }
    validate(c);
    return c;
}

TransferRates measure_transfer_rates(const ScenarioConfig& config)
{
    if (config.qubit_count() != 2) throw ConfigError("qubits", "transfer rates are defined for two qubits");
    ScenarioConfig c = config;
    for (auto& p : c.pumps) p.enabled = false;
    c.decoherence = false;
    c.target_state = "T";
    c.initial_state = {"S", {}};

    // Lengthen the window until the decay is resolved.
    std::string last_error;
    for (double duration : {10.0, 30.0, 90.0}) {
        c.t_final = duration;
        c.t_step = duration / 500.0;
        RunOptions o;
        o.steady = false;
        const ScenarioReport r = run_scenario(c, o);
        try {
            const ExponentialFit fit = fit_exponential(r.times, r.trace("P_S"));
            if (fit.rate * duration < 3.0 && duration < 90.0) continue;
            TransferRates t;
            t.fit = fit;
            t.duration = duration;
            const double residual_singlet = std::clamp(fit.asymptote, 0.0, 1.0);
            t.forward = fit.rate * (1.0 - residual_singlet);
            t.reverse = fit.rate * residual_singlet;
            return t;
        } catch (const FitError& e) {
            last_error = e.what();
        }
    }
    throw FitError("transfer rate fit failed: " + last_error);
}

std::vector<double> parse_range(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("range must look like start:stop:count, got '" + text + "'");
    std::size_t used = 0;
    double a = 0.0, b = 0.0;
    long n = 0;
    try {
        a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("");
        b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("");
        n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("range must look like start:stop:count, got '" + text + "'");
    }
    if (n < 1) throw std::invalid_argument("range count must be at least 1");
    std::vector<double> v;
    for (long i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
    return v;
}

SweepResult run_sweep(const ScenarioConfig& config, SweepAxis axis, const std::vector<double>& values,
                      unsigned threads)
{
    SweepResult result;
    result.axis = axis;
    result.points.resize(values.size());
    const bool bell = config.qubit_count() == 2;

    auto work = [&](std::size_t i) {
        SweepPoint& pt = result.points[i];
        pt.value = values[i];
        try {
            const ScenarioConfig c = apply_sweep_value(config, axis, values[i]);
            RunOptions o;
            o.trajectory = false;
            const ScenarioReport r = run_scenario(c, o);
            pt.steady_fidelity = r.steady->fidelity;
            pt.steady_residual = r.steady->residual;
            pt.steady_method = r.steady->method;
            pt.ok = true;
            if (bell) {
                try {
                    pt.transfer = measure_transfer_rates(c);
                } catch (const std::exception& e) {
                    pt.transfer_error = e.what();
                }
            }
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, values.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < values.size(); i = next++) work(i);
        });
    }
    for (auto& th : pool) th.join();
    return result;
}

ReadoutMatrix::ReadoutMatrix(Eigen::MatrixXd m) : m_(std::move(m))
{
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw std::invalid_argument("readout matrix must be square");
    if ((m_.array() < 0.0).any() || (m_.array() > 1.0).any()) {
        throw std::invalid_argument("readout matrix entries must lie in [0, 1]");
    }
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        if (std::abs(m_.col(j).sum() - 1.0) > 1e-6) {
            throw std::invalid_argument("readout matrix column " + std::to_string(j) + " does not sum to 1");
        }
    }
}

ReadoutMatrix ReadoutMatrix::tensor(const std::vector<ReadoutMatrix>& per_qubit)
{
    if (per_qubit.empty()) throw std::invalid_argument("no readout matrices");
    Eigen::MatrixXd acc = per_qubit.front().matrix();
    for (std::size_t q = 1; q < per_qubit.size(); ++q) {
        const Eigen::MatrixXd& b = per_qubit[q].matrix();
        Eigen::MatrixXd next(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (Eigen::Index i = 0; i < acc.rows(); ++i) {
            for (Eigen::Index j = 0; j < acc.cols(); ++j) {
                next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
            }
        }
        acc = std::move(next);
    }
    return ReadoutMatrix(acc);
}

MitigatedPopulations apply_readout_mitigation(const ReadoutMatrix& m, const Eigen::VectorXd& measured)
{
    if (measured.size() != m.size()) throw std::invalid_argument("measured populations do not match the matrix");
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.matrix());
    const auto& s = svd.singularValues();
    MitigatedPopulations out;
    out.condition_number = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : kInfinity;
    if (!(out.condition_number < 1e12)) throw std::domain_error("readout matrix is singular");
    out.raw = m.matrix().partialPivLu().solve(measured);
    out.probabilities = out.raw.cwiseMax(0.0);
    const double total = out.probabilities.sum();
    if (!(total > 0.0)) throw std::domain_error("mitigated populations vanish after clipping");
    out.probabilities /= total;
    return out;
}

} // namespace qbath
