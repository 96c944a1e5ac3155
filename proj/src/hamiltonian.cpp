#include "qbath/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "qbath/rates.hpp"
#include "qbath/states.hpp"
#include "qbath/units.hpp"

namespace qbath {

namespace {

bool drive_requested(const RamanChannel& ch)
{
    if (!ch.enabled) return false;
    if (ch.n_bar) return *ch.n_bar > 0.0;
    return ch.amplitude && *ch.amplitude != 0.0;
}

// Mean excitation of each qubit in the target state, for the dressed detuning reference.
std::vector<double> target_populations(const ScenarioConfig& config)
{
    const std::size_t n = config.qubit_count();
    const int qd = config.truncation.qubit_dim;
    const StateVector psi = qubit_state(config.target_state, n, qd);
    const auto reg = CompositeSpace::qubits_and_resonators(n, qd, 0, 2);
    std::vector<double> pops(n, 0.0);
    for (Eigen::Index idx = 0; idx < reg.total_dim(); ++idx) {
        const auto occ = reg.occupations_of(idx);
        for (std::size_t i = 0; i < n; ++i) pops[i] += occ[i] * std::norm(psi(idx));
    }
    return pops;
}

SpacePtr register_space(std::size_t n_qubits, int qubit_dim)
{
    return make_space(CompositeSpace::qubits_and_resonators(n_qubits, qubit_dim, 0, 2));
}

int excitation_number(const CompositeSpace& reg, Eigen::Index idx)
{
    const auto occ = reg.occupations_of(idx);
    int total = 0;
    for (int n : occ) total += n;
    return total;
}

// Qubit-register part of the dispersive Hamiltonian, angular units.
SparseMatrix register_hamiltonian(const ScenarioConfig& config, const Frame& frame, bool with_stark)
{
    const std::size_t n = config.qubit_count();
    const int qd = config.truncation.qubit_dim;
    const auto reg = register_space(n, qd);
    const Eigen::Index dim = reg->total_dim();

    std::vector<Eigen::Triplet<Complex>> diag;
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const auto occ = reg->occupations_of(idx);
        double e = 0.0;
        int total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double f = config.qubits[i].working_freq;
            if (with_stark) f -= frame.drives[i].stark_shift;
            e += f * occ[i] + 0.5 * config.qubits[i].alpha * occ[i] * (occ[i] - 1);
            total += occ[i];
        }
        e -= frame.manifold_energies[static_cast<std::size_t>(total)];
        if (e != 0.0) diag.emplace_back(idx, idx, angular(e));
    }
    SparseMatrix h(dim, dim);
    h.setFromTriplets(diag.begin(), diag.end());

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Operator hop = raising_op(reg, i) * lowering_op(reg, i + 1);
        h += (hop.matrix + SparseMatrix(hop.matrix.adjoint())) * Complex(-angular(config.couplings.j[i]));
    }

    // Pump terms restricted to the manifold transitions each pump owns.
    std::vector<Eigen::Triplet<Complex>> pump_entries;
    for (std::size_t p = 0; p < config.pumps.size(); ++p) {
        const auto& pump = config.pumps[p];
        if (!pump.enabled) continue;
        Operator up = zero_operator(reg);
        for (std::size_t i = 0; i < n; ++i) {
            up = up + scale(raising_op(reg, i), Complex(angular(pump.amplitudes[i].real()),
                                                        angular(pump.amplitudes[i].imag())));
        }
        for (Eigen::Index k = 0; k < up.matrix.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(up.matrix, k); it; ++it) {
                const int source = excitation_number(*reg, it.col());
                if (frame.manifold_pump[static_cast<std::size_t>(source)] != static_cast<int>(p)) continue;
                pump_entries.emplace_back(it.row(), it.col(), it.value());
                pump_entries.emplace_back(it.col(), it.row(), std::conj(it.value()));
            }
        }
    }
    SparseMatrix pumps(dim, dim);
    pumps.setFromTriplets(pump_entries.begin(), pump_entries.end());
    h += pumps;
    prune(h);
    return h;
}

Frame manifold_frame(const ScenarioConfig& config)
{
    const std::size_t n = config.qubit_count();
    const int max_exc = static_cast<int>(n) * (config.truncation.qubit_dim - 1);

    int primary = -1;
    for (std::size_t p = 0; p < config.pumps.size(); ++p) {
        if (config.pumps[p].enabled) {
            primary = static_cast<int>(p);
            break;
        }
    }
    double max_amp = 0.0;
    for (const auto& pump : config.pumps) {
        if (!pump.enabled) continue;
        for (auto z : pump.amplitudes) max_amp = std::max(max_amp, std::abs(z));
    }
    for (std::size_t a = 0; a < config.pumps.size(); ++a) {
        for (std::size_t b = a + 1; b < config.pumps.size(); ++b) {
            const auto& pa = config.pumps[a];
            const auto& pb = config.pumps[b];
            if (!pa.enabled || !pb.enabled) continue;
            if (pa.source_manifold == pb.source_manifold) {
                throw ConfigError("pumps", "pumps '" + pa.label + "' and '" + pb.label +
                                                   "' drive the same excitation manifold");
            }
            if (std::abs(pa.frequency - pb.frequency) <= 10.0 * max_amp) {
                throw ConfigError("pumps", "pump frequencies closer than 10x the largest amplitude; "
                                           "the co-rotating treatment does not apply");
            }
        }
    }

    const double reference = config.pumps.empty() ? config.qubits.front().working_freq
                                                  : config.pumps.front().frequency;
    Frame frame;
    frame.manifold_energies.assign(static_cast<std::size_t>(max_exc) + 1, 0.0);
    frame.manifold_pump.assign(static_cast<std::size_t>(max_exc), -1);
    for (int k = 0; k < max_exc; ++k) {
        int owner = primary;
        for (std::size_t p = 0; p < config.pumps.size(); ++p) {
            if (config.pumps[p].enabled && config.pumps[p].source_manifold == k) owner = static_cast<int>(p);
        }
        frame.manifold_pump[static_cast<std::size_t>(k)] = owner;
        const double step = owner >= 0 ? config.pumps[static_cast<std::size_t>(owner)].frequency : reference;
        frame.manifold_energies[static_cast<std::size_t>(k) + 1] = frame.manifold_energies[static_cast<std::size_t>(k)] + step;
    }
    return frame;
}

} // namespace

std::vector<ResonatorDrive> resonator_drives(const ScenarioConfig& config)
{
    std::vector<double> pops;
    if (config.raman.reference == DetuningReference::target) pops = target_populations(config);

    std::vector<ResonatorDrive> out;
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        const auto& r = config.resonators[k];
        const auto& ch = config.raman.channels[k];
        ResonatorDrive d;
        d.resonator = k;
        d.detuning = ch.detuning;
        if (config.raman.reference == DetuningReference::target && k < pops.size()) {
            // The target state pulls the resonator by 2 chi <n>; keep the
            // drive the configured detuning below the pulled line.
            d.detuning -= 2.0 * r.chi * pops[k];
        }
        d.drive_freq = r.omega_r - d.detuning;
        d.active = drive_requested(ch);
        if (d.active) {
            if (ch.n_bar) {
                d.epsilon = drive_amplitude(*ch.n_bar, d.detuning, r.kappa);
            } else {
                d.epsilon = *ch.amplitude;
            }
            const std::complex<double> denom(d.detuning, -0.5 * r.kappa);
            d.alpha = -d.epsilon / denom;
            d.n_bar = std::norm(d.alpha);
            d.stark_shift = stark_shift(d.n_bar, r.chi);
        }
        out.push_back(d);
    }
    return out;
}

std::vector<std::size_t> simulated_resonators(const ScenarioConfig& config)
{
    const std::size_t n = config.qubit_count();
    const auto drives = resonator_drives(config);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        bool excited = false;
        const auto& occ = config.initial_state.occupations;
        if (config.initial_state.name.empty() && occ.size() == 2 * n) excited = occ[n + k] != 0;
        if (drives[k].active || excited || config.truncation.keep_idle_resonators) keep.push_back(k);
    }
    return keep;
}

SpacePtr scenario_space(const ScenarioConfig& config, bool include_resonators)
{
    std::vector<ModeSpec> modes;
    for (const auto& q : config.qubits) modes.push_back({q.label, ModeKind::qubit, config.truncation.qubit_dim});
    if (include_resonators) {
        for (auto k : simulated_resonators(config)) {
            modes.push_back({config.resonators[k].label, ModeKind::resonator, config.truncation.resonator_dim});
        }
    }
    return make_space(CompositeSpace(std::move(modes)));
}

Operator lift_register_operator(const SpacePtr& space, const SparseMatrix& register_op)
{
    const Eigen::Index reg_dim = register_op.rows();
    if (reg_dim == 0 || space->total_dim() % reg_dim != 0) {
        throw std::invalid_argument("register operator does not fit the space");
    }
    const Eigen::Index rest = space->total_dim() / reg_dim;
    SparseMatrix full = Eigen::kroneckerProduct(register_op, sparse_identity(rest));
    prune(full);
    return {space, std::move(full)};
}

StateVector register_state_in_space(const CompositeSpace& space, const StateVector& register_state)
{
    const Eigen::Index reg_dim = register_state.size();
    if (reg_dim == 0 || space.total_dim() % reg_dim != 0) {
        throw std::invalid_argument("register state does not fit the space");
    }
    const Eigen::Index rest = space.total_dim() / reg_dim;
    StateVector psi = StateVector::Zero(space.total_dim());
    for (Eigen::Index i = 0; i < reg_dim; ++i) psi(i * rest) = register_state(i);
    return psi;
}

DensityMatrix initial_density(const ScenarioConfig& config, const SpacePtr& space)
{
    const std::size_t n = config.qubit_count();
    const int qd = config.truncation.qubit_dim;
    if (!config.initial_state.name.empty()) {
        return pure_density(space, register_state_in_space(*space, qubit_state(config.initial_state.name, n, qd)));
    }
    const auto& occ = config.initial_state.occupations;
    std::vector<int> full(space->size(), 0);
    for (std::size_t i = 0; i < n; ++i) full[i] = occ[i];
    if (occ.size() == 2 * n) {
        const auto kept = simulated_resonators(config);
        for (std::size_t j = 0; j + n < space->size() && j < kept.size(); ++j) full[n + j] = occ[n + kept[j]];
    }
    return pure_density(space, basis_state(*space, full));
}

HamiltonianModel build_dispersive(const ScenarioConfig& config, const BuildOptions& options)
{
    validate(config);
    HamiltonianModel model;
    model.kind = ModelKind::dispersive;
    model.n_qubits = config.qubit_count();
    model.frame = manifold_frame(config);
    model.frame.drives = resonator_drives(config);
    model.frame.resonator_frame = config.resonator_frame;

    const auto space = scenario_space(config, options.include_resonators);
    const bool with_stark = options.include_resonators && config.stark_compensation;
    SparseMatrix reg = register_hamiltonian(config, model.frame, with_stark);
    Operator h = lift_register_operator(space, reg);

    if (options.include_resonators) {
        const auto kept = simulated_resonators(config);
        model.frame.resonator_modes = kept;
        for (std::size_t j = 0; j < kept.size(); ++j) {
            const std::size_t k = kept[j];
            const std::size_t mode = model.n_qubits + j;
            const auto& r = config.resonators[k];
            const auto& d = model.frame.drives[k];
            const Operator nq = number_op(space, k);
            const Operator c = lowering_op(space, mode);
            const Operator nc = number_op(space, mode);
            const double x = angular(2.0 * r.chi);
            h = h + scale(nc, angular(d.detuning)) + scale(nq * nc, x);
            if (config.resonator_frame == ResonatorFrame::lab) {
                const Complex eps(angular(d.epsilon.real()), angular(d.epsilon.imag()));
                h = h + scale(adjoint(c), eps) + scale(c, std::conj(eps));
            } else {
                // c = alpha + d: the drive is absorbed into the displacement and the
                // dispersive term leaves a qubit-conditioned drive on the fluctuation.
                const Complex a = d.alpha;
                h = h + scale(nq * (scale(c, std::conj(a)) + scale(adjoint(c), a)), x) +
                    scale(nq, x * std::norm(a));
            }
        }
    }
    model.h = std::move(h);
    return model;
}

HamiltonianModel build_jaynes_cummings(const ScenarioConfig& config, std::optional<double> frame_frequency)
{
    validate(config);
    const std::size_t n = config.qubit_count();
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        if (!config.resonators[k].g) {
            throw ConfigError("resonators[" + std::to_string(k) + "].g", "required for the Jaynes-Cummings model");
        }
    }
    const auto drives = resonator_drives(config);
    std::optional<double> common = frame_frequency;
    for (const auto& d : drives) {
        if (!d.active) continue;
        if (common && std::abs(*common - d.drive_freq) > 1e-9) {
            throw ConfigError("raman.channels", "resonator drives at different frequencies have no common rotating frame");
        }
        common = d.drive_freq;
    }
    for (const auto& pump : config.pumps) {
        if (!pump.enabled) continue;
        if (common && std::abs(*common - pump.frequency) > 1e-9) {
            throw ConfigError("pumps", "pump frequency differs from the common frame frequency");
        }
        common = pump.frequency;
    }
    const double wf = common.value_or(config.qubits.front().working_freq);

    std::vector<ModeSpec> modes;
    for (const auto& q : config.qubits) modes.push_back({q.label, ModeKind::qubit, config.truncation.qubit_dim});
    for (const auto& r : config.resonators) modes.push_back({r.label, ModeKind::resonator, config.truncation.resonator_dim});
    const auto space = make_space(CompositeSpace(std::move(modes)));

    Operator h = zero_operator(space);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& q = config.qubits[i];
        const Operator nq = number_op(space, i);
        h = h + scale(nq, angular(q.working_freq - wf)) +
            scale(nq * (nq - identity(space)), angular(0.5 * q.alpha));
        if (i + 1 < n) {
            const Operator hop = raising_op(space, i) * lowering_op(space, i + 1);
            h = h + scale(hop + adjoint(hop), -angular(config.couplings.j[i]));
        }
    }
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        const auto& r = config.resonators[k];
        const std::size_t mode = n + k;
        const Operator c = lowering_op(space, mode);
        const Operator b = lowering_op(space, k);
        h = h + scale(number_op(space, mode), angular(r.omega_r - wf));
        const Operator exch = adjoint(c) * b;
        h = h + scale(exch + adjoint(exch), angular(*r.g));
        if (drives[k].active) {
            const Complex eps(angular(drives[k].epsilon.real()), angular(drives[k].epsilon.imag()));
            h = h + scale(adjoint(c), eps) + scale(c, std::conj(eps));
        }
    }
    for (const auto& pump : config.pumps) {
        if (!pump.enabled) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex om(angular(pump.amplitudes[i].real()), angular(pump.amplitudes[i].imag()));
            const Operator bd = raising_op(space, i);
            h = h + scale(bd, om) + scale(adjoint(bd), std::conj(om));
        }
    }

    HamiltonianModel model;
    model.kind = ModelKind::jaynes_cummings;
    model.n_qubits = n;
    model.h = std::move(h);
    model.frame.drives = drives;
    model.frame.resonator_frame = ResonatorFrame::lab;
    model.frame.common_frequency = wf;
    for (std::size_t k = 0; k < config.resonators.size(); ++k) model.frame.resonator_modes.push_back(k);
    const int max_exc = static_cast<int>(n) * (config.truncation.qubit_dim - 1);
    for (int k = 0; k <= max_exc; ++k) model.frame.manifold_energies.push_back(k * wf);
    return model;
}

CollapseSet build_collapse_set(const ScenarioConfig& config, const HamiltonianModel& model)
{
    const auto& space = model.h.space;
    CollapseSet out;
    for (std::size_t j = 0; j < model.frame.resonator_modes.size(); ++j) {
        const auto& r = config.resonators[model.frame.resonator_modes[j]];
        out.push_back({"kappa_" + r.label, lowering_op(space, model.n_qubits + j), angular(r.kappa)});
    }
    if (!config.decoherence) return out;
    for (std::size_t i = 0; i < model.n_qubits; ++i) {
        const auto& q = config.qubits[i];
        const auto rates = derive_rates(q, config.dephasing);
        if (rates.gamma1 > 0.0) out.push_back({"relax_" + q.label, lowering_op(space, i), rates.gamma1});
        if (rates.gamma_phi > 0.0) out.push_back({"dephase_" + q.label, number_op(space, i), rates.gamma_phi});
    }
    return out;
}

std::complex<double> pump_matrix_element(const PumpDrive& pump, const StateVector& bra, const StateVector& ket,
                                         int qubit_dim)
{
    const std::size_t n = pump.amplitudes.size();
    const auto reg = register_space(n, qubit_dim);
    if (bra.size() != reg->total_dim() || ket.size() != reg->total_dim()) {
        throw std::invalid_argument("pump_matrix_element: states do not live on the pumped register");
    }
    SparseMatrix up(reg->total_dim(), reg->total_dim());
    for (std::size_t i = 0; i < n; ++i) up += raising_op(reg, i).matrix * pump.amplitudes[i];
    return bra.dot(up * ket);
}

double chi_closed_form(double g, double alpha, double delta)
{
    return alpha * (g / delta) * (g / delta);
}

double chi_transmon(double g, double alpha, double delta)
{
    return g * g * alpha / (delta * (delta + alpha));
}

double coupling_from_chi(double chi, double alpha, double delta)
{
    const double g2 = chi * delta * (delta + alpha) / alpha;
    if (!(g2 >= 0.0)) throw std::invalid_argument("chi has the wrong sign for this detuning and anharmonicity");
    return std::sqrt(g2);
}

double chi_from_jaynes_cummings(double omega_q, double alpha, double omega_r, double g, int qubit_dim,
                                int resonator_dim)
{
    const auto space = make_space(CompositeSpace({{"q", ModeKind::qubit, qubit_dim},
                                                  {"r", ModeKind::resonator, resonator_dim}}));
    const Operator b = lowering_op(space, 0);
    const Operator c = lowering_op(space, 1);
    const Operator nq = number_op(space, 0);
    Operator h = scale(nq, omega_q) + scale(nq * (nq - identity(space)), 0.5 * alpha) +
                 scale(number_op(space, 1), omega_r) + scale(adjoint(b) * c + adjoint(c) * b, g);
    const Eigen::MatrixXd dense = DenseMatrix(h.matrix).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);

    auto level = [&](int nq_occ, int nr_occ) {
        const Eigen::Index idx = space->index_of({nq_occ, nr_occ});
        Eigen::Index best = 0;
        es.eigenvectors().row(idx).cwiseAbs().maxCoeff(&best);
        return es.eigenvalues()(best);
    };
    return 0.5 * ((level(1, 1) - level(1, 0)) - (level(0, 1) - level(0, 0)));
}

} // namespace qbath
