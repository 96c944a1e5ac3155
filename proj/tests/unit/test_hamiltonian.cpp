#include <doctest.h>

#include <cmath>

#include "qbath/hamiltonian.hpp"
#include "qbath/scenarios.hpp"
#include "qbath/states.hpp"
#include "qbath/units.hpp"
#include "support/oracles.hpp"
#include "support/probes.hpp"

using namespace qbath;
using oracle::Dense;

namespace {

ScenarioConfig bundled(const std::string& file) { return load_scenario_file(oracle::scenario_path(file)); }

Eigen::MatrixXd register_block(const ScenarioConfig& c, const std::vector<std::string>& labels)
{
    double imag = 0.0;
    Eigen::MatrixXd out = probe::register_block(c, labels, &imag);
    CHECK(imag < 1e-12);
    return out;
}

double hermiticity(const Operator& op)
{
    const Dense h(op.matrix);
    return oracle::max_abs(h - h.adjoint());
}

// One transmon with one resonator; the drive and pump share a frequency so
// the Jaynes-Cummings frame exists.
ScenarioConfig single_mode_config(double g)
{
    ScenarioConfig c;
    c.name = "single";
    c.qubits = {{"Q1", 4202.0, -197.0, 27.0, 14.0, 4202.0}};
    c.resonators = {{"R1", 6481.0, 1.1, 0.0, g}};
    c.couplings.j = {};
    c.pumps = {{"P1", {0.2}, 6470.0, 0, true}};
    c.raman.channels = {{11.0, std::nullopt, 0.5, true}};
    c.target_state = "e";
    c.initial_state.name = "g";
    c.truncation = {3, 4, false};
    c.resonator_frame = ResonatorFrame::lab;
    return c;
}

} // namespace

TEST_SUITE("hamiltonian")
{
    TEST_CASE("every built Hamiltonian is Hermitian")
    {
        for (const auto& file : {"bell.json", "bell_pump2.json", "bell_single_channel.json", "w.json"}) {
            CAPTURE(file);
            auto c = bundled(file);
            CHECK(hermiticity(build_dispersive(c).h) < 1e-10);
            c.resonator_frame = ResonatorFrame::lab;
            CHECK(hermiticity(build_dispersive(c).h) < 1e-10);
            BuildOptions reg_only;
            reg_only.include_resonators = false;
            CHECK(hermiticity(build_dispersive(c, reg_only).h) < 1e-10);
        }
        CHECK(hermiticity(build_jaynes_cummings(single_mode_config(50.0)).h) < 1e-10);
    }

    TEST_CASE("bell single-excitation block: gap 2J with T below S")
    {
        auto c = bundled("bell.json");
        const Eigen::MatrixXd block = register_block(c, {"ge", "eg"});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
        CHECK(std::abs(gap - 2.0 * c.couplings.j[0]) <= 1e-9 * 10.0);
        // lower eigenvector symmetric (T), upper antisymmetric (S)
        const Eigen::VectorXd low = es.eigenvectors().col(0);
        const Eigen::VectorXd high = es.eigenvectors().col(1);
        CHECK(std::abs(std::abs(low(0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
        CHECK(low(0) * low(1) > 0.0);
        CHECK(high(0) * high(1) < 0.0);
        // the pump frame puts S at zero detuning
        CHECK(std::abs(es.eigenvalues()(1)) < 1e-9);
    }

    TEST_CASE("w single-excitation eigenvalues relative to W are (0, J, 3J)")
    {
        auto c = bundled("w.json");
        const double j = c.couplings.j[0];
        const Eigen::MatrixXd block = register_block(c, {"egg", "geg", "gge"});
        // the transcribed hopping matrix, relative to qubit 1
        Eigen::Matrix3d expect;
        expect << 0, -j, 0, -j, j, -j, 0, -j, 0;
        CHECK((block - block(0, 0) * Eigen::Matrix3d::Identity() - expect).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        const Eigen::Vector3d rel = es.eigenvalues().array() - es.eigenvalues()(0);
        CHECK(std::abs(rel(1) - j) <= 1e-9 * j);
        CHECK(std::abs(rel(2) - 3.0 * j) <= 1e-9 * 3.0 * j);
        // lowest is W
        const Eigen::Vector3d w = es.eigenvectors().col(0);
        CHECK(std::abs(std::abs(w.sum()) - std::sqrt(3.0)) < 1e-12);
        // the pump sits on B
        CHECK(std::abs(es.eigenvalues()(2)) < 1e-9);
    }

    TEST_CASE("no couplings and no drives give a diagonal Hamiltonian")
    {
        auto c = bundled("bell.json");
        c.couplings.j = {0.0};
        for (auto& p : c.pumps) p.enabled = false;
        for (auto& ch : c.raman.channels) ch.enabled = false;
        c.truncation.keep_idle_resonators = true;
        c.truncation.qubit_dim = 3;
        for (auto frame : {ResonatorFrame::lab, ResonatorFrame::displaced}) {
            c.resonator_frame = frame;
            const auto model = build_dispersive(c);
            CHECK(model.h.space->resonator_count() == 2);
            const Dense h(model.h.matrix);
            CHECK(oracle::max_abs(h - Dense(h.diagonal().asDiagonal())) == 0.0);
            // |f g, 0 0>: twice the qubit detuning from the frame plus alpha
            const auto idx = model.h.space->index_of({2, 0, 0, 0});
            // without an enabled pump the frame still steps by the first pump frequency
            const double f = c.qubits[0].working_freq - c.pumps.front().frequency;
            CHECK(linear(h(idx, idx).real()) == doctest::Approx(2.0 * f + c.qubits[0].alpha));
        }
    }

    TEST_CASE("dispersive resonator terms in the lab frame match a dense oracle")
    {
        auto c = bundled("bell_single_channel.json");
        c.resonator_frame = ResonatorFrame::lab;
        c.stark_compensation = false;
        const auto model = build_dispersive(c);
        const auto& space = *model.h.space;
        REQUIRE(space.size() == 3);
        const auto drive = model.frame.drives[1];
        REQUIRE(drive.active);
        const std::vector<int> dims{2, 2, c.truncation.resonator_dim};
        BuildOptions reg_only;
        reg_only.include_resonators = false;
        const Dense hreg(build_dispersive(c, reg_only).h.matrix);
        const Dense a = oracle::lowering(dims[2]);
        const Dense nq2 = oracle::on_mode(dims, 1, oracle::lowering(2).adjoint() * oracle::lowering(2));
        const Dense nc = oracle::on_mode(dims, 2, a.adjoint() * a);
        const Dense cc = oracle::on_mode(dims, 2, a);
        const Complex eps(angular(drive.epsilon.real()), angular(drive.epsilon.imag()));
        const Dense expect = oracle::kron(hreg, oracle::eye(dims[2])) + angular(drive.detuning) * nc +
                             angular(2.0 * c.resonators[1].chi) * nq2 * nc + eps * cc.adjoint() + std::conj(eps) * cc;
        CHECK(oracle::max_abs(Dense(model.h.matrix) - expect) < 1e-9);
    }

    TEST_CASE("drive bookkeeping")
    {
        auto c = bundled("bell.json");
        const auto d = resonator_drives(c);
        REQUIRE(d.size() == 2);
        CHECK(d[0].n_bar == doctest::Approx(0.74).epsilon(1e-12));
        CHECK(d[1].n_bar == doctest::Approx(0.60).epsilon(1e-12));
        CHECK(std::abs(d[0].epsilon) == doctest::Approx(std::sqrt(0.74 * (100.0 + 0.55 * 0.55))));
        CHECK(d[0].stark_shift == doctest::Approx(2.0 * 0.74 * -0.75));
        CHECK(d[0].drive_freq == doctest::Approx(6481.0 - 10.0));

        // target reference: the drive follows the resonator line pulled by <n_i> = 1/2
        c.raman.reference = DetuningReference::target;
        const auto dt = resonator_drives(c);
        CHECK(dt[0].detuning == doctest::Approx(10.0 - 2.0 * -0.75 * 0.5));

        c.raman.channels[0].n_bar = 0.0;
        CHECK_FALSE(resonator_drives(c)[0].active);
        CHECK(simulated_resonators(c) == std::vector<std::size_t>{1});
        c.truncation.keep_idle_resonators = true;
        CHECK(simulated_resonators(c) == std::vector<std::size_t>{0, 1});
    }

    TEST_CASE("collapse set")
    {
        auto c = bundled("bell.json");
        const auto model = build_dispersive(c);
        const auto set = build_collapse_set(c, model);
        CHECK(set.size() == 6);
        int kappas = 0, relax = 0, dephase = 0;
        for (const auto& t : set) {
            CHECK(t.rate >= 0.0);
            if (t.label.rfind("kappa_", 0) == 0) ++kappas;
            if (t.label.rfind("relax_", 0) == 0) ++relax;
            if (t.label.rfind("dephase_", 0) == 0) ++dephase;
        }
        CHECK(kappas == 2);
        CHECK(relax == 2);
        CHECK(dephase == 2);
        CHECK(set[0].rate == doctest::Approx(kTwoPi * 1.1));
        CHECK(set[1].rate == doctest::Approx(kTwoPi * 0.87));

        c.qubits[0].t1 = kInfinity;
        c.qubits[0].t2e = kInfinity;
        const auto fewer = build_collapse_set(c, build_dispersive(c));
        CHECK(fewer.size() == 4);
        for (const auto& t : fewer) CHECK(t.label.find("Q1") == std::string::npos);

        c.decoherence = false;
        CHECK(build_collapse_set(c, build_dispersive(c)).size() == 2);
    }

    TEST_CASE("pump selection rules")
    {
        auto bell = bundled("bell.json");
        const auto& p = bell.pumps[0];
        const double om = p.amplitudes[0].real();
        CHECK(std::abs(pump_matrix_element(p, qubit_state("T", 2), qubit_state("gg", 2))) < 1e-12);
        CHECK(std::abs(pump_matrix_element(p, qubit_state("ee", 2), qubit_state("T", 2))) < 1e-12);
        CHECK(std::abs(pump_matrix_element(p, qubit_state("S", 2), qubit_state("gg", 2)) - std::sqrt(2.0) * om) < 1e-12);
        CHECK(std::abs(pump_matrix_element(p, qubit_state("ee", 2), qubit_state("S", 2))) > 0.1);

        auto w = bundled("w.json");
        const auto& pw = w.pumps[0];
        CHECK(std::abs(pump_matrix_element(pw, qubit_state("D", 3), qubit_state("W", 3))) < 1e-12);
        CHECK(std::abs(pump_matrix_element(pw, qubit_state("E", 3), qubit_state("A", 3))) < 1e-12);
        CHECK(std::abs(pump_matrix_element(pw, qubit_state("B", 3), qubit_state("ggg", 3))) > 0.1);
        CHECK(std::abs(pump_matrix_element(pw, qubit_state("A", 3), qubit_state("ggg", 3))) < 1e-12);
        CHECK(std::abs(pump_matrix_element(pw, qubit_state("W", 3), qubit_state("ggg", 3))) ==
              doctest::Approx(0.74 / std::sqrt(3.0)));
        CHECK_THROWS_AS(pump_matrix_element(pw, qubit_state("T", 2), qubit_state("gg", 2)), std::invalid_argument);
    }

    TEST_CASE("manifold frame with two pumps")
    {
        auto c = bundled("bell_pump2.json");
        const auto model = build_dispersive(c);
        REQUIRE(model.frame.manifold_energies.size() == 3);
        CHECK(model.frame.manifold_energies[1] == doctest::Approx(c.pumps[0].frequency));
        CHECK(model.frame.manifold_energies[2] == doctest::Approx(c.pumps[0].frequency + c.pumps[1].frequency));
        CHECK(model.frame.manifold_pump == std::vector<int>{0, 1});

        auto close = c;
        close.pumps[1].frequency = close.pumps[0].frequency - 3.0;
        CHECK_THROWS_AS(build_dispersive(close), ConfigError);
        auto same = c;
        same.pumps[1].source_manifold = 0;
        CHECK_THROWS_AS(build_dispersive(same), ConfigError);
    }

    TEST_CASE("jaynes-cummings with g = 0 equals the dispersive model with chi = 0")
    {
        auto c = single_mode_config(0.0);
        const auto jc = build_jaynes_cummings(c);
        const auto disp = build_dispersive(c);
        REQUIRE(*jc.h.space == *disp.h.space);
        CHECK(oracle::max_abs(Dense(jc.h.matrix) - Dense(disp.h.matrix)) < 1e-9);
    }

    TEST_CASE("jaynes-cummings refuses drives without a common frame")
    {
        auto c = bundled("bell.json");
        for (auto& r : c.resonators) r.g = 50.0;
        CHECK_THROWS_AS(build_jaynes_cummings(c), ConfigError);
        auto missing = bundled("bell.json");
        CHECK_THROWS_AS(build_jaynes_cummings(missing), ConfigError);
    }

    TEST_CASE("dispersive shift estimates")
    {
        CHECK(chi_closed_form(50.0, -197.0, 2279.0) == doctest::Approx(-0.0948).epsilon(1e-3));
        const double chi = chi_transmon(50.0, -197.0, -2279.0);
        CHECK(coupling_from_chi(chi, -197.0, -2279.0) == doctest::Approx(50.0));
        CHECK_THROWS_AS(coupling_from_chi(0.5, -197.0, -2279.0), std::invalid_argument);
    }

    TEST_CASE("exact diagonalization reproduces the dispersive shift")
    {
        const double wq = 4202.0, alpha = -197.0, wr = 6481.0;
        const double delta = wq - wr;
        for (double ratio : {0.005, 0.01, 0.02, 0.03, 0.044}) {
            CAPTURE(ratio);
            const double g = ratio * std::abs(delta);
            const double exact = chi_from_jaynes_cummings(wq, alpha, wr, g);
            // closed form alpha (g/delta)^2
            CHECK(std::abs(exact - chi_closed_form(g, alpha, delta)) <= 0.10 * std::abs(exact));
            // second-order transmon formula
            CHECK(std::abs(exact - chi_transmon(g, alpha, delta)) <= 0.02 * std::abs(exact));
        }
    }

    TEST_CASE("dispersive and jaynes-cummings single-excitation gaps agree")
    {
        auto c = bundled("bell.json");
        for (auto& p : c.pumps) p.enabled = false;
        for (auto& ch : c.raman.channels) ch.enabled = false;
        c.truncation.resonator_dim = 2;
        for (double ratio : {0.02, 0.035, 0.05}) {
            CAPTURE(ratio);
            for (std::size_t k = 0; k < 2; ++k) {
                c.resonators[k].g = ratio * (c.resonators[k].omega_r - c.qubits[k].working_freq);
                c.resonators[k].chi = chi_from_jaynes_cummings(c.qubits[k].working_freq, c.qubits[k].alpha,
                                                               c.resonators[k].omega_r, *c.resonators[k].g);
            }
            const auto jc = build_jaynes_cummings(c);
            const Eigen::MatrixXd h = Dense(jc.h.matrix).real();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            const auto& space = *jc.h.space;
            std::vector<double> qubit_like;
            for (Eigen::Index s = 0; s < h.rows(); ++s) {
                double w = 0.0;
                for (const auto& label : {"ge", "eg"}) {
                    auto occ = occupations_from_label(label);
                    occ.insert(occ.end(), {0, 0});
                    w += std::norm(es.eigenvectors()(space.index_of(occ), s));
                }
                if (w > 0.5) qubit_like.push_back(es.eigenvalues()(s));
            }
            REQUIRE(qubit_like.size() == 2);
            const double jc_gap = linear(std::abs(qubit_like[1] - qubit_like[0]));
            const Eigen::MatrixXd block = register_block(c, {"ge", "eg"});
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(block);
            const double disp_gap = ed.eigenvalues()(1) - ed.eigenvalues()(0);
            CHECK(std::abs(jc_gap - disp_gap) <= 0.05 * disp_gap);
        }
    }

    TEST_CASE("lab and displaced resonator frames give the same steady state")
    {
        // Trajectories differ by the resonator ring-up (the displaced frame
        // starts in the coherent state), so compare stationary states.
        auto c = bundled("bell_single_channel.json");
        RunOptions opts;
        opts.trajectory = false;
        auto displaced = run_scenario(c, opts);
        c.resonator_frame = ResonatorFrame::lab;
        c.truncation.resonator_dim = 8;
        auto lab = run_scenario(c, opts);
        REQUIRE(displaced.steady);
        REQUIRE(lab.steady);
        CHECK(std::abs(displaced.steady->fidelity - lab.steady->fidelity) < 2e-3);
    }

    TEST_CASE("initial states and register embedding")
    {
        auto c = bundled("bell.json");
        const auto space = scenario_space(c);
        CHECK(space->total_dim() == 4 * 4 * 4);
        const auto rho = initial_density(c, space);
        CHECK(rho.matrix(0, 0) == Complex(1.0));
        c.initial_state = {"", {1, 0, 0, 2}};
        const auto rho2 = initial_density(c, space);
        CHECK(rho2.matrix(space->index_of({1, 0, 0, 2}), space->index_of({1, 0, 0, 2})) == Complex(1.0));
        const StateVector t = register_state_in_space(*space, qubit_state("T", 2));
        CHECK(t.norm() == doctest::Approx(1.0));
        CHECK(std::abs(t(space->index_of({0, 1, 0, 0})) - 1.0 / std::sqrt(2.0)) < 1e-15);
    }
}
