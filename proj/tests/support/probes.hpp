// Small numerical experiments shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qbath/hamiltonian.hpp"
#include "qbath/lindblad.hpp"
#include "qbath/rates.hpp"
#include "qbath/states.hpp"
#include "qbath/units.hpp"

namespace probe {

using namespace qbath;

// Steady <c^dag c> of a driven damped resonator, in the drive frame.
inline double simulated_photons(double epsilon, double delta, double kappa, int dim)
{
    auto space = make_space(CompositeSpace({{"R", ModeKind::resonator, dim}}));
    const Operator c = lowering_op(space, 0);
    const Operator h = scale(number_op(space, 0), angular(delta)) + scale(c + adjoint(c), angular(epsilon));
    const auto l = build_liouvillian(h, {{"kappa", c, angular(kappa)}});
    const auto ss = steady_state(l, SteadyOptions{});
    return expectation(number_op(space, 0), ss.rho).real();
}

// Qubit precession rate (MHz) with a dispersively coupled resonator driven to
// n_bar photons, from the phase of <b> after the resonator has rung up.
inline double simulated_stark(double n_bar, double chi, double delta, double kappa)
{
    auto space = make_space(CompositeSpace({{"Q", ModeKind::qubit, 2}, {"R", ModeKind::resonator, 10}}));
    const Operator b = lowering_op(space, 0);
    const Operator c = lowering_op(space, 1);
    const double eps = drive_amplitude(n_bar, delta, kappa);
    const Operator h = scale(number_op(space, 0) * number_op(space, 1), angular(2.0 * chi)) +
                       scale(number_op(space, 1), angular(delta)) + scale(c + adjoint(c), angular(eps));
    const auto l = build_liouvillian(h, {{"kappa", c, angular(kappa)}});
    StateVector plus = (basis_state(*space, {0, 0}) + basis_state(*space, {1, 0})) / std::sqrt(2.0);
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.01 * i);
    Observable re{"re", [&](const DenseMatrix& rho) { return expectation(b, {space, rho}).real(); }};
    Observable im{"im", [&](const DenseMatrix& rho) { return expectation(b, {space, rho}).imag(); }};
    const auto r = evolve(l, pure_density(space, plus), grid, {re, im});
    // unwrapped phase slope over [2, 4] us
    double phase = 0.0, prev = 0.0, t0 = 0.0, p0 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = std::atan2(r.traces[1][i], r.traces[0][i]);
        if (i > 0) {
            double d = a - prev;
            while (d > std::numbers::pi) d -= kTwoPi;
            while (d < -std::numbers::pi) d += kTwoPi;
            phase += d;
        }
        prev = a;
        if (std::abs(grid[i] - 2.0) < 1e-9) {
            t0 = grid[i];
            p0 = phase;
        }
    }
    return linear(-(phase - p0) / (grid.back() - t0));
}

// Block of the qubit-register Hamiltonian on the listed basis labels, linear
// MHz. Returns the largest imaginary part seen through `imag`.
inline Eigen::MatrixXd register_block(const ScenarioConfig& c, const std::vector<std::string>& labels,
                                      double* imag = nullptr)
{
    BuildOptions opts;
    opts.include_resonators = false;
    const auto model = build_dispersive(c, opts);
    const DenseMatrix h(model.h.matrix);
    const auto& space = *model.h.space;
    Eigen::MatrixXd out(labels.size(), labels.size());
    double worst = 0.0;
    for (std::size_t a = 0; a < labels.size(); ++a) {
        for (std::size_t b = 0; b < labels.size(); ++b) {
            const auto ia = space.index_of(occupations_from_label(labels[a]));
            const auto ib = space.index_of(occupations_from_label(labels[b]));
            out(a, b) = linear(h(ia, ib).real());
            worst = std::max(worst, std::abs(h(ia, ib).imag()));
        }
    }
    if (imag) *imag = worst;
    return out;
}

} // namespace probe
