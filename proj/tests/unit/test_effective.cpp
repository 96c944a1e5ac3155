#include <doctest.h>

#include <cmath>
#include <limits>

#include "qbath/effective.hpp"
#include "qbath/units.hpp"
#include "support/oracles.hpp"

using namespace qbath;

namespace {

// [time][level] -> [level][time]
std::vector<std::vector<double>> by_level(const std::vector<std::vector<double>>& rows)
{
    std::vector<std::vector<double>> out(rows.front().size());
    for (const auto& r : rows)
        for (std::size_t k = 0; k < r.size(); ++k) out[k].push_back(r[k]);
    return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Steady T population from the 3x3 master equation written out with dense
// matrices: null vector of the vectorized generator via full-pivot LU.
double oracle_steady_t(const ThreeLevelParams& p)
{
    using oracle::Dense;
    auto ket_bra = [](int to, int from) {
        Dense m = Dense::Zero(3, 3);
        m(to, from) = 1.0;
        return m;
    };
    const double w = angular(p.omega_p);
    const Dense h = (w / 2.0) * (ket_bra(0, 1) + ket_bra(1, 0));
    const std::vector<Dense> ops{ket_bra(0, 2), ket_bra(0, 1), ket_bra(2, 1), ket_bra(1, 2)};
    const std::vector<double> rates{p.gamma1, p.gamma1, p.gamma_s, p.gamma_phi};
    Dense big(9, 9);
    for (int k = 0; k < 9; ++k) {
        Dense e = Dense::Zero(3, 3);
        e(k % 3, k / 3) = 1.0;
        const Dense out = oracle::master_rhs(h, ops, rates, e);
        for (int r = 0; r < 9; ++r) big(r, k) = out(r % 3, r / 3);
    }
    for (int k = 0; k < 9; ++k) big(0, k) = (k % 3 == k / 3) ? 1.0 : 0.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(9);
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = big.fullPivLu().solve(rhs);
    return x(8).real();
}

} // namespace

TEST_SUITE("effective")
{
    TEST_CASE("exact fidelity limits")
    {
        for (double omega : {0.1, 1.0, 7.0}) {
            for (double gs : {0.05, 1.0, 30.0}) {
                CHECK(exact_fidelity({omega, 0.0, 0.0, gs}) == doctest::Approx(1.0).epsilon(1e-14));
            }
        }
        const double g1 = 0.04, gp = 0.06, gs = 1.5;
        const double limit = gs / (2 * g1 + 2 * gp + gs);
        CHECK(exact_fidelity({1e5, g1, gp, gs}) == doctest::Approx(limit).epsilon(1e-8));
        CHECK_THROWS_AS(exact_fidelity({0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
        CHECK_THROWS(exact_fidelity({1.0, -0.1, 0.0, 1.0}));
    }

    TEST_CASE("approximate fidelity and experiment estimate")
    {
        CHECK(approx_fidelity(0.0, 0.0, 2.0) == 1.0);
        CHECK(approx_fidelity(1.0 / 27, 1.0 / 18, 2.0) == doctest::Approx(0.9152).epsilon(1e-4));
        CHECK_THROWS_AS(approx_fidelity(0.1, 0.1, 0.0), std::invalid_argument);

        CHECK(std::abs(experiment_estimate(0.9, {27.0, 27.0}, 18.0) - 0.9167) <= 0.0005);
        CHECK(experiment_estimate(0.9, {kInf, kInf}, kInf) == 1.0);
        CHECK(experiment_estimate(2.0, {kInf}, 2.0) == doctest::Approx(0.0));
        CHECK_THROWS_AS(experiment_estimate(0.0, {27.0}, 18.0), std::invalid_argument);
        CHECK_THROWS_AS(experiment_estimate(0.9, {-1.0}, 18.0), std::invalid_argument);
        CHECK_THROWS_AS(experiment_estimate(0.9, {}, 18.0), std::invalid_argument);
    }

    TEST_CASE("closed form against the numerical steady state")
    {
        oracle::Rng rng(3);
        double worst_oracle = 0.0, worst_library = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const ThreeLevelParams p{rng.log_uniform(0.01, 10.0), rng.log_uniform(1e-3, 1.0),
                                     rng.log_uniform(1e-3, 1.0), rng.log_uniform(1e-2, 20.0)};
            const double f = exact_fidelity(p);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            worst_oracle = std::max(worst_oracle, std::abs(f - oracle_steady_t(p)));
            if (trial % 10 == 0) worst_library = std::max(worst_library, std::abs(f - three_level_steady_fidelity(p)));
        }
        CHECK(worst_oracle <= 1e-8);
        CHECK(worst_library <= 1e-8);
    }

    TEST_CASE("monotonicity of the closed form")
    {
        oracle::Rng rng(8);
        for (int trial = 0; trial < 500; ++trial) {
            const ThreeLevelParams p{rng.log_uniform(0.01, 10.0), rng.log_uniform(1e-3, 1.0),
                                     rng.log_uniform(1e-3, 1.0), rng.log_uniform(1e-2, 20.0)};
            const double f = exact_fidelity(p);
            const double up = rng.uniform(1.01, 3.0);
            // Increasing in gamma_s only below the turnover where the stabilizing
            // rate starts to quench the drive: gs^2 = (W^2 (2 g1 + 2 gp) + g1^3 + g1^2 gp) / g1.
            const double w2 = std::pow(angular(p.omega_p), 2);
            const double turnover = std::sqrt(
                (w2 * (2 * p.gamma1 + 2 * p.gamma_phi) + std::pow(p.gamma1, 3) + p.gamma1 * p.gamma1 * p.gamma_phi) /
                p.gamma1);
            const double raised = exact_fidelity({p.omega_p, p.gamma1, p.gamma_phi, p.gamma_s * up});
            if (p.gamma_s * up <= turnover) CHECK(raised >= f);
            if (p.gamma_s >= turnover) CHECK(raised <= f);
            CHECK(exact_fidelity({p.omega_p, p.gamma1 * up, p.gamma_phi, p.gamma_s}) <= f);
            CHECK(exact_fidelity({p.omega_p, p.gamma1, p.gamma_phi * up, p.gamma_s}) <= f);
        }
    }

    TEST_CASE("approximation inside its regime")
    {
        // Besides gs >> W >> g1, gp the drive must beat the quench term:
        // W^2 >> g1 gs. Without it the g1 gs^2 term in the denominator is not small.
        oracle::Rng rng(12);
        int used = 0;
        for (int trial = 0; trial < 2000 && used < 300; ++trial) {
            const double g1 = rng.log_uniform(1e-4, 0.1), gp = rng.log_uniform(1e-4, 0.1);
            const double omega_ang = std::max(g1, gp) * rng.log_uniform(10.0, 1e4);
            const double gs = omega_ang * rng.log_uniform(10.0, 1e3);
            if (omega_ang * omega_ang < 100.0 * g1 * gs) continue;
            ++used;
            const ThreeLevelParams p{omega_ang / kTwoPi, g1, gp, gs};
            CHECK(std::abs(exact_fidelity(p) - approx_fidelity(g1, gp, gs)) <= 0.01);
        }
        CHECK(used == 300);
        // gs / W = 10 and W / g = 10 alone is not enough
        const ThreeLevelParams edge{1.0 / kTwoPi, 0.1, 0.1, 10.0};
        CHECK(std::abs(exact_fidelity(edge) - approx_fidelity(0.1, 0.1, 10.0)) > 0.1);

        // ladder: W = s g, gs = sqrt(s) W, so both ratios and W^2 / (g1 gs) grow
        const double g1 = 0.02, gp = 0.03;
        double last = 1.0;
        for (double s : {10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
            const double omega_ang = s * std::max(g1, gp);
            const double gs = std::sqrt(s) * omega_ang;
            const double gap = std::abs(exact_fidelity({omega_ang / kTwoPi, g1, gp, gs}) - approx_fidelity(g1, gp, gs));
            CHECK(gap < last);
            last = gap;
        }
        CHECK(last < 1e-3);
    }

    TEST_CASE("fit recovers the generating rates")
    {
        const ThreeLevelParams truth{0.3, 0.05, 0.08, 1.2};
        std::vector<double> times;
        for (int i = 0; i <= 200; ++i) times.push_back(0.05 * i);
        const auto pops = by_level(three_level_trajectory(truth, times, {1.0, 0.0, 0.0}));
        REQUIRE(pops.size() == 3);
        REQUIRE(pops[0].size() == times.size());
        const auto fit = fit_three_level(times, pops);
        CHECK(fit.params.gamma_s == doctest::Approx(truth.gamma_s).epsilon(0.01));
        CHECK(fit.params.gamma1 == doctest::Approx(truth.gamma1).epsilon(0.01));
        CHECK(fit.params.gamma_phi == doctest::Approx(truth.gamma_phi).epsilon(0.01));
        CHECK(std::abs(fit.params.omega_p) == doctest::Approx(truth.omega_p).epsilon(0.01));
        CHECK(fit.residual < 1e-6);
    }

    TEST_CASE("pure decay fits no stabilizing rate")
    {
        const ThreeLevelParams decay{0.0, 0.2, 0.0, 0.0};
        std::vector<double> times;
        for (int i = 0; i <= 100; ++i) times.push_back(0.1 * i);
        const auto pops = by_level(three_level_trajectory(decay, times, {0.0, 1.0, 0.0}));
        const auto fit = fit_three_level(times, pops);
        CHECK(fit.params.gamma_s < 1e-3);
        CHECK(fit.params.gamma1 == doctest::Approx(0.2).epsilon(0.01));
    }
}
