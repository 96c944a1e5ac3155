#include "qbath/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/MatrixFunctions>
#include <unsupported/Eigen/NumericalDiff>

#include "qbath/fitting.hpp"
#include "qbath/units.hpp"

namespace qbath {

void validate(const ThreeLevelParams& p)
{
    if (!std::isfinite(p.omega_p) || !std::isfinite(p.gamma1) || !std::isfinite(p.gamma_phi) ||
        !std::isfinite(p.gamma_s)) {
        throw std::invalid_argument("three-level parameters must be finite");
    }
    if (p.gamma1 < 0.0 || p.gamma_phi < 0.0 || p.gamma_s < 0.0) {
        throw std::invalid_argument("three-level rates must be nonnegative");
    }
}

double exact_fidelity(const ThreeLevelParams& p)
{
    validate(p);
    const double o2 = std::pow(angular(p.omega_p), 2);
    const double g1 = p.gamma1, gp = p.gamma_phi, gs = p.gamma_s;
    if (o2 == 0.0 && g1 == 0.0 && gp == 0.0 && gs == 0.0) {
        throw std::invalid_argument("exact_fidelity: all parameters are zero");
    }
    const double den = o2 * (2 * g1 + 2 * gp + gs) + g1 * g1 * g1 + 2 * g1 * g1 * gs + g1 * gs * gs + g1 * g1 * gp +
                       g1 * gs * gp;
    if (!(den > 0.0)) throw std::invalid_argument("exact_fidelity: steady state is not unique for these parameters");
    return o2 * gs / den;
}

double approx_fidelity(double gamma1, double gamma_phi, double gamma_s)
{
    if (!(gamma_s > 0.0)) throw std::invalid_argument("approx_fidelity: gamma_s must be positive");
    if (gamma1 < 0.0 || gamma_phi < 0.0) throw std::invalid_argument("approx_fidelity: rates must be nonnegative");
    return 0.5 * gamma_s / (gamma1 + gamma_phi + 0.5 * gamma_s);
}

double experiment_estimate(double t_s, const std::vector<double>& t1_list, double t_phi)
{
    if (!(t_s > 0.0)) throw std::invalid_argument("experiment_estimate: T_s must be positive");
    if (!(t_phi > 0.0)) throw std::invalid_argument("experiment_estimate: T_phi must be positive");
    if (t1_list.empty()) throw std::invalid_argument("experiment_estimate: no T1 values");
    double mean_gamma1 = 0.0;
    for (double t1 : t1_list) {
        if (!(t1 > 0.0)) throw std::invalid_argument("experiment_estimate: T1 values must be positive");
        mean_gamma1 += 1.0 / t1;
    }
    mean_gamma1 /= double(t1_list.size());
    const double gamma_s = 1.0 / t_s;
    return (gamma_s - mean_gamma1 - 1.0 / t_phi) / gamma_s;
}

SpacePtr three_level_space()
{
    static const SpacePtr space = make_space(CompositeSpace({{"L", ModeKind::qubit, 3}}));
    return space;
}

namespace {

Operator transition(const SpacePtr& space, int to, int from)
{
    SparseMatrix m(3, 3);
    m.insert(to, from) = 1.0;
    return {space, m};
}

DenseMatrix dense_generator(const ThreeLevelParams& p)
{
    const Liouvillian l = build_liouvillian(three_level_hamiltonian(p), three_level_collapse(p));
    return DenseMatrix(l.matrix);
}

} // namespace

Operator three_level_hamiltonian(const ThreeLevelParams& p)
{
    validate(p);
    const SpacePtr space = three_level_space();
    const double half = 0.5 * angular(p.omega_p);
    SparseMatrix h(3, 3);
    if (half != 0.0) {
        h.insert(kGroundGG, kSinglet) = half;
        h.insert(kSinglet, kGroundGG) = half;
    }
    return {space, h};
}

CollapseSet three_level_collapse(const ThreeLevelParams& p)
{
    validate(p);
    const SpacePtr space = three_level_space();
    return {
        {"relax_T", transition(space, kGroundGG, kTriplet), p.gamma1},
        {"relax_S", transition(space, kGroundGG, kSinglet), p.gamma1},
        {"transfer_ST", transition(space, kTriplet, kSinglet), p.gamma_s},
        {"dephase_TS", transition(space, kSinglet, kTriplet), p.gamma_phi},
    };
}

double three_level_steady_fidelity(const ThreeLevelParams& p)
{
    const Liouvillian l = build_liouvillian(three_level_hamiltonian(p), three_level_collapse(p));
    SteadyOptions options;
    options.method = SteadyMethod::nullspace;
    options.tol = 1e-10;
    const SteadyState s = steady_state(l, options);
    return s.rho.matrix(kTriplet, kTriplet).real();
}

std::vector<std::vector<double>> three_level_trajectory(const ThreeLevelParams& p, const std::vector<double>& times,
                                                       const std::vector<double>& initial_populations)
{
    if (initial_populations.size() != 3) throw std::invalid_argument("three_level_trajectory: need 3 populations");
    const DenseMatrix gen = dense_generator(p);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
    for (int k = 0; k < 3; ++k) v(k * 3 + k) = initial_populations[static_cast<std::size_t>(k)];

    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    double t_prev = times.empty() ? 0.0 : times.front();
    double cached_dt = std::numeric_limits<double>::quiet_NaN();
    DenseMatrix step;
    for (double t : times) {
        const double dt = t - t_prev;
        if (dt < 0.0) throw std::invalid_argument("three_level_trajectory: times must ascend");
        if (dt > 0.0) {
            if (!(std::abs(dt - cached_dt) <= 1e-12 * std::max(1.0, dt))) {
                step = (gen * Complex(dt)).exp();
                cached_dt = dt;
            }
            v = step * v;
        }
        t_prev = t;
        out.push_back({v(0).real(), v(4).real(), v(8).real()});
    }
    return out;
}

namespace {

constexpr double kLogFloor = -30.0;
constexpr double kLogCeil = 8.0;

ThreeLevelParams from_log(const Eigen::VectorXd& x)
{
    auto e = [](double v) { return std::exp(std::clamp(v, kLogFloor, kLogCeil)); };
    return {linear(e(x(0))), e(x(1)), e(x(2)), e(x(3))};
}

struct ThreeLevelResidual : Eigen::DenseFunctor<double> {
    ThreeLevelResidual(const std::vector<double>& t, const std::vector<std::vector<double>>& pops)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(3 * t.size())), times(t), data(pops),
          start{pops[0][0], pops[1][0], pops[2][0]}
    {
    }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const
    {
        const auto model = three_level_trajectory(from_log(x), times, start);
        for (std::size_t i = 0; i < times.size(); ++i) {
            for (std::size_t k = 0; k < 3; ++k) {
                f(static_cast<Eigen::Index>(3 * i + k)) = model[i][k] - data[k][i];
            }
        }
        return 0;
    }
    std::vector<double> times;
    std::vector<std::vector<double>> data; // data[state][sample]
    std::vector<double> start;
};

} // namespace

ThreeLevelFit fit_three_level(const std::vector<double>& times, const std::vector<std::vector<double>>& populations)
{
    if (populations.size() != 3) throw std::invalid_argument("fit_three_level: need gg, S and T traces");
    for (const auto& p : populations) {
        if (p.size() != times.size()) throw std::invalid_argument("fit_three_level: trace length mismatch");
    }
    if (times.size() < 5) throw std::invalid_argument("fit_three_level: at least 5 samples are required");
    if (populations[0][0] + populations[1][0] + populations[2][0] < 0.9) {
        throw FitError("fit_three_level: the trajectory does not start inside the gg, S, T subspace");
    }

    // At most kMaxSamples evenly strided samples; the model cost scales with the count.
    constexpr std::size_t kMaxSamples = 200;
    const std::size_t stride = (times.size() + kMaxSamples - 1) / kMaxSamples;
    std::vector<double> t_fit;
    std::vector<std::vector<double>> p_fit(3);
    for (std::size_t i = 0; i < times.size(); i += stride) {
        t_fit.push_back(times[i]);
        for (std::size_t k = 0; k < 3; ++k) p_fit[k].push_back(populations[k][i]);
    }

    ThreeLevelResidual functor(t_fit, p_fit);
    Eigen::NumericalDiff<ThreeLevelResidual> diff(functor);

    // A few starting points; drive strength and transfer rate are the poorly
    // conditioned directions.
    const double span = t_fit.back() - t_fit.front();
    const double base = 1.0 / std::max(span, 1e-6);
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    for (double omega : {0.2, 1.0, 5.0}) {
        for (double gs : {0.3, 1.0, 3.0}) {
            Eigen::VectorXd x(4);
            x << std::log(angular(omega)), std::log(0.05), std::log(0.05), std::log(gs * std::max(base, 0.1));
            Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ThreeLevelResidual>> lm(diff);
            lm.setMaxfev(400);
            lm.setXtol(1e-10);
            lm.setFtol(1e-12);
            const auto status = lm.minimize(x);
            if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite()) continue;
            Eigen::VectorXd f(functor.values());
            functor(x, f);
            const double cost = f.squaredNorm();
            if (std::isfinite(cost) && cost < best_cost) {
                best_cost = cost;
                best = x;
            }
        }
    }
    if (best.size() == 0) throw FitError("fit_three_level: least-squares fit did not converge");
    ThreeLevelFit fit;
    fit.params = from_log(best);
    fit.residual = std::sqrt(best_cost / double(functor.values()));
    return fit;
}

ThreeLevelFit fit_three_level(const EvolutionResult& result, const ThreeLevelTraceNames& names)
{
    return fit_three_level(result.times, {result.observable(names.ground), result.observable(names.singlet),
                                          result.observable(names.triplet)});
}

} // namespace qbath
