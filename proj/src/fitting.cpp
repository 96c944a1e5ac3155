#include "qbath/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

namespace qbath {

namespace {

struct LinearPart {
    double a{0.0};
    double b{0.0};
    double sse{0.0};
};

// Best a, b for a fixed rate (variable projection).
LinearPart project(const Eigen::VectorXd& t, const Eigen::VectorXd& y, double k)
{
    Eigen::MatrixXd basis(t.size(), 2);
    basis.col(0).setOnes();
    basis.col(1) = (-k * t.array()).exp().matrix();
    const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(y);
    LinearPart out{coef(0), coef(1), (basis * coef - y).squaredNorm()};
    return out;
}

struct ExpResidual : Eigen::DenseFunctor<double> {
    ExpResidual(const Eigen::VectorXd& t, const Eigen::VectorXd& y)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(t.size())), t_(t), y_(y)
    {
    }
    // x = (a, b, log k)
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const
    {
        const double k = std::exp(x(2));
        f = (x(0) + x(1) * (-k * t_.array()).exp() - y_.array()).matrix();
        return 0;
    }
    Eigen::VectorXd t_, y_;
};

} // namespace

ExponentialFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values)
{
    if (times.size() != values.size()) throw std::invalid_argument("fit_exponential: length mismatch");
    if (times.size() < 5) throw std::invalid_argument("fit_exponential: at least 5 points are required");
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::VectorXd t(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i) = times[static_cast<std::size_t>(i)] - times.front();
        y(i) = values[static_cast<std::size_t>(i)];
    }
    const double span = t(n - 1);
    if (!(span > 0.0)) throw std::invalid_argument("fit_exponential: times must span a positive interval");
    const double spread = y.maxCoeff() - y.minCoeff();
    if (!(spread > 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff()))) {
        throw FitError("fit_exponential: data are flat; the decay rate is undetermined");
    }
    double dt_min = span;
    for (Eigen::Index i = 1; i < n; ++i) dt_min = std::min(dt_min, t(i) - t(i - 1));

    // Coarse log-spaced scan, then a joint least-squares refinement.
    const double k_lo = 0.05 / span;
    const double k_hi = 5.0 / std::max(dt_min, 1e-12);
    const int samples = 400;
    int best = -1;
    double best_sse = INFINITY;
    for (int s = 0; s < samples; ++s) {
        const double k = k_lo * std::pow(k_hi / k_lo, s / double(samples - 1));
        const double sse = project(t, y, k).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best = s;
        }
    }
    if (best <= 0 || best >= samples - 1) {
        throw FitError("fit_exponential: the decay is not resolved inside the sampled window");
    }
    const double k0 = k_lo * std::pow(k_hi / k_lo, best / double(samples - 1));
    const LinearPart lin = project(t, y, k0);

    ExpResidual functor(t, y);
    Eigen::NumericalDiff<ExpResidual> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ExpResidual>> lm(diff);
    lm.setXtol(1e-12);
    lm.setFtol(1e-14);
    lm.setMaxfev(4000);
    Eigen::VectorXd x(3);
    x << lin.a, lin.b, std::log(k0);
    const auto status = lm.minimize(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
        status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !x.allFinite()) {
        throw FitError("fit_exponential: least-squares refinement did not converge");
    }
    Eigen::VectorXd f(n);
    functor(x, f);
    ExponentialFit out;
    out.asymptote = x(0);
    out.amplitude = x(1);
    out.rate = std::exp(x(2));
    out.residual = std::sqrt(f.squaredNorm() / double(n));
    // Keep the scan result if refinement wandered somewhere worse.
    if (f.squaredNorm() > lin.sse) {
        out = {k0, lin.a, lin.b, std::sqrt(lin.sse / double(n))};
    }
    return out;
}

} // namespace qbath
