#include "qbath/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "qbath/units.hpp"

namespace qbath {

namespace {

void require_positive_kappa(double kappa)
{
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
}

// kappa / (x^2 + kappa^2/4), all angular.
double lorentzian(double x, double kappa)
{
    return kappa / (x * x + 0.25 * kappa * kappa);
}

} // namespace

double photon_number(double epsilon, double delta_r, double kappa)
{
    require_positive_kappa(kappa);
    const double e = angular(epsilon);
    const double d = angular(delta_r);
    const double k = angular(kappa);
    return e * e / (d * d + 0.25 * k * k);
}

double drive_amplitude(double n_bar, double delta_r, double kappa)
{
    require_positive_kappa(kappa);
    if (n_bar < 0.0) throw std::invalid_argument("n_bar must be non-negative");
    return std::sqrt(n_bar * (delta_r * delta_r + 0.25 * kappa * kappa));
}

double stark_shift(double n_bar, double chi)
{
    return 2.0 * n_bar * chi;
}

RateEstimate golden_rule_rate(double chi_kk, double m_kl, double m_kp, double n_bar, double kappa, double gap,
                              double delta_r)
{
    require_positive_kappa(kappa);
    if (n_bar < 0.0) throw std::invalid_argument("n_bar must be non-negative");
    const double coupling = angular(chi_kk) * m_kl * m_kp;
    const double strength = 4.0 * n_bar * coupling * coupling;
    const double k = angular(kappa);
    RateEstimate r;
    r.forward = strength * lorentzian(angular(gap) - angular(delta_r), k);
    r.reverse = strength * lorentzian(angular(gap) + angular(delta_r), k);
    // Spectral ratio, independent of the drive strength so it stays defined at n_bar = 0.
    r.ratio = lorentzian(angular(gap) - angular(delta_r), k) / lorentzian(angular(gap) + angular(delta_r), k);
    r.optimal_detuning = gap;
    return r;
}

double directionality_ratio(double gap, double kappa)
{
    require_positive_kappa(kappa);
    const double x = gap / kappa;
    return 16.0 * x * x + 1.0;
}

} // namespace qbath
