// Single-exponential fits a + b exp(-k (t - t0)).

#pragma once

#include <stdexcept>
#include <vector>

namespace qbath {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExponentialFit {
    double rate{0.0};      // k, 1/us
    double asymptote{0.0}; // a
    double amplitude{0.0}; // b, at t0 = times.front()
    double residual{0.0};  // RMS
};

// Needs at least 5 points. Throws FitError on flat data or when the decay is
// not resolved inside the sampled window.
ExponentialFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values);

} // namespace qbath
