#include "qbath/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace qbath {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Continuous extension (order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

class DormandPrince {
public:
    DormandPrince(const Liouvillian& l, DenseMatrix y0, double t0, double rtol, double atol, long long max_steps)
        : l_(l), y_(std::move(y0)), t_(t0), rtol_(rtol), atol_(atol), max_steps_(max_steps)
    {
        k1_ = rhs(y_);
        h_ = initial_step();
    }

    double time() const { return t_; }
    const DenseMatrix& state() const { return y_; }
    const EvolutionDiagnostics& counters() const { return diag_; }
    EvolutionDiagnostics& counters() { return diag_; }

    // Advances past or onto t_end; calls sample(t, y) for every requested time
    // in [t_, t_end] using the dense output of the step that covers it.
    template <typename Sampler>
    void advance(double t_end, const std::vector<double>& sample_times, std::size_t& next, Sampler&& sample)
    {
        while (next < sample_times.size() && sample_times[next] <= t_ + 1e-12 * std::max(1.0, std::abs(t_))) {
            sample(sample_times[next], y_);
            ++next;
        }
        while (t_ < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) {
            step(std::min(h_, t_end - t_));
            while (next < sample_times.size() && sample_times[next] <= t_ + 1e-12 * std::max(1.0, std::abs(t_))) {
                const double theta = (sample_times[next] - t_prev_) / h_used_;
                sample(sample_times[next], interpolate(std::clamp(theta, 0.0, 1.0)));
                ++next;
            }
        }
    }

private:
    DenseMatrix rhs(const DenseMatrix& y)
    {
        ++diag_.rhs_evaluations;
        return lindblad_rhs(l_, y);
    }

    double error_norm(const DenseMatrix& err, const DenseMatrix& y0, const DenseMatrix& y1) const
    {
        const Eigen::ArrayXXd scale = atol_ + rtol_ * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
        const Eigen::ArrayXXd ratio = err.cwiseAbs().array() / scale;
        return std::sqrt(ratio.square().mean());
    }

    double initial_step()
    {
        const double d0 = y_.cwiseAbs().maxCoeff();
        const double d1n = k1_.cwiseAbs().maxCoeff();
        double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        return std::max(h, 1e-10);
    }

    void step(double h)
    {
        for (;;) {
            if (diag_.steps_accepted + diag_.steps_rejected >= max_steps_) {
                throw SolverError("integrator exceeded the step budget at t = " + std::to_string(t_) + " us");
            }
            if (h < 1e-13 * std::max(1.0, std::abs(t_))) {
                throw SolverError("step size underflow at t = " + std::to_string(t_) + " us (h = " + std::to_string(h) + ")");
            }
            const DenseMatrix k2 = rhs(y_ + h * (a21 * k1_));
            const DenseMatrix k3 = rhs(y_ + h * (a31 * k1_ + a32 * k2));
            const DenseMatrix k4 = rhs(y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
            const DenseMatrix k5 = rhs(y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
            const DenseMatrix k6 = rhs(y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            DenseMatrix y1 = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            // Round-off seeds an anti-Hermitian part that the controller lets grow to atol.
            y1 = (0.5 * (y1 + y1.adjoint())).eval();
            DenseMatrix k7 = rhs(y1);
            const DenseMatrix err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(err, y_, y1);
            if (!std::isfinite(en)) {
                ++diag_.steps_rejected;
                h *= 0.1;
                continue;
            }
            if (en <= 1.0) {
                // Dense-output coefficients for this step.
                r1_ = y_;
                r2_ = y1 - y_;
                r3_ = h * k1_ - r2_;
                r4_ = r2_ - h * k7 - r3_;
                r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                t_prev_ = t_;
                h_used_ = h;
                t_ += h;
                y_ = std::move(y1);
                k1_ = std::move(k7);
                ++diag_.steps_accepted;
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                h_ = h * fac;
                return;
            }
            ++diag_.steps_rejected;
            h *= std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
            h_ = h;
        }
    }

    DenseMatrix interpolate(double theta) const
    {
        const double s = 1.0 - theta;
        return r1_ + theta * (r2_ + s * (r3_ + theta * (r4_ + s * r5_)));
    }

    const Liouvillian& l_;
    DenseMatrix y_, k1_;
    DenseMatrix r1_, r2_, r3_, r4_, r5_;
    double t_{0.0}, t_prev_{0.0}, h_{0.0}, h_used_{1.0};
    double rtol_, atol_;
    long long max_steps_;
    EvolutionDiagnostics diag_;
};

SparseMatrix assemble_matrix(const Liouvillian& l)
{
    const Eigen::Index d = l.dim;
    const SparseMatrix id = sparse_identity(d);
    const Complex i(0.0, 1.0);
    SparseMatrix h_conj = l.h_eff.conjugate();
    SparseMatrix m = SparseMatrix(Eigen::kroneckerProduct(id, l.h_eff)) * (-i) +
                     SparseMatrix(Eigen::kroneckerProduct(h_conj, id)) * i;
    for (const auto& j : l.jumps) {
        SparseMatrix jc = j.conjugate();
        m += SparseMatrix(Eigen::kroneckerProduct(jc, j));
    }
    prune(m);
    return m;
}

void check_point(const DenseMatrix& rho, double t, EvolutionDiagnostics& diag, double positivity_abort)
{
    const auto d = diagnose(rho);
    diag.max_trace_error = std::max(diag.max_trace_error, d.trace_error);
    diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, d.hermiticity_error);
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, d.min_eigenvalue);
    if (d.min_eigenvalue < positivity_abort) {
        std::ostringstream msg;
        msg << "positivity violated at t = " << t << " us: min eigenvalue " << d.min_eigenvalue
            << ", trace error " << d.trace_error << ", hermiticity error " << d.hermiticity_error;
        throw SolverError(msg.str());
    }
}

// Solves L vec(rho) = 0 with the first row replaced by the trace condition,
// then estimates 1/sigma_min of that matrix by inverse iteration. A second
// stationary state makes the constrained matrix singular.
SteadyState nullspace_solve(const Liouvillian& l, const SteadyOptions& options)
{
    const SparseMatrix m = l.matrix.nonZeros() > 0 || l.dim == 0 ? l.matrix : assemble_matrix(l);
    const Eigen::Index d = l.dim;
    const Eigen::Index n = d * d;
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(m.nonZeros() + d));
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(0, k * d + k, 1.0);
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();

    SteadyState s;
    s.method = SteadyMethod::nullspace;
    s.degenerate_nullspace = true;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return s;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b(0) = 1.0;
    const Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) return s;

    double norm_a = 0.0; // max column sum
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
        norm_a = std::max(norm_a, col);
    }
    Eigen::VectorXcd z(n);
    for (Eigen::Index k = 0; k < n; ++k) z(k) = Complex(std::cos(0.7 * double(k)), std::sin(1.3 * double(k)));
    z.normalize();
    double growth = 0.0;
    for (int iter = 0; iter < 4; ++iter) {
        Eigen::VectorXcd w = lu.solve(z);
        if (!w.allFinite()) return s;
        growth = w.norm();
        if (!(growth > 0.0)) return s;
        z = w / growth;
    }
    s.condition_estimate = growth * norm_a;

    DenseMatrix rho = unvectorize(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    s.rho = {l.space, std::move(rho)};
    s.residual = residual_norm(l, s.rho.matrix);
    s.degenerate_nullspace = !(s.condition_estimate <= options.condition_limit) || !(s.residual <= options.tol);
    return s;
}

// Evolves in growing chunks until the chunk-averaged rate of change
// max|rho(t + dt) - rho(t)| / dt drops below tol. The instantaneous max|L(rho)|
// has a floor of about |L| * rtol from integration error, so it is reported
// but not used to stop.
SteadyState long_time_solve(const Liouvillian& l, const DensityMatrix& rho0, const SteadyOptions& options)
{
    DormandPrince dp(l, rho0.matrix, 0.0, options.rtol, options.atol, 2'000'000'000);
    double chunk = 2.0;
    std::size_t none = 0;
    const std::vector<double> no_samples;
    for (;;) {
        const DenseMatrix before = dp.state();
        const double t0 = dp.time();
        const double target = std::min(t0 + chunk, options.long_time_max);
        dp.advance(target, no_samples, none, [](double, const DenseMatrix&) {});
        check_point(dp.state(), dp.time(), dp.counters(), -1e-6);
        const double drift = (dp.state() - before).cwiseAbs().maxCoeff() / (dp.time() - t0);
        if (drift <= options.tol) {
            SteadyState s;
            s.rho = {l.space, dp.state()};
            s.residual = drift;
            s.method = SteadyMethod::long_time;
            s.simulated_time = dp.time();
            return s;
        }
        if (dp.time() >= options.long_time_max - 1e-9) {
            std::ostringstream msg;
            msg << "long-time steady state not reached: drift " << drift << " per us after " << dp.time() << " us";
            throw SolverError(msg.str());
        }
        chunk = std::min(chunk * 1.5, 50.0);
    }
}

} // namespace

Liouvillian build_liouvillian(const Operator& h, const CollapseSet& collapse, bool assemble)
{
    if (!h.space) throw std::invalid_argument("Hamiltonian without a space");
    Liouvillian l;
    l.space = h.space;
    l.dim = h.matrix.rows();
    if (h.matrix.cols() != l.dim || l.dim != h.space->total_dim()) {
        throw std::invalid_argument("Hamiltonian dimension does not match its space");
    }
    SparseMatrix damping(l.dim, l.dim);
    for (const auto& term : collapse) {
        if (term.op.space != h.space && (!term.op.space || *term.op.space != *h.space)) {
            throw std::invalid_argument("collapse operator '" + term.label + "' lives on a different space");
        }
        if (term.rate < 0.0) throw std::invalid_argument("collapse rate of '" + term.label + "' is negative");
        if (term.rate == 0.0) continue;
        SparseMatrix j = term.op.matrix * Complex(std::sqrt(term.rate));
        SparseMatrix jd = j.adjoint();
        damping += jd * j;
        std::vector<JumpEntry> entries;
        if (j.nonZeros() <= 2 * l.dim) {
            for (Eigen::Index k = 0; k < j.outerSize(); ++k) {
                for (SparseMatrix::InnerIterator it(j, k); it; ++it) entries.push_back({it.row(), it.col(), it.value()});
            }
        }
        l.jump_entries.push_back(std::move(entries));
        l.jumps.push_back(std::move(j));
        l.jumps_adjoint.push_back(std::move(jd));
    }
    l.h_eff = h.matrix - damping * Complex(0.0, 0.5);
    prune(l.h_eff);
    l.h_eff_rows = l.h_eff;
    if (assemble) l.matrix = assemble_matrix(l);
    return l;
}

namespace {

// Plain complex product; the library routine also handles inf/nan recovery,
// which costs a call per multiply in the inner loops below.
inline Complex cmul(Complex a, Complex b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

} // namespace

DenseMatrix lindblad_rhs(const Liouvillian& l, const DenseMatrix& rho)
{
    using RowIter = Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator;
    const Eigen::Index d = l.dim;
    const auto& h = l.h_eff_rows;
    DenseMatrix out(d, d);
    // H rho, one column at a time.
    for (Eigen::Index j = 0; j < d; ++j) {
        const Complex* col = rho.col(j).data();
        for (Eigen::Index i = 0; i < d; ++i) {
            Complex acc = 0.0;
            for (RowIter it(h, i); it; ++it) acc += cmul(it.value(), col[it.col()]);
            out(i, j) = acc;
        }
    }
    // - rho H^dag: column j collects conj(H(j,k)) rho(:,k).
    for (Eigen::Index j = 0; j < d; ++j) {
        for (RowIter it(h, j); it; ++it) out.col(j) -= std::conj(it.value()) * rho.col(it.col());
    }
    out *= Complex(0.0, -1.0);
    for (std::size_t k = 0; k < l.jumps.size(); ++k) {
        const auto& entries = l.jump_entries[k];
        if (entries.empty()) {
            const DenseMatrix jr = l.jumps[k] * rho;
            out.noalias() += jr * l.jumps_adjoint[k];
            continue;
        }
        for (const auto& a : entries) {
            for (const auto& b : entries) {
                out(a.row, b.row) += cmul(cmul(a.value, std::conj(b.value)), rho(a.col, b.col));
            }
        }
    }
    return out;
}

Eigen::VectorXcd vectorize(const DenseMatrix& rho)
{
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim)
{
    if (v.size() != dim * dim) throw std::invalid_argument("vector length is not dim^2");
    return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

double residual_norm(const Liouvillian& l, const DenseMatrix& rho)
{
    return lindblad_rhs(l, rho).cwiseAbs().maxCoeff();
}

const std::vector<double>& EvolutionResult::observable(const std::string& name) const
{
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return traces[k];
    }
    throw std::out_of_range("no observable named '" + name + "'");
}

EvolutionResult evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                       const std::vector<Observable>& observables, const EvolveOptions& options)
{
    if (t_grid.empty()) throw std::invalid_argument("evolve: empty time grid");
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw std::invalid_argument("evolve: time grid must ascend");
    if (!rho0.space || rho0.matrix.rows() != l.dim) throw std::invalid_argument("evolve: initial state does not match");
    validate_density(rho0.matrix);

    EvolutionResult result;
    for (const auto& o : observables) result.names.push_back(o.name);
    result.traces.assign(observables.size(), {});

    // Sample grid and snapshot times merged into one ascending list.
    std::vector<double> samples(t_grid);
    for (double t : options.snapshot_times) {
        if (t < t_grid.front() || t > t_grid.back()) throw std::invalid_argument("snapshot time outside the grid");
        samples.push_back(t);
    }
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    std::vector<double> snaps(options.snapshot_times);
    std::sort(snaps.begin(), snaps.end());

    DormandPrince dp(l, rho0.matrix, t_grid.front(), options.rtol, options.atol, options.max_steps);
    std::size_t next = 0;
    std::size_t grid_next = 0;
    std::size_t snap_next = 0;
    auto sample = [&](double t, const DenseMatrix& rho) {
        check_point(rho, t, dp.counters(), options.positivity_abort);
        if (grid_next < t_grid.size() && t == t_grid[grid_next]) {
            result.times.push_back(t);
            for (std::size_t k = 0; k < observables.size(); ++k) result.traces[k].push_back(observables[k].eval(rho));
            while (grid_next < t_grid.size() && t_grid[grid_next] == t) ++grid_next;
        }
        if (snap_next < snaps.size() && t == snaps[snap_next]) {
            result.snapshot_times.push_back(t);
            result.snapshots.push_back({l.space, rho});
            while (snap_next < snaps.size() && snaps[snap_next] == t) ++snap_next;
        }
    };
    dp.advance(t_grid.back(), samples, next, sample);
    result.final_state = {l.space, dp.state()};
    result.diagnostics = dp.counters();
    return result;
}

SteadyOptions steady_options_from(const SolverSettings& settings)
{
    SteadyOptions o;
    o.method = settings.steady_method;
    o.tol = settings.steady_tol;
    o.nullspace_max_dim2 = settings.nullspace_max_dim2;
    o.long_time_max = settings.long_time_max;
    o.rtol = settings.rtol;
    o.atol = settings.atol;
    return o;
}

SteadyState steady_state(const Liouvillian& l, const SteadyOptions& options, const DensityMatrix* initial)
{
    const long long dim2 = static_cast<long long>(l.dim) * static_cast<long long>(l.dim);
    DensityMatrix start;
    if (initial) {
        start = *initial;
    } else {
        DenseMatrix g = DenseMatrix::Zero(l.dim, l.dim);
        g(0, 0) = 1.0;
        start = {l.space, g};
    }

    SteadyMethod method = options.method;
    if (method == SteadyMethod::automatic) {
        method = dim2 <= options.nullspace_max_dim2 ? SteadyMethod::nullspace : SteadyMethod::long_time;
    }
    if (method == SteadyMethod::nullspace) {
        SteadyState s = nullspace_solve(l, options);
        if (!s.degenerate_nullspace) return s;
        if (options.method == SteadyMethod::nullspace) {
            throw SolverError("multiple steady states: the Liouvillian nullspace is degenerate");
        }
        SteadyState fallback = long_time_solve(l, start, options);
        fallback.degenerate_nullspace = true;
        return fallback;
    }
    return long_time_solve(l, start, options);
}

} // namespace qbath
