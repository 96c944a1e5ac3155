// Lindblad generator, time evolution and steady states.
//
// d rho/dt = -i[H, rho] + sum_k gamma_k (L rho L^dag - {L^dag L, rho}/2)
//
// Superoperators act on column-stacked density matrices:
// vec(A X B) = (B^T kron A) vec(X).

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbath/device.hpp"
#include "qbath/hamiltonian.hpp"
#include "qbath/hilbert.hpp"

namespace qbath {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct JumpEntry {
    Eigen::Index row{0};
    Eigen::Index col{0};
    Complex value;
};

struct Liouvillian {
    SpacePtr space;
    Eigen::Index dim{0};
    SparseMatrix matrix;  // dim^2 x dim^2; empty unless assembled
    SparseMatrix h_eff;   // H - (i/2) sum gamma L^dag L
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> h_eff_rows;
    std::vector<SparseMatrix> jumps; // sqrt(gamma) L
    std::vector<SparseMatrix> jumps_adjoint;
    // Nonzeros of each jump; J rho J^dag is summed entry by entry when the jump is sparse enough.
    std::vector<std::vector<JumpEntry>> jump_entries;
};

// assemble = false skips the d^2 x d^2 matrix; evolution only needs the operators.
Liouvillian build_liouvillian(const Operator& h, const CollapseSet& collapse, bool assemble = true);

// Right-hand side in matrix form, without vectorizing.
DenseMatrix lindblad_rhs(const Liouvillian& l, const DenseMatrix& rho);

Eigen::VectorXcd vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);

struct Observable {
    std::string name;
    std::function<double(const DenseMatrix&)> eval;
};

struct EvolveOptions {
    double rtol{1e-8};
    double atol{1e-10};
    double positivity_abort{-1e-6}; // min eigenvalue below this aborts
    std::vector<double> snapshot_times;
    long long max_steps{20'000'000};
};

struct EvolutionDiagnostics {
    double max_trace_error{0.0};
    double max_hermiticity_error{0.0};
    double min_eigenvalue{1.0};
    long long steps_accepted{0};
    long long steps_rejected{0};
    long long rhs_evaluations{0};
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> traces; // traces[k][i] = observable k at times[i]
    std::vector<double> snapshot_times;
    std::vector<DensityMatrix> snapshots;
    DensityMatrix final_state;
    EvolutionDiagnostics diagnostics;

    const std::vector<double>& observable(const std::string& name) const;
};

// Adaptive Dormand-Prince 5(4) with dense output on t_grid (ascending,
// starting at the initial time t_grid.front()).
EvolutionResult evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                       const std::vector<Observable>& observables = {}, const EvolveOptions& options = {});

struct SteadyOptions {
    SteadyMethod method{SteadyMethod::automatic};
    double tol{1e-7};
    long long nullspace_max_dim2{40000};
    double long_time_max{3000.0};
    double rtol{1e-8};
    double atol{1e-10};
    // Condition estimate of the trace-constrained generator above which the
    // nullspace counts as degenerate.
    double condition_limit{1e12};
};

struct SteadyState {
    DensityMatrix rho;
    double residual{0.0}; // nullspace: max |L(rho)|; long-time: chunk-averaged max |d rho/dt|
    SteadyMethod method{SteadyMethod::nullspace};
    bool degenerate_nullspace{false};
    double condition_estimate{0.0}; // nullspace method only
    double simulated_time{0.0};     // long-time method only
};

SteadyOptions steady_options_from(const SolverSettings& settings);

// automatic: nullspace when dim^2 fits, else long-time. A degenerate
// nullspace makes automatic fall back to long-time evolution from `initial`
// and makes an explicit nullspace request throw.
SteadyState steady_state(const Liouvillian& l, const SteadyOptions& options, const DensityMatrix* initial = nullptr);

double residual_norm(const Liouvillian& l, const DenseMatrix& rho);

} // namespace qbath
