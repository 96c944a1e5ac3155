// hilbert.hpp: truncated Fock spaces of qubits and resonators, sparse operators on them

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qbath {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Entries below this magnitude are dropped from every stored operator.
inline constexpr double kPruneTolerance = 1e-15;

enum class ModeKind { qubit, resonator };

struct ModeSpec {
    std::string label;
    ModeKind kind{ModeKind::qubit};
    int dim{2};
};

// Ordered tensor product of modes. Qubits come first, then resonators; the
// basis index is row-major over occupations (last mode varies fastest).
class CompositeSpace {
public:
    explicit CompositeSpace(std::vector<ModeSpec> modes);

    static CompositeSpace qubits_and_resonators(std::size_t n_qubits, int qubit_dim,
                                                std::size_t n_resonators, int resonator_dim);

    const std::vector<ModeSpec>& modes() const { return modes_; }
    const ModeSpec& mode(std::size_t i) const;
    std::size_t size() const { return modes_.size(); }
    Eigen::Index total_dim() const { return total_dim_; }
    Eigen::Index stride(std::size_t i) const { return strides_.at(i); }
    std::size_t qubit_count() const;
    std::size_t resonator_count() const { return size() - qubit_count(); }

    Eigen::Index index_of(const std::vector<int>& occupations) const;
    std::vector<int> occupations_of(Eigen::Index index) const;

    // Space made of the listed modes, in this space's order.
    CompositeSpace subspace(const std::vector<std::size_t>& keep) const;

    bool operator==(const CompositeSpace& other) const;
    bool operator!=(const CompositeSpace& other) const { return !(*this == other); }

private:
    std::vector<ModeSpec> modes_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index total_dim_{1};
};

using SpacePtr = std::shared_ptr<const CompositeSpace>;

inline SpacePtr make_space(CompositeSpace space)
{
    return std::make_shared<const CompositeSpace>(std::move(space));
}

struct Operator {
    SpacePtr space;
    SparseMatrix matrix;
};

struct DensityMatrix {
    SpacePtr space;
    DenseMatrix matrix;
};

// Single-mode building blocks.
SparseMatrix local_lowering(int dim);
SparseMatrix local_number(int dim);
SparseMatrix sparse_identity(Eigen::Index dim);
void prune(SparseMatrix& m, double tol = kPruneTolerance);

Operator identity(const SpacePtr& space);
Operator zero_operator(const SpacePtr& space);
Operator embed(const SpacePtr& space, std::size_t mode_index, const SparseMatrix& local);
Operator lowering_op(const SpacePtr& space, std::size_t mode_index);
Operator raising_op(const SpacePtr& space, std::size_t mode_index);
Operator number_op(const SpacePtr& space, std::size_t mode_index);

Operator adjoint(const Operator& op);
Operator compose(const Operator& a, const Operator& b);
Operator add(const Operator& a, const Operator& b);
Operator scale(const Operator& a, Complex factor);

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex factor, const Operator& a);

StateVector basis_state(const CompositeSpace& space, const std::vector<int>& occupations);

DensityMatrix pure_density(const SpacePtr& space, const StateVector& psi);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep);

Complex expectation(const Operator& op, const DensityMatrix& rho);
double fidelity_pure(const StateVector& psi, const DensityMatrix& rho);
double fidelity_pure(const StateVector& psi, const DenseMatrix& rho);

struct DensityDiagnostics {
    double trace_error{0.0};       // |Tr rho - 1|
    double hermiticity_error{0.0}; // max |rho - rho^dagger|
    double min_eigenvalue{0.0};
};

DensityDiagnostics diagnose(const DenseMatrix& rho);

// Throws std::domain_error when rho violates the density-matrix tolerances.
void validate_density(const DenseMatrix& rho, double trace_tol = 1e-9,
                      double hermiticity_tol = 1e-10, double eigen_tol = 1e-8);

} // namespace qbath
