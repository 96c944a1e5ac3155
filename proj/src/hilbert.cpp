// hilbert.cpp: composite spaces and operator algebra

#include "qbath/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace qbath {

namespace {

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what)
{
    if (!a || !b) {
        throw std::invalid_argument(std::string(what) + ": operator without a space");
    }
    if (a != b && *a != *b) {
        throw std::invalid_argument(std::string(what) + ": space mismatch");
    }
}

} // namespace

CompositeSpace::CompositeSpace(std::vector<ModeSpec> modes)
    : modes_(std::move(modes))
{
    if (modes_.empty()) {
        throw std::invalid_argument("CompositeSpace needs at least one mode");
    }
    std::set<std::string> labels;
    bool seen_resonator = false;
    for (const auto& m : modes_) {
        if (m.dim < 2) {
            throw std::invalid_argument("mode '" + m.label + "': dimension must be >= 2");
        }
        if (!labels.insert(m.label).second) {
            throw std::invalid_argument("duplicate mode label '" + m.label + "'");
        }
        if (m.kind == ModeKind::resonator) {
            seen_resonator = true;
        } else if (seen_resonator) {
            throw std::invalid_argument("qubit mode '" + m.label + "' listed after a resonator");
        }
    }
    strides_.assign(modes_.size(), 1);
    for (std::size_t i = modes_.size(); i-- > 0;) {
        strides_[i] = total_dim_;
        total_dim_ *= modes_[i].dim;
    }
}

CompositeSpace CompositeSpace::qubits_and_resonators(std::size_t n_qubits, int qubit_dim,
                                                     std::size_t n_resonators, int resonator_dim)
{
    std::vector<ModeSpec> modes;
    for (std::size_t i = 0; i < n_qubits; ++i) {
        modes.push_back({"Q" + std::to_string(i + 1), ModeKind::qubit, qubit_dim});
    }
    for (std::size_t i = 0; i < n_resonators; ++i) {
        modes.push_back({"R" + std::to_string(i + 1), ModeKind::resonator, resonator_dim});
    }
    return CompositeSpace(std::move(modes));
}

const ModeSpec& CompositeSpace::mode(std::size_t i) const
{
    if (i >= modes_.size()) {
        throw std::out_of_range("mode index " + std::to_string(i) + " out of range");
    }
    return modes_[i];
}

std::size_t CompositeSpace::qubit_count() const
{
    return static_cast<std::size_t>(std::count_if(modes_.begin(), modes_.end(), [](const ModeSpec& m) {
        return m.kind == ModeKind::qubit;
    }));
}

Eigen::Index CompositeSpace::index_of(const std::vector<int>& occupations) const
{
    if (occupations.size() != modes_.size()) {
        throw std::invalid_argument("occupation list length does not match the number of modes");
    }
    Eigen::Index index = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (occupations[i] < 0 || occupations[i] >= modes_[i].dim) {
            throw std::out_of_range("occupation " + std::to_string(occupations[i]) + " of mode '" +
                                    modes_[i].label + "' exceeds truncation " +
                                    std::to_string(modes_[i].dim));
        }
        index += occupations[i] * strides_[i];
    }
    return index;
}

std::vector<int> CompositeSpace::occupations_of(Eigen::Index index) const
{
    if (index < 0 || index >= total_dim_) {
        throw std::out_of_range("basis index out of range");
    }
    std::vector<int> occ(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        occ[i] = static_cast<int>((index / strides_[i]) % modes_[i].dim);
    }
    return occ;
}

CompositeSpace CompositeSpace::subspace(const std::vector<std::size_t>& keep) const
{
    if (keep.empty()) {
        throw std::invalid_argument("subspace needs at least one mode");
    }
    std::vector<std::size_t> sorted(keep);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<ModeSpec> modes;
    for (auto i : sorted) {
        modes.push_back(mode(i));
    }
    return CompositeSpace(std::move(modes));
}

bool CompositeSpace::operator==(const CompositeSpace& other) const
{
    if (modes_.size() != other.modes_.size()) return false;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto& a = modes_[i];
        const auto& b = other.modes_[i];
        if (a.label != b.label || a.kind != b.kind || a.dim != b.dim) return false;
    }
    return true;
}

SparseMatrix local_lowering(int dim)
{
    SparseMatrix a(dim, dim);
    std::vector<Eigen::Triplet<Complex>> t;
    for (int n = 1; n < dim; ++n) {
        t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    }
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseMatrix local_number(int dim)
{
    SparseMatrix n(dim, dim);
    std::vector<Eigen::Triplet<Complex>> t;
    for (int k = 1; k < dim; ++k) {
        t.emplace_back(k, k, static_cast<double>(k));
    }
    n.setFromTriplets(t.begin(), t.end());
    return n;
}

SparseMatrix sparse_identity(Eigen::Index dim)
{
    SparseMatrix id(dim, dim);
    id.setIdentity();
    return id;
}

void prune(SparseMatrix& m, double tol)
{
    m.prune([tol](Eigen::Index, Eigen::Index, const Complex& v) { return std::abs(v) > tol; });
    m.makeCompressed();
}

Operator identity(const SpacePtr& space)
{
    return {space, sparse_identity(space->total_dim())};
}

Operator zero_operator(const SpacePtr& space)
{
    return {space, SparseMatrix(space->total_dim(), space->total_dim())};
}

Operator embed(const SpacePtr& space, std::size_t mode_index, const SparseMatrix& local)
{
    const auto& m = space->mode(mode_index);
    if (local.rows() != m.dim || local.cols() != m.dim) {
        throw std::invalid_argument("embed: local operator is " + std::to_string(local.rows()) + "x" +
                                    std::to_string(local.cols()) + ", mode '" + m.label +
                                    "' has dimension " + std::to_string(m.dim));
    }
    // I_left (x) local (x) I_right, assembled directly from strides.
    const Eigen::Index right = space->stride(mode_index);
    const Eigen::Index left = space->total_dim() / (right * m.dim);
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(local.nonZeros() * left * right));
    for (Eigen::Index k = 0; k < local.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(local, k); it; ++it) {
            for (Eigen::Index l = 0; l < left; ++l) {
                const Eigen::Index base = l * m.dim * right;
                for (Eigen::Index r = 0; r < right; ++r) {
                    t.emplace_back(base + it.row() * right + r, base + it.col() * right + r, it.value());
                }
            }
        }
    }
    SparseMatrix out(space->total_dim(), space->total_dim());
    out.setFromTriplets(t.begin(), t.end());
    prune(out);
    return {space, std::move(out)};
}

Operator lowering_op(const SpacePtr& space, std::size_t mode_index)
{
    return embed(space, mode_index, local_lowering(space->mode(mode_index).dim));
}

Operator raising_op(const SpacePtr& space, std::size_t mode_index)
{
    return adjoint(lowering_op(space, mode_index));
}

Operator number_op(const SpacePtr& space, std::size_t mode_index)
{
    return embed(space, mode_index, local_number(space->mode(mode_index).dim));
}

Operator adjoint(const Operator& op)
{
    SparseMatrix m = op.matrix.adjoint();
    return {op.space, std::move(m)};
}

Operator compose(const Operator& a, const Operator& b)
{
    require_same_space(a.space, b.space, "compose");
    SparseMatrix m = a.matrix * b.matrix;
    prune(m);
    return {a.space, std::move(m)};
}

Operator add(const Operator& a, const Operator& b)
{
    require_same_space(a.space, b.space, "add");
    SparseMatrix m = a.matrix + b.matrix;
    prune(m);
    return {a.space, std::move(m)};
}

Operator scale(const Operator& a, Complex factor)
{
    SparseMatrix m = a.matrix * factor;
    prune(m);
    return {a.space, std::move(m)};
}

Operator operator+(const Operator& a, const Operator& b) { return add(a, b); }
Operator operator-(const Operator& a, const Operator& b) { return add(a, scale(b, -1.0)); }
Operator operator*(const Operator& a, const Operator& b) { return compose(a, b); }
Operator operator*(Complex factor, const Operator& a) { return scale(a, factor); }

StateVector basis_state(const CompositeSpace& space, const std::vector<int>& occupations)
{
    StateVector psi = StateVector::Zero(space.total_dim());
    psi(space.index_of(occupations)) = 1.0;
    return psi;
}

DensityMatrix pure_density(const SpacePtr& space, const StateVector& psi)
{
    if (psi.size() != space->total_dim()) {
        throw std::invalid_argument("pure_density: state size does not match the space");
    }
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("pure_density: zero state");
    }
    StateVector v = psi / norm;
    return {space, v * v.adjoint()};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep)
{
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: keep set is empty");
    }
    const CompositeSpace& full = *rho.space;
    auto reduced_space = make_space(full.subspace(keep));

    std::vector<bool> kept(full.size(), false);
    for (auto i : keep) {
        full.mode(i); // range check
        kept[i] = true;
    }

    // Enumerate kept and traced sub-indices as offsets into the full index.
    auto offsets = [&](bool want_kept) {
        std::vector<Eigen::Index> out{0};
        for (std::size_t i = 0; i < full.size(); ++i) {
            if (kept[i] != want_kept) continue;
            std::vector<Eigen::Index> next;
            next.reserve(out.size() * static_cast<std::size_t>(full.mode(i).dim));
            for (auto base : out) {
                for (int n = 0; n < full.mode(i).dim; ++n) {
                    next.push_back(base + n * full.stride(i));
                }
            }
            out = std::move(next);
        }
        return out;
    };
    const auto kept_off = offsets(true);
    const auto traced_off = offsets(false);

    const auto dk = static_cast<Eigen::Index>(kept_off.size());
    DenseMatrix red = DenseMatrix::Zero(dk, dk);
    for (Eigen::Index b = 0; b < dk; ++b) {
        for (Eigen::Index a = 0; a < dk; ++a) {
            Complex s = 0.0;
            for (auto t : traced_off) {
                s += rho.matrix(kept_off[a] + t, kept_off[b] + t);
            }
            red(a, b) = s;
        }
    }
    return {reduced_space, std::move(red)};
}

Complex expectation(const Operator& op, const DensityMatrix& rho)
{
    require_same_space(op.space, rho.space, "expectation");
    Complex s = 0.0;
    for (Eigen::Index k = 0; k < op.matrix.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) {
            s += it.value() * rho.matrix(it.col(), it.row());
        }
    }
    return s;
}

double fidelity_pure(const StateVector& psi, const DenseMatrix& rho)
{
    if (psi.size() != rho.rows()) {
        throw std::invalid_argument("fidelity_pure: state and density matrix dimensions differ");
    }
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

double fidelity_pure(const StateVector& psi, const DensityMatrix& rho)
{
    return fidelity_pure(psi, rho.matrix);
}

DensityDiagnostics diagnose(const DenseMatrix& rho)
{
    DensityDiagnostics d;
    d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    DenseMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

void validate_density(const DenseMatrix& rho, double trace_tol, double hermiticity_tol, double eigen_tol)
{
    const auto d = diagnose(rho);
    if (d.trace_error > trace_tol) {
        throw std::domain_error("density matrix trace deviates from 1 by " + std::to_string(d.trace_error));
    }
    if (d.hermiticity_error > hermiticity_tol) {
        throw std::domain_error("density matrix is not Hermitian (max deviation " +
                                std::to_string(d.hermiticity_error) + ")");
    }
    if (d.min_eigenvalue < -eigen_tol) {
        throw std::domain_error("density matrix has negative eigenvalue " + std::to_string(d.min_eigenvalue));
    }
}

} // namespace qbath
