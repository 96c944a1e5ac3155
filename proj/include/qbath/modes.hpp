// Normal modes of the quadratic (harmonic) part of the array, Kerr
// coefficients of the transmon nonlinearity in that basis, and the
// Raman cooling matrix. Everything is linear MHz.
//
// Basis order of the quadratic form: qubit modes b_1..b_N, then resonator
// modes c_1..c_R. Columns of M are normal modes; M(i, s) is the weight of
// bare mode i in normal mode s.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbath/device.hpp"

namespace qbath {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct QuadraticForm {
    MatrixX<Scalar> matrix;
    std::size_t n_qubits{0};
    std::size_t n_resonators{0};
};

// qubit_detunings (N), resonator_detunings (R), hopping (N-1, entered as -J),
// coupling (N x R, qubit i to resonator k).
template <typename Scalar>
QuadraticForm<Scalar> make_quadratic_form(const VectorX<Scalar>& qubit_detunings,
                                          const VectorX<Scalar>& resonator_detunings,
                                          const VectorX<Scalar>& hopping, const MatrixX<Scalar>& coupling)
{
    const Eigen::Index n = qubit_detunings.size();
    const Eigen::Index r = resonator_detunings.size();
    if (hopping.size() != std::max<Eigen::Index>(n - 1, 0)) {
        throw std::invalid_argument("hopping needs one entry per adjacent qubit pair");
    }
    if (coupling.rows() != n || coupling.cols() != r) {
        throw std::invalid_argument("coupling matrix must be qubits x resonators");
    }
    QuadraticForm<Scalar> form;
    form.n_qubits = static_cast<std::size_t>(n);
    form.n_resonators = static_cast<std::size_t>(r);
    form.matrix = MatrixX<Scalar>::Zero(n + r, n + r);
    form.matrix.diagonal().head(n) = qubit_detunings;
    form.matrix.diagonal().tail(r) = resonator_detunings;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        form.matrix(i, i + 1) = form.matrix(i + 1, i) = -hopping(i);
    }
    form.matrix.topRightCorner(n, r) = coupling;
    form.matrix.bottomLeftCorner(r, n) = coupling.transpose();
    return form;
}

// Dedicated-resonator form of a scenario with explicit couplings g (one per
// qubit/resonator pair). Frame at the primary pump frequency.
inline QuadraticForm<double> build_quadratic_form(const ScenarioConfig& config, const std::vector<double>& g)
{
    const auto n = static_cast<Eigen::Index>(config.qubits.size());
    const auto r = static_cast<Eigen::Index>(config.resonators.size());
    if (static_cast<Eigen::Index>(g.size()) != r) throw std::invalid_argument("one coupling per resonator expected");
    double frame = config.qubits.front().working_freq;
    for (const auto& p : config.pumps) {
        if (p.enabled) {
            frame = p.frequency;
            break;
        }
    }
    VectorX<double> dq(n), dr(r), hop(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) dq(i) = config.qubits[static_cast<std::size_t>(i)].working_freq - frame;
    for (Eigen::Index k = 0; k < r; ++k) dr(k) = config.resonators[static_cast<std::size_t>(k)].omega_r - frame;
    for (Eigen::Index i = 0; i + 1 < n; ++i) hop(i) = config.couplings.j[static_cast<std::size_t>(i)];
    MatrixX<double> coupling = MatrixX<double>::Zero(n, r);
    for (Eigen::Index k = 0; k < std::min(n, r); ++k) coupling(k, k) = g[static_cast<std::size_t>(k)];
    return make_quadratic_form<double>(dq, dr, hop, coupling);
}

// Same, with g read from the config; every resonator must carry one.
inline QuadraticForm<double> build_quadratic_form(const ScenarioConfig& config)
{
    std::vector<double> g;
    for (std::size_t k = 0; k < config.resonators.size(); ++k) {
        if (!config.resonators[k].g) {
            throw ConfigError("resonators[" + std::to_string(k) + "].g", "required for the normal-mode analysis");
        }
        g.push_back(*config.resonators[k].g);
    }
    return build_quadratic_form(config, g);
}

enum class ModeClass { qubit_like, resonator_like };

template <typename Scalar = double>
struct NormalModeBasis {
    MatrixX<Scalar> m;          // columns: qubit-like modes then resonator-like modes
    VectorX<Scalar> eigenvalues; // per column of m
    VectorX<Scalar> lambda_q;
    VectorX<Scalar> lambda_r;
    std::vector<ModeClass> classes;
    std::size_t n_qubits{0};
    std::size_t n_resonators{0};
};

// Eigen-decomposition with a fixed column order and sign. Qubit-like columns
// (more than half their weight on qubit modes) come first in ascending
// frequency; resonator-like columns follow in the order of the resonator
// they live on. Each column's largest component is made positive.
template <typename Scalar>
NormalModeBasis<Scalar> normal_modes(const QuadraticForm<Scalar>& form)
{
    const auto& h = form.matrix;
    const Eigen::Index dim = h.rows();
    const auto n = static_cast<Eigen::Index>(form.n_qubits);
    if (h.cols() != dim || dim != n + static_cast<Eigen::Index>(form.n_resonators)) {
        throw std::invalid_argument("quadratic form has inconsistent dimensions");
    }
    using std::abs;
    const Scalar asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-12) * std::max(Scalar(1), h.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("quadratic form is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("normal-mode eigensolve failed");
    const MatrixX<Scalar>& vecs = es.eigenvectors();
    const VectorX<Scalar>& vals = es.eigenvalues();

    std::vector<Eigen::Index> qubit_cols, resonator_cols;
    std::vector<Eigen::Index> resonator_slot(static_cast<std::size_t>(dim - n), -1);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const Scalar w = vecs.col(s).head(n).squaredNorm();
        if (abs(w - Scalar(0.5)) < Scalar(0.1)) {
            throw std::domain_error("normal mode " + std::to_string(s) +
                                    " is an even qubit/resonator mixture; classification is ambiguous");
        }
        if (w > Scalar(0.5)) {
            qubit_cols.push_back(s);
        } else {
            Eigen::Index dom = 0;
            vecs.col(s).tail(dim - n).cwiseAbs().maxCoeff(&dom);
            if (resonator_slot[static_cast<std::size_t>(dom)] >= 0) {
                throw std::domain_error("two normal modes claim resonator " + std::to_string(dom + 1));
            }
            resonator_slot[static_cast<std::size_t>(dom)] = s;
        }
    }
    for (auto s : resonator_slot) {
        if (s >= 0) resonator_cols.push_back(s);
    }
    if (static_cast<Eigen::Index>(qubit_cols.size()) != n ||
        static_cast<Eigen::Index>(resonator_cols.size()) != dim - n) {
        throw std::domain_error("normal-mode classification does not match the mode counts");
    }
    // Eigenvalues come sorted, so qubit_cols is already ascending.

    NormalModeBasis<Scalar> basis;
    basis.n_qubits = form.n_qubits;
    basis.n_resonators = form.n_resonators;
    basis.m.resize(dim, dim);
    basis.eigenvalues.resize(dim);
    basis.lambda_q.resize(n);
    basis.lambda_r.resize(dim - n);
    Eigen::Index col = 0;
    auto place = [&](Eigen::Index s, ModeClass cls) {
        VectorX<Scalar> v = vecs.col(s);
        const Scalar peak = v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (abs(v(i)) >= peak - Scalar(1e-12) * peak) {
                if (v(i) < Scalar(0)) v = -v;
                break;
            }
        }
        basis.m.col(col) = v;
        basis.eigenvalues(col) = vals(s);
        basis.classes.push_back(cls);
        ++col;
    };
    for (auto s : qubit_cols) place(s, ModeClass::qubit_like);
    for (auto s : resonator_cols) place(s, ModeClass::resonator_like);
    basis.lambda_q = basis.eigenvalues.head(n);
    basis.lambda_r = basis.eigenvalues.tail(dim - n);
    return basis;
}

// Dense rank-4 tensor, last index fastest.
template <typename Scalar>
class Tensor4 {
public:
    Tensor4() = default;
    Tensor4(std::size_t a, std::size_t b, std::size_t c, std::size_t d)
        : dims_{a, b, c, d}, data_(a * b * c * d, Scalar(0))
    {
    }
    Scalar& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l)
    {
        return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
    }
    const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const
    {
        return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
    }
    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    const std::vector<Scalar>& data() const { return data_; }
    Scalar max_abs() const
    {
        Scalar m(0);
        for (const auto& x : data_) m = std::max(m, Scalar(std::abs(x)));
        return m;
    }

private:
    std::size_t dims_[4]{0, 0, 0, 0};
    std::vector<Scalar> data_;
};

template <typename Scalar = double>
struct KerrCoefficients {
    Tensor4<Scalar> mu;  // qubit-like self-Kerr, indices over qubit-like modes
    Tensor4<Scalar> xi;  // resonator-like self-Kerr, indices over resonator-like modes
    Tensor4<Scalar> eta; // cross-Kerr (k, k', l, p): resonator-like k k', qubit-like l p
};

// Direct sums over qubit rows i of alpha_i times four entries of row i of M.
template <typename Scalar>
KerrCoefficients<Scalar> kerr_coefficients(const NormalModeBasis<Scalar>& basis, const std::vector<Scalar>& alphas)
{
    const std::size_t n = basis.n_qubits;
    const std::size_t r = basis.n_resonators;
    if (alphas.size() != n) throw std::invalid_argument("one anharmonicity per qubit expected");
    const auto& m = basis.m;
    auto q = [&](std::size_t row, std::size_t s) { return m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(s)); };
    auto res = [&](std::size_t row, std::size_t s) { return q(row, n + s); };

    KerrCoefficients<Scalar> out{Tensor4<Scalar>(n, n, n, n), Tensor4<Scalar>(r, r, r, r), Tensor4<Scalar>(r, r, n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        const Scalar a = alphas[i];
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t p = 0; p < n; ++p) out.mu(s, u, l, p) += a * q(i, s) * q(i, u) * q(i, l) * q(i, p);
        for (std::size_t s = 0; s < r; ++s)
            for (std::size_t u = 0; u < r; ++u)
                for (std::size_t l = 0; l < r; ++l)
                    for (std::size_t p = 0; p < r; ++p) out.xi(s, u, l, p) += a * res(i, s) * res(i, u) * res(i, l) * res(i, p);
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t kk = 0; kk < r; ++kk)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t p = 0; p < n; ++p) out.eta(k, kk, l, p) += a * res(i, k) * res(i, kk) * q(i, l) * q(i, p);
    }
    return out;
}

template <typename Scalar = double>
struct CoolingMatrix {
    std::size_t resonator{0};
    MatrixX<std::complex<Scalar>> exact;  // 2 C_k eta_kklp
    MatrixX<std::complex<Scalar>> approx; // 2 sqrt(n) chi_kk M_kl M_kp
    Scalar max_abs{0};
    Scalar kappa{0};
    bool within_validity{true}; // kappa >= 5 max|d|
};

// Cooling matrix of resonator k driven to n_bar photons with coherent
// amplitude phase `phase`. chi_kk feeds the approximate form; kappa only the
// validity flag.
template <typename Scalar>
CoolingMatrix<Scalar> cooling_matrix(const NormalModeBasis<Scalar>& basis, const KerrCoefficients<Scalar>& kerr,
                                     std::size_t k, Scalar n_bar, Scalar chi_kk, Scalar kappa, Scalar phase = Scalar(0))
{
    if (n_bar < Scalar(0)) throw std::invalid_argument("n_bar must be non-negative");
    const std::size_t n = basis.n_qubits;
    if (k >= basis.n_resonators || k >= n) throw std::out_of_range("resonator index out of range");
    const std::complex<Scalar> amp = std::polar(std::sqrt(n_bar), phase);
    CoolingMatrix<Scalar> out;
    out.resonator = k;
    out.kappa = kappa;
    out.exact.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.approx.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t p = 0; p < n; ++p) {
            const auto li = static_cast<Eigen::Index>(l);
            const auto pi = static_cast<Eigen::Index>(p);
            out.exact(li, pi) = Scalar(2) * amp * kerr.eta(k, k, l, p);
            out.approx(li, pi) = Scalar(2) * amp * chi_kk * basis.m(static_cast<Eigen::Index>(k), li) *
                                 basis.m(static_cast<Eigen::Index>(k), pi);
        }
    }
    out.max_abs = out.exact.cwiseAbs().maxCoeff();
    out.within_validity = !(kappa < Scalar(5) * out.max_abs);
    return out;
}

} // namespace qbath
