#include <doctest.h>

#include <cmath>

#include "qbath/hilbert.hpp"
#include "qbath/states.hpp"
#include "support/oracles.hpp"

using namespace qbath;
using oracle::Dense;

namespace {

SpacePtr space_of(std::vector<int> qubit_dims, std::vector<int> resonator_dims = {})
{
    std::vector<ModeSpec> modes;
    for (std::size_t i = 0; i < qubit_dims.size(); ++i) {
        modes.push_back({"Q" + std::to_string(i + 1), ModeKind::qubit, qubit_dims[i]});
    }
    for (std::size_t i = 0; i < resonator_dims.size(); ++i) {
        modes.push_back({"R" + std::to_string(i + 1), ModeKind::resonator, resonator_dims[i]});
    }
    return make_space(CompositeSpace(modes));
}

std::vector<int> dims_of(const CompositeSpace& s)
{
    std::vector<int> d;
    for (const auto& m : s.modes()) d.push_back(m.dim);
    return d;
}

Dense dense(const Operator& op) { return Dense(op.matrix); }

} // namespace

TEST_SUITE("hilbert")
{
    TEST_CASE("space structure and ordering")
    {
        auto s = space_of({2, 3}, {4});
        CHECK(s->total_dim() == 24);
        CHECK(s->qubit_count() == 2);
        CHECK(s->resonator_count() == 1);
        CHECK(s->stride(0) == 12);
        CHECK(s->stride(1) == 4);
        CHECK(s->stride(2) == 1);
        for (Eigen::Index i = 0; i < s->total_dim(); ++i) CHECK(s->index_of(s->occupations_of(i)) == i);
        CHECK(s->index_of({1, 0, 0}) == 12);
    }

    TEST_CASE("space validation")
    {
        CHECK_THROWS_AS(CompositeSpace({}), std::invalid_argument);
        CHECK_THROWS_AS(CompositeSpace({{"Q1", ModeKind::qubit, 1}}), std::invalid_argument);
        CHECK_THROWS_AS(CompositeSpace({{"Q1", ModeKind::qubit, 2}, {"Q1", ModeKind::qubit, 2}}), std::invalid_argument);
        CHECK_THROWS_AS(CompositeSpace({{"R1", ModeKind::resonator, 3}, {"Q1", ModeKind::qubit, 2}}),
                        std::invalid_argument);
        auto s = space_of({2});
        CHECK_THROWS_AS(s->mode(1), std::out_of_range);
        CHECK_THROWS_AS(s->index_of({2}), std::out_of_range);
    }

    TEST_CASE("lowering on a single mode")
    {
        auto s2 = space_of({2});
        Dense a2 = dense(lowering_op(s2, 0));
        Dense expect2(2, 2);
        expect2 << 0, 1, 0, 0;
        CHECK(oracle::max_abs(a2 - expect2) == 0.0);

        auto s3 = space_of({}, {3});
        Dense a3 = dense(lowering_op(s3, 0));
        CHECK(a3(0, 1).real() == doctest::Approx(1.0));
        CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
        CHECK(a3.cwiseAbs().sum() == doctest::Approx(1.0 + std::sqrt(2.0)));
        CHECK_THROWS_AS(lowering_op(s3, 1), std::out_of_range);
    }

    TEST_CASE("lowering on the second of two modes matches an explicit Kronecker product")
    {
        auto s = space_of({2, 2});
        Dense expect = oracle::kron(oracle::eye(2), oracle::lowering(2));
        Dense got = dense(lowering_op(s, 1));
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) CHECK(got(i, j) == expect(i, j));
    }

    TEST_CASE("number operator")
    {
        auto s2 = space_of({2});
        CHECK(oracle::max_abs(dense(number_op(s2, 0)) - Eigen::Vector2cd(0, 1).asDiagonal().toDenseMatrix()) == 0.0);
        auto s4 = space_of({}, {4});
        Dense n4 = dense(number_op(s4, 0));
        for (int k = 0; k < 4; ++k) CHECK(n4(k, k).real() == doctest::Approx(k));
        CHECK(oracle::max_abs(n4 - Dense(n4.diagonal().asDiagonal())) == 0.0);

        auto s = space_of({3, 2}, {4});
        for (std::size_t m = 0; m < s->size(); ++m) {
            Dense n = dense(number_op(s, m));
            Dense ada = dense(compose(raising_op(s, m), lowering_op(s, m)));
            CHECK(oracle::max_abs(n - ada) < 1e-14);
        }
    }

    TEST_CASE("commutator [n, a] = -a holds up to the truncation boundary")
    {
        auto s = space_of({}, {5});
        Dense a = dense(lowering_op(s, 0));
        Dense n = dense(number_op(s, 0));
        CHECK(oracle::max_abs(n * a - a * n + a) < 1e-14);
        // [a, a^dag] = 1 fails only on the top Fock level.
        Dense comm = a * a.adjoint() - a.adjoint() * a;
        for (int k = 0; k < 4; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
        CHECK(std::abs(comm(4, 4) - (-4.0)) < 1e-14);
    }

    TEST_CASE("embed, adjoint, compose, add and scale")
    {
        auto s = space_of({2, 3}, {2});
        CHECK(oracle::max_abs(dense(embed(s, 1, sparse_identity(3))) - oracle::eye(12)) == 0.0);
        CHECK(oracle::max_abs(dense(adjoint(lowering_op(s, 2))) - dense(raising_op(s, 2))) == 0.0);
        Operator a = lowering_op(s, 1);
        CHECK(oracle::max_abs(dense(compose(a, identity(s))) - dense(a)) == 0.0);
        CHECK(oracle::max_abs(dense(a + zero_operator(s)) - dense(a)) == 0.0);
        CHECK(oracle::max_abs(dense(scale(a, Complex(0, 2))) - Complex(0, 2) * dense(a)) < 1e-15);
        CHECK_THROWS_AS(embed(s, 0, sparse_identity(3)), std::invalid_argument);
        auto other = space_of({2, 3}, {3});
        CHECK_THROWS_AS(compose(a, identity(other)), std::invalid_argument);
        CHECK_THROWS_AS(add(a, identity(other)), std::invalid_argument);
    }

    TEST_CASE("embedded products agree with a dense Kronecker oracle")
    {
        oracle::Rng rng(11);
        const std::vector<std::vector<int>> layouts{{2, 2, 4}, {2, 3, 2}, {3, 2, 3}, {2, 2, 2, 2}, {4, 4, 4}};
        for (const auto& dims : layouts) {
            std::vector<ModeSpec> modes;
            for (std::size_t i = 0; i < dims.size(); ++i) modes.push_back({"M" + std::to_string(i), ModeKind::qubit, dims[i]});
            auto s = make_space(CompositeSpace(modes));
            REQUIRE(s->total_dim() <= 64);
            Operator acc = identity(s);
            Dense acc_ref = oracle::eye(s->total_dim());
            for (std::size_t m = 0; m < dims.size(); ++m) {
                Dense local = rng.complex_matrix(dims[m], dims[m]);
                Operator op = embed(s, m, local.sparseView());
                Dense ref = oracle::on_mode(dims, m, local);
                CHECK(oracle::max_abs(dense(op) - ref) < 1e-12);
                acc = compose(acc, op + identity(s));
                acc_ref = acc_ref * (ref + oracle::eye(s->total_dim()));
                // (AB)^dag = B^dag A^dag, adjoint is an involution
                CHECK(oracle::max_abs(dense(adjoint(compose(acc, op))) - dense(compose(adjoint(op), adjoint(acc)))) < 1e-12);
                CHECK(oracle::max_abs(dense(adjoint(adjoint(op))) - dense(op)) == 0.0);
            }
            CHECK(oracle::max_abs(dense(acc) - acc_ref) < 1e-9 * std::max(1.0, oracle::max_abs(acc_ref)));
        }
    }

    TEST_CASE("basis states")
    {
        CompositeSpace s = CompositeSpace::qubits_and_resonators(2, 2, 0, 2);
        StateVector gg = basis_state(s, {0, 0});
        CHECK(gg(0) == Complex(1.0));
        CHECK(gg.norm() == doctest::Approx(1.0));
        StateVector eg = basis_state(s, {1, 0});
        CHECK(eg(2) == Complex(1.0));
        StateVector t = (basis_state(s, {0, 1}) + basis_state(s, {1, 0})) / std::sqrt(2.0);
        CHECK(t.norm() == doctest::Approx(1.0));
        CHECK_THROWS_AS(basis_state(s, {2, 0}), std::out_of_range);
    }

    TEST_CASE("partial trace")
    {
        oracle::Rng rng(5);
        auto s = space_of({2}, {3});
        // product state
        Dense ra = rng.density(2), rb = rng.density(3);
        DensityMatrix prod{s, oracle::kron(ra, rb)};
        CHECK(oracle::max_abs(partial_trace(prod, {0}).matrix - ra) < 1e-14);
        CHECK(oracle::max_abs(partial_trace(prod, {1}).matrix - rb) < 1e-14);

        // maximally entangled pair
        auto s22 = space_of({2, 2});
        StateVector bell = (basis_state(*s22, {0, 0}) + basis_state(*s22, {1, 1})) / std::sqrt(2.0);
        DensityMatrix rho_bell = pure_density(s22, bell);
        CHECK(oracle::max_abs(partial_trace(rho_bell, {1}).matrix - 0.5 * oracle::eye(2)) < 1e-15);

        // random 2x3 against index sums
        for (int trial = 0; trial < 5; ++trial) {
            Dense r = rng.density(6);
            DensityMatrix rho{s, r};
            DensityMatrix keep_q = partial_trace(rho, {0});
            DensityMatrix keep_r = partial_trace(rho, {1});
            CHECK(oracle::max_abs(keep_q.matrix - oracle::trace_out_second(r, 2, 3)) < 1e-14);
            CHECK(oracle::max_abs(keep_r.matrix - oracle::trace_out_first(r, 2, 3)) < 1e-14);
            CHECK(std::abs(keep_q.matrix.trace() - 1.0) < 1e-12);
            CHECK(diagnose(keep_r.matrix).min_eigenvalue >= -1e-10);
            CHECK(keep_q.space->mode(0).label == "Q1");
        }
        CHECK_THROWS_AS(partial_trace(prod, {}), std::invalid_argument);
    }

    TEST_CASE("expectation and pure-state fidelity")
    {
        auto s = space_of({2, 2});
        StateVector t = qubit_state("T", 2);
        StateVector sing = qubit_state("S", 2);
        CHECK(fidelity_pure(t, pure_density(s, t)) == doctest::Approx(1.0));
        CHECK(std::abs(fidelity_pure(t, pure_density(s, sing))) < 1e-15);
        DenseMatrix mixed = 0.25 * oracle::eye(4);
        CHECK(fidelity_pure(t, mixed) == doctest::Approx(0.25));
        CHECK(fidelity_pure(sing, mixed) == doctest::Approx(0.25));
        CHECK(expectation(number_op(s, 0), pure_density(s, t)).real() == doctest::Approx(0.5));
        CHECK_THROWS_AS(fidelity_pure(StateVector::Zero(3), mixed), std::invalid_argument);
        auto other = space_of({2}, {2});
        CHECK_THROWS_AS(expectation(number_op(other, 0), pure_density(s, t)), std::invalid_argument);
    }

    TEST_CASE("density validation")
    {
        oracle::Rng rng(3);
        Dense good = rng.density(4);
        CHECK_NOTHROW(validate_density(good));
        Dense bad_trace = 1.01 * good;
        CHECK_THROWS_AS(validate_density(bad_trace), std::domain_error);
        Dense bad_herm = good;
        bad_herm(0, 1) += 1e-6;
        CHECK_THROWS_AS(validate_density(bad_herm), std::domain_error);
        Dense neg = Dense::Zero(2, 2);
        neg(0, 0) = 1.1;
        neg(1, 1) = -0.1;
        CHECK_THROWS_AS(validate_density(neg), std::domain_error);
        CHECK(diagnose(neg).min_eigenvalue == doctest::Approx(-0.1));
    }
}

TEST_SUITE("states")
{
    TEST_CASE("basis labels and ordering")
    {
        CHECK(basis_labels(2) == std::vector<std::string>{"gg", "ge", "eg", "ee"});
        CHECK(basis_labels(1, 3) == std::vector<std::string>{"g", "e", "f"});
        CHECK(occupations_from_label("egf", 3) == std::vector<int>{1, 0, 2});
        CHECK_THROWS_AS(occupations_from_label("gf", 2), std::invalid_argument);
    }

    TEST_CASE("named states")
    {
        StateVector t = qubit_state("T", 2);
        CHECK(std::abs(t(1) - 1.0 / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(t(2) - 1.0 / std::sqrt(2.0)) < 1e-15);
        StateVector s = qubit_state("S", 2);
        CHECK(std::abs(t.dot(s)) < 1e-15);
        std::vector<StateVector> v;
        for (const auto& n : named_eigenstates(3)) v.push_back(qubit_state(n, 3));
        REQUIRE(v.size() == 6);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v[i].norm() == doctest::Approx(1.0));
            for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(v[i].dot(v[j])) < 1e-15);
        }
        CHECK(is_qubit_state_name("W", 3));
        CHECK_FALSE(is_qubit_state_name("W", 2));
        CHECK_FALSE(is_qubit_state_name("gf", 2, 2));
        CHECK(is_qubit_state_name("gf", 2, 3));
        CHECK_THROWS_AS(qubit_state("X", 2), std::invalid_argument);
        // qutrit register: T keeps the same support
        StateVector t3 = qubit_state("T", 2, 3);
        CHECK(t3.size() == 9);
        CHECK(std::abs(t3(1)) > 0.7);
        CHECK(std::abs(t3(3)) > 0.7);
    }
}
