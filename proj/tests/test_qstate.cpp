#include <doctest.h>

#include "eqe/qstate.hpp"
#include "oracles.hpp"

using namespace eqe;
using oracles::kPi;

namespace {

StateVector make_state(std::initializer_list<cplx> amps, int n_qubits) {
    CVector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (cplx a : amps) v(i++) = a;
    return StateVector(n_qubits, std::move(v));
}

}  // namespace

TEST_CASE("tensor products follow the qubit-index convention") {
    const StateVector zero = StateVector::zero_state(1);
    const StateVector one = StateVector::basis_state(1, 1);

    SUBCASE("|0> (x) |0>") {
        const StateVector t = tensor(zero, zero);
        CHECK(t.amplitude(0) == cplx(1.0));
        CHECK(t.amplitude(1) == cplx(0.0));
        CHECK(t.amplitude(2) == cplx(0.0));
        CHECK(t.amplitude(3) == cplx(0.0));
    }
    SUBCASE("|+> (x) |1>") {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const StateVector plus = make_state({inv_sqrt2, inv_sqrt2}, 1);
        const StateVector t = tensor(plus, one);
        CHECK(std::abs(t.amplitude(0)) == doctest::Approx(0.0));
        CHECK(t.amplitude(1).real() == doctest::Approx(inv_sqrt2));
        CHECK(std::abs(t.amplitude(2)) == doctest::Approx(0.0));
        CHECK(t.amplitude(3).real() == doctest::Approx(inv_sqrt2));
    }
    SUBCASE("I/2 (x) |0><0|") {
        const DensityMatrix mixed = DensityMatrix::maximally_mixed(1);
        const DensityMatrix pure = DensityMatrix::from_state(zero);
        const DensityMatrix t = tensor(mixed, pure);
        CHECK(t.entries()(0, 0).real() == doctest::Approx(0.5));
        CHECK(std::abs(t.entries()(1, 1)) == doctest::Approx(0.0));
        CHECK(t.entries()(2, 2).real() == doctest::Approx(0.5));
        CHECK(std::abs(t.entries()(3, 3)) == doctest::Approx(0.0));
        CHECK(oracles::max_abs(t.entries() - t.entries().diagonal().asDiagonal().toDenseMatrix()) ==
              doctest::Approx(0.0));
    }
}

TEST_CASE("apply_gate basics") {
    SUBCASE("X on qubit 1 of |00> gives |01>") {
        const StateVector s =
            apply_gate(StateVector::zero_state(2), gates::pauli_x(), {1});
        CHECK(s.amplitude(0b01).real() == doctest::Approx(1.0));
        CHECK(std::abs(s.amplitude(0b00)) == doctest::Approx(0.0));
    }
    SUBCASE("H, CNOT, X prepares the |Psi+> pair") {
        StateVector s = StateVector::zero_state(2);
        s = apply_gate(s, gates::hadamard(), {0});
        s = apply_gate(s, gates::cnot(), {0, 1});
        s = apply_gate(s, gates::pauli_x(), {1});
        CHECK(s.approx_equal(gates::bell_state(BellOutcome::PsiPlus), 1e-12));
    }
    SUBCASE("errors") {
        const StateVector s = StateVector::zero_state(2);
        CHECK_THROWS_AS(apply_gate(s, gates::pauli_x(), {2}), std::out_of_range);
        CHECK_THROWS_AS(apply_gate(s, gates::cnot(), {0}), std::invalid_argument);
        CHECK_THROWS_AS(apply_gate(s, gates::cnot(), {0, 0}), std::invalid_argument);
    }
}

TEST_CASE("apply_gate matches the dense-matrix oracle on all placements") {
    auto gen = oracles::rng(0xABCD0001);
    const std::vector<std::vector<int>> one_qubit_targets{{0}, {1}, {2}};
    const std::vector<std::vector<int>> two_qubit_targets{{0, 1}, {1, 0}, {0, 2},
                                                          {2, 0}, {1, 2}, {2, 1}};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const StateVector state = oracles::random_state(3, gen);

        const CMatrix u1 = oracles::random_unitary(2, gen);
        const UnitaryGate g1(1, u1, "rand1");
        for (const auto& targets : one_qubit_targets) {
            const StateVector got = apply_gate(state, g1, targets);
            const CVector want = oracles::dense_embedding(u1, targets, 3) * state.amplitudes();
            worst = std::max(worst, (got.amplitudes() - want).cwiseAbs().maxCoeff());
        }

        const CMatrix u2 = oracles::random_unitary(4, gen);
        const UnitaryGate g2(2, u2, "rand2");
        for (const auto& targets : two_qubit_targets) {
            const StateVector got = apply_gate(state, g2, targets);
            const CVector want = oracles::dense_embedding(u2, targets, 3) * state.amplitudes();
            worst = std::max(worst, (got.amplitudes() - want).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("gate sequences preserve the norm") {
    auto gen = oracles::rng(0xABCD0002);
    StateVector s = oracles::random_state(3, gen);
    for (int step = 0; step < 50; ++step) {
        const UnitaryGate g(2, oracles::random_unitary(4, gen), "rand");
        const int a = static_cast<int>(gen() % 3);
        const int b = (a + 1 + static_cast<int>(gen() % 2)) % 3;
        s = apply_gate(s, g, {a, b});
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("partial trace") {
    SUBCASE("tracing half of a Bell pair leaves I/2") {
        const DensityMatrix rho =
            DensityMatrix::from_state(gates::bell_state(BellOutcome::PsiPlus));
        const DensityMatrix reduced = partial_trace(rho, {1});
        CHECK(oracles::max_abs(reduced.entries() - CMatrix::Identity(2, 2) / 2.0) < 1e-12);
    }
    SUBCASE("tracing a product state picks the right factor") {
        const DensityMatrix rho =
            DensityMatrix::from_state(StateVector::basis_state(2, 0b01));
        const DensityMatrix reduced = partial_trace(rho, {1});
        CHECK(reduced.entries()(1, 1).real() == doctest::Approx(1.0));
        CHECK(std::abs(reduced.entries()(0, 0)) == doctest::Approx(0.0));
    }
    SUBCASE("matches the index-contraction oracle on random states") {
        auto gen = oracles::rng(0xABCD0003);
        const std::vector<std::vector<int>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}};
        double worst = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            const DensityMatrix rho = oracles::random_density(8, gen);
            for (const auto& keep : keeps) {
                const DensityMatrix got = partial_trace(rho, keep);
                const CMatrix want = oracles::contracted_partial_trace(rho.entries(), keep, 3);
                worst = std::max(worst, oracles::max_abs(got.entries() - want));
                CHECK(std::abs(got.trace_real() - rho.trace_real()) < 1e-12);
            }
        }
        CHECK(worst < 1e-12);
    }
    SUBCASE("path state inside the interferometer at (pi/2, 0)") {
        // Independent route: closed-form state, outer product, index contraction.
        const auto params = gates::VppbsParams::make(kPi / 2.0, 0.0);
        const StateVector psi2 = oracles::closed_form_psi2(params);
        const CMatrix reduced =
            oracles::contracted_partial_trace(psi2.to_density_matrix().entries(), {2}, 3);
        const double p = reduced(0, 0).real() * reduced(0, 0).real() +
                         reduced(1, 1).real() * reduced(1, 1).real() - 0.5;
        const double c = 2.0 * std::norm(reduced(0, 1));
        const double s = 1.0 - p - c - 0.5;
        CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(c == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(s + 0.5 == doctest::Approx(0.75).epsilon(1e-12));  // S = 1/4

        const DensityMatrix via_lib = partial_trace(psi2.to_density_matrix(), {2});
        CHECK(oracles::max_abs(via_lib.entries() - reduced) < 1e-12);
    }
    SUBCASE("errors") {
        const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
        CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
        CHECK_THROWS_AS(partial_trace(rho, {3}), std::out_of_range);
        CHECK_THROWS_AS(partial_trace(rho, {1, 0}), std::invalid_argument);
    }
}

TEST_CASE("projection") {
    const StateVector bell_and_zero =
        tensor(gates::bell_state(BellOutcome::PsiPlus), StateVector::zero_state(1));

    SUBCASE("projecting onto the state's own Bell sector is certain") {
        const auto res = project(bell_and_zero, gates::bell_state(BellOutcome::PsiPlus), {0, 1});
        CHECK(res.probability == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.state.amplitude(0).real() == doctest::Approx(1.0));
    }
    SUBCASE("orthogonal sector throws") {
        CHECK_THROWS_AS(project(bell_and_zero, gates::bell_state(BellOutcome::PhiPlus), {0, 1}),
                        ZeroProbabilityOutcome);
    }
    SUBCASE("PBS limit gives the circular path state with p = 1/2") {
        const auto params = gates::VppbsParams::make(0.0, kPi);
        const StateVector psi2 = oracles::closed_form_psi2(params);
        const auto res = project(psi2, gates::bell_state(BellOutcome::PsiPlus), {0, 1});
        CHECK(res.probability == doctest::Approx(0.5).epsilon(1e-12));
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const StateVector expected(1, (CVector(2) << inv_sqrt2, cplx(0.0, inv_sqrt2)).finished());
        CHECK(res.state.max_deviation(expected, /*up_to_global_phase=*/true) < 1e-12);
    }
    SUBCASE("rejects an unnormalized basis vector") {
        const StateVector bad(2, (CVector(4) << 0.5, 0.5, 0.0, 0.0).finished());
        CHECK_THROWS_AS(project(bell_and_zero, bad, {0, 1}), std::invalid_argument);
    }
    SUBCASE("Bell outcomes are complete on random 3-qubit states") {
        auto gen = oracles::rng(0xABCD0004);
        for (int trial = 0; trial < 50; ++trial) {
            const StateVector s = oracles::random_state(3, gen);
            double total = 0.0;
            for (BellOutcome outcome : {BellOutcome::PhiPlus, BellOutcome::PhiMinus,
                                        BellOutcome::PsiPlus, BellOutcome::PsiMinus}) {
                total += conditional_amplitudes(s, gates::bell_state(outcome), {0, 1}).squaredNorm();
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("density matrix utilities") {
    auto gen = oracles::rng(0xABCD0005);
    const DensityMatrix rho = oracles::random_density(8, gen);
    CHECK(rho.is_hermitian(1e-12));
    CHECK(rho.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.purity() >= 1.0 / 8.0 - 1e-10);
    CHECK(rho.purity() <= 1.0 + 1e-10);
    CHECK(trace_distance(rho, rho) < 1e-14);

    const DensityMatrix pure = DensityMatrix::from_state(StateVector::zero_state(1));
    CHECK(trace_distance(pure, DensityMatrix::maximally_mixed(1)) == doctest::Approx(0.5));
}

TEST_CASE("unitary gate construction rejects non-unitary input") {
    CMatrix bad(2, 2);
    bad << 1, 0, 0, 2;
    CHECK_THROWS_AS(UnitaryGate(1, bad, "bad"), std::invalid_argument);
}
