#include <doctest.h>

#include "eqe/ccr.hpp"
#include "eqe/circuit.hpp"
#include "oracles.hpp"

using namespace eqe;
using gates::VppbsParams;
using oracles::kPi;

TEST_CASE("state preparation") {
    const PipelineState psi1 = prepare_psi1();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(psi1.state.amplitude(0b010) - cplx(inv_sqrt2)) < 1e-12);
    CHECK(std::abs(psi1.state.amplitude(0b100) - cplx(inv_sqrt2)) < 1e-12);
    for (std::size_t idx : {0b000u, 0b001u, 0b011u, 0b101u, 0b110u, 0b111u}) {
        CHECK(std::abs(psi1.state.amplitude(idx)) < 1e-12);
    }

    const DensityMatrix rho = psi1.state.to_density_matrix();
    CHECK(oracles::max_abs(partial_trace(rho, {kQubitA}).entries() -
                           CMatrix::Identity(2, 2) / 2.0) < 1e-12);
    const DensityMatrix path = partial_trace(rho, {kQubitBPrime});
    CHECK(path.entries()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pipeline stages match their closed forms on a parameter grid") {
    double worst2 = 0.0, worst3 = 0.0, worst4 = 0.0;
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const auto params =
                VppbsParams::make(gates::kTwoPi * i / 8.0, gates::kTwoPi * j / 8.0);
            for (int k = 0; k < 5; ++k) {
                const double phi = gates::kTwoPi * k / 4.0;
                const StateVector psi2 =
                    run_to_stage(CircuitParams{params, phi, false, Stage::Psi2}).state;
                const StateVector psi3 =
                    run_to_stage(CircuitParams{params, phi, false, Stage::Psi3}).state;
                const StateVector psi4 =
                    run_to_stage(CircuitParams{params, phi, false, Stage::Psi4}).state;
                worst2 = std::max(worst2, psi2.max_deviation(oracles::closed_form_psi2(params), true));
                worst3 = std::max(worst3,
                                  psi3.max_deviation(oracles::closed_form_psi3(params, phi), true));
                worst4 = std::max(worst4,
                                  psi4.max_deviation(oracles::closed_form_psi4(params, phi), true));
            }
        }
    }
    CHECK(worst2 < 1e-10);
    CHECK(worst3 < 1e-10);
    CHECK(worst4 < 1e-10);
}

TEST_CASE("named limit states") {
    SUBCASE("identity settings leave the Bell pair untouched") {
        const StateVector psi2 =
            run_to_stage(CircuitParams{VppbsParams::make(0.0, 0.0), 0.0, false, Stage::Psi2}).state;
        const StateVector want = tensor(gates::bell_state(BellOutcome::PsiPlus),
                                        StateVector::zero_state(1));
        CHECK(psi2.max_deviation(want, /*up_to_global_phase=*/true) < 1e-12);
    }
    SUBCASE("PBS-limit state inside the interferometer") {
        // With the implemented coefficient convention (R_V(pi) = -1) the Psi+
        // sector pairs with (|0> + i|1>)/sqrt(2).
        const StateVector psi2 =
            run_to_stage(CircuitParams{VppbsParams::make(0.0, kPi), 0.0, false, Stage::Psi2}).state;
        const cplx i{0.0, 1.0};
        const StateVector want = oracles::from_bell_terms({
            {BellOutcome::PsiPlus, -0.5, -0.5 * i},
            {BellOutcome::PsiMinus, 0.5, -0.5 * i},
        });
        CHECK(psi2.max_deviation(want, true) < 1e-12);
    }
    SUBCASE("PBS-limit state at the output") {
        for (double phi : {0.0, kPi / 3.0, kPi}) {
            const StateVector psi4 =
                run_to_stage(CircuitParams{VppbsParams::make(0.0, kPi), phi, false, Stage::Psi4})
                    .state;
            // sqrt(2)|psi4> = |01>(|0> + i|1>)/sqrt(2) + e^{i phi}|10>(|0> - i|1>)/sqrt(2)
            const cplx i{0.0, 1.0};
            const cplx e = std::polar(1.0, phi);
            CVector amps = CVector::Zero(8);
            amps(0b010) = 0.5;
            amps(0b011) = 0.5 * i;
            amps(0b100) = 0.5 * e;
            amps(0b101) = -0.5 * i * e;
            CHECK(psi4.max_deviation(StateVector(3, amps), true) < 1e-12);
        }
    }
}

TEST_CASE("Bell-basis rotation and its outcome dictionary") {
    const StateVector zero = StateVector::zero_state(1);
    struct Row {
        BellOutcome outcome;
        std::size_t index;
    };
    // Frozen dictionary: (q0 q1) = 00 Phi+, 10 Phi-, 01 Psi+, 11 Psi-.
    for (const Row& row : {Row{BellOutcome::PhiPlus, 0b000}, Row{BellOutcome::PhiMinus, 0b100},
                           Row{BellOutcome::PsiPlus, 0b010}, Row{BellOutcome::PsiMinus, 0b110}}) {
        PipelineState in{Stage::Psi2, false, tensor(gates::bell_state(row.outcome), zero)};
        const PipelineState out = bbm_transform(std::move(in));
        CHECK(out.bbm_applied);
        CHECK(std::abs(out.state.amplitude(row.index) - cplx(1.0)) < 1e-12);
        CHECK(std::abs(out.state.norm() - 1.0) < 1e-12);

        const auto bits = bbm_bits_from_outcome(row.outcome);
        CHECK(bbm_outcome_from_bits(bits.first, bits.second) == row.outcome);
        CHECK((static_cast<std::size_t>(bits.first) * 4 + static_cast<std::size_t>(bits.second) * 2) ==
              row.index);
    }

    SUBCASE("the transform is the catalog gate pair") {
        auto gen = oracles::rng(0xBB000001);
        const StateVector s = oracles::random_state(3, gen);
        const PipelineState via_transform =
            bbm_transform(PipelineState{Stage::Psi2, false, s});
        const auto [cnot_gate, h_gate] = gates::bbm_pair();
        StateVector via_pair = apply_gate(s, cnot_gate, {kQubitA, kQubitB});
        via_pair = apply_gate(via_pair, h_gate, {kQubitA});
        CHECK(via_transform.state.max_deviation(via_pair) < 1e-14);
    }
}

TEST_CASE("detector probabilities after post-selection") {
    const VppbsParams pbs = VppbsParams::make(0.0, kPi);

    SUBCASE("full-visibility fringe at the PBS limit") {
        for (int k = 0; k <= 16; ++k) {
            const double phi = gates::kTwoPi * k / 16.0;
            const auto plus =
                output_probabilities(CircuitParams{pbs, phi, false, Stage::Psi4}, BellOutcome::PsiPlus);
            const auto minus = output_probabilities(CircuitParams{pbs, phi, false, Stage::Psi4},
                                                    BellOutcome::PsiMinus);
            const double c2 = std::cos(phi / 2.0) * std::cos(phi / 2.0);
            CHECK(std::abs(plus.detector0 - c2) < 1e-10);
            CHECK(std::abs(minus.detector0 - (1.0 - c2)) < 1e-10);
            CHECK(plus.detector0 + plus.detector1 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(plus.outcome_probability == doctest::Approx(0.5).epsilon(1e-10));
        }
    }
    SUBCASE("Phi outcomes are structurally empty") {
        CHECK_THROWS_AS(output_probabilities(CircuitParams{pbs, 0.3, false, Stage::Psi4},
                                             BellOutcome::PhiPlus),
                        ZeroProbabilityOutcome);
    }
    SUBCASE("degenerate Psi branches throw too") {
        CHECK_THROWS_AS(
            output_probabilities(CircuitParams{VppbsParams::make(0.0, 0.0), 0.3, false, Stage::Psi4},
                                 BellOutcome::PsiMinus),
            ZeroProbabilityOutcome);
    }
    SUBCASE("only defined at the output stage") {
        CHECK_THROWS_AS(output_probabilities(CircuitParams{pbs, 0.3, false, Stage::Psi2},
                                             BellOutcome::PsiPlus),
                        std::invalid_argument);
    }
}

TEST_CASE("Bell-outcome probabilities equal |N|^2 / 4 across the grid") {
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const auto params =
                VppbsParams::make(gates::kTwoPi * i / 8.0, gates::kTwoPi * j / 8.0);
            const StateVector psi2 =
                run_to_stage(CircuitParams{params, 0.0, false, Stage::Psi2}).state;
            double total = 0.0;
            for (BellOutcome outcome : {BellOutcome::PsiPlus, BellOutcome::PsiMinus}) {
                const double p =
                    conditional_amplitudes(psi2, gates::bell_state(outcome), {0, 1}).squaredNorm();
                CHECK(std::abs(p - branch_probability(params, outcome)) < 1e-12);
                total += p;
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
}
