#include "eqe/circuit.hpp"

namespace eqe {

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::Psi1: return "psi1";
        case Stage::Psi2: return "psi2";
        case Stage::Psi3: return "psi3";
        case Stage::Psi4: return "psi4";
    }
    return "?";
}

PipelineState prepare_psi1() {
    StateVector s = StateVector::zero_state(3);
    s = apply_gate(s, gates::hadamard(), {kQubitA});
    s = apply_gate(s, gates::cnot(), {kQubitA, kQubitB});
    s = apply_gate(s, gates::pauli_x(), {kQubitB});
    return PipelineState{Stage::Psi1, false, std::move(s)};
}

PipelineState run_to_stage(const CircuitParams& params) {
    const double phi = gates::wrap_angle(params.phi);
    PipelineState ps = prepare_psi1();
    if (params.stage >= Stage::Psi2) {
        ps.state = apply_gate(ps.state, gates::vppbs(params.vppbs), {kQubitB, kQubitBPrime});
    }
    if (params.stage >= Stage::Psi3) {
        ps.state = apply_gate(ps.state, gates::mirror(), {kQubitBPrime});
        ps.state = apply_gate(ps.state, gates::phase(phi), {kQubitBPrime});
    }
    if (params.stage >= Stage::Psi4) {
        ps.state = apply_gate(ps.state, gates::beam_splitter(), {kQubitBPrime});
    }
    ps.stage = params.stage;
    if (params.include_bbm) return bbm_transform(std::move(ps));
    return ps;
}

PipelineState bbm_transform(PipelineState input) {
    input.state = apply_gate(input.state, gates::cnot(), {kQubitA, kQubitB});
    input.state = apply_gate(input.state, gates::hadamard(), {kQubitA});
    input.bbm_applied = true;
    return input;
}

BellOutcome bbm_outcome_from_bits(int q0_bit, int q1_bit) {
    if (q0_bit == 0 && q1_bit == 0) return BellOutcome::PhiPlus;
    if (q0_bit == 1 && q1_bit == 0) return BellOutcome::PhiMinus;
    if (q0_bit == 0 && q1_bit == 1) return BellOutcome::PsiPlus;
    return BellOutcome::PsiMinus;
}

std::pair<int, int> bbm_bits_from_outcome(BellOutcome outcome) {
    switch (outcome) {
        case BellOutcome::PhiPlus: return {0, 0};
        case BellOutcome::PhiMinus: return {1, 0};
        case BellOutcome::PsiPlus: return {0, 1};
        case BellOutcome::PsiMinus: return {1, 1};
    }
    return {0, 0};
}

DetectionProbabilities output_probabilities(const CircuitParams& params, BellOutcome outcome) {
    if (params.stage != Stage::Psi4) {
        throw std::invalid_argument("detector probabilities are defined at stage psi4 only");
    }
    CircuitParams run = params;
    run.include_bbm = false;
    const PipelineState psi4 = run_to_stage(run);
    const CVector cond =
        conditional_amplitudes(psi4.state, gates::bell_state(outcome), {kQubitA, kQubitB});
    const double p_outcome = cond.squaredNorm();
    if (p_outcome < kProbabilityFloor) {
        throw ZeroProbabilityOutcome(std::string("Bell outcome ") + to_string(outcome) +
                                     " has no support at these parameters");
    }
    DetectionProbabilities out;
    out.outcome_probability = p_outcome;
    out.detector0 = std::norm(cond(0)) / p_outcome;
    out.detector1 = std::norm(cond(1)) / p_outcome;
    return out;
}

}  // namespace eqe
