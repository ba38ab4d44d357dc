#include "eqe/erasure.hpp"

#include <cmath>

namespace eqe {

ErasureRecord erase(const gates::VppbsParams& params, double phi, Stage stage) {
    if (stage == Stage::Psi1) {
        throw std::invalid_argument("erasure is evaluated after the VPPBS (stage psi2 or later)");
    }
    ErasureRecord rec;
    rec.params = params;
    rec.phi = gates::wrap_angle(phi);
    rec.stage = stage;

    const PipelineState ps = run_to_stage(CircuitParams{params, rec.phi, false, stage});
    const DensityMatrix rho_path =
        partial_trace(DensityMatrix::from_state(ps.state), {kQubitBPrime});
    rec.before = ccr_of(rho_path);

    auto eval_branch = [&](BellOutcome outcome) {
        BranchResult branch;
        const CVector cond =
            conditional_amplitudes(ps.state, gates::bell_state(outcome), {kQubitA, kQubitB});
        branch.probability = cond.squaredNorm();
        if (branch.probability >= kProbabilityFloor) {
            StateVector conditional(1, cond / std::sqrt(branch.probability));
            branch.after = ccr_of(conditional.to_density_matrix());
            branch.delta_coherence = branch.after->coherence - rec.before.coherence;
            branch.b_prime_state = std::move(conditional);
        }
        return branch;
    };
    rec.psi_plus = eval_branch(BellOutcome::PsiPlus);
    rec.psi_minus = eval_branch(BellOutcome::PsiMinus);
    return rec;
}

PostselectResult density_matrix_postselect(const DensityMatrix& rho3, BellOutcome outcome) {
    if (rho3.n_qubits() != 3) {
        throw std::invalid_argument("post-selection expects a 3-qubit density matrix");
    }
    if (std::abs(rho3.trace_real() - 1.0) > 1e-6) {
        throw NonPhysicalInput("density matrix trace deviates from 1 by more than 1e-6");
    }
    const StateVector bell = gates::bell_state(outcome);
    // Qubits (A, B) occupy the two most significant index bits, B' the least.
    CMatrix block(2, 2);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            cplx acc = 0.0;
            for (int s = 0; s < 4; ++s) {
                for (int t = 0; t < 4; ++t) {
                    acc += std::conj(bell.amplitude(static_cast<std::size_t>(s))) *
                           rho3.entries()(s * 2 + r, t * 2 + c) *
                           bell.amplitude(static_cast<std::size_t>(t));
                }
            }
            block(r, c) = acc;
        }
    }
    const double p = block.trace().real();
    if (p < kProbabilityFloor) {
        throw ZeroProbabilityOutcome(std::string("Bell outcome ") + to_string(outcome) +
                                     " has probability below the floor");
    }
    return PostselectResult{DensityMatrix(block / p), p};
}

}  // namespace eqe
