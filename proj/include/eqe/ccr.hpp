// Complementarity measures on density matrices plus the closed-form
// evaluators for the eraser family, used to cross-validate the state-vector
// pipeline.
//
// For a d-dimensional subsystem of a globally pure state the three measures
// satisfy P_hs + C_hs + S_ln = (d - 1) / d.

#pragma once

#include "eqe/gates.hpp"
#include "eqe/qstate.hpp"

namespace eqe {

struct CcrTriple {
    double predictability = 0.0;  // P_hs = sum_j rho_jj^2 - 1/d
    double coherence = 0.0;       // C_hs = sum_{j != k} |rho_jk|^2
    double entanglement = 0.0;    // S_ln = 1 - Tr(rho^2)

    double sum() const { return (predictability + coherence) + entanglement; }
};

double predictability_hs(const DensityMatrix& rho);
double coherence_hs(const DensityMatrix& rho);
double entanglement_ln(const DensityMatrix& rho);
CcrTriple ccr_of(const DensityMatrix& rho);

// |N_psi_pm|^2 = |T_H +- T_V|^2 + |R_H -+ R_V|^2 for the Psi branches;
// 0 for the Phi branches (they carry no amplitude for this input state).
double branch_norm_squared(const gates::VppbsParams& params, BellOutcome outcome);

// Bell-outcome probability |N|^2 / 4.
double branch_probability(const gates::VppbsParams& params, BellOutcome outcome);

// Path-qubit triple of the unmeasured state inside the interferometer.
CcrTriple ccr_before_closed_form(const gates::VppbsParams& params);

// Path-qubit triple after Bell-basis measurement + post-selection (pure, so
// entanglement = 0). Throws ZeroProbabilityOutcome for a vanishing branch.
CcrTriple ccr_after_closed_form(const gates::VppbsParams& params, BellOutcome outcome);

struct ClosedFormCcr {
    CcrTriple before;
    CcrTriple after_plus;
    CcrTriple after_minus;
};

// Throws ZeroProbabilityOutcome if either Psi branch is degenerate.
ClosedFormCcr ccr_closed_forms(const gates::VppbsParams& params);

// C_after(outcome) - C_before; negative values are possible only within
// numerical noise of zero and are reported, not clamped.
double restored_coherence(const gates::VppbsParams& params, BellOutcome outcome);

}  // namespace eqe
