#include "eqe/ccr.hpp"

#include <cmath>

namespace eqe {

double predictability_hs(const DensityMatrix& rho) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
        const double d = rho.entries()(j, j).real();
        acc += d * d;
    }
    return acc - 1.0 / static_cast<double>(rho.dim());
}

double coherence_hs(const DensityMatrix& rho) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
        for (Eigen::Index k = 0; k < rho.dim(); ++k) {
            if (j != k) acc += std::norm(rho.entries()(j, k));
        }
    }
    return acc;
}

double entanglement_ln(const DensityMatrix& rho) { return 1.0 - rho.purity(); }

CcrTriple ccr_of(const DensityMatrix& rho) {
    return CcrTriple{predictability_hs(rho), coherence_hs(rho), entanglement_ln(rho)};
}

namespace {

// +1 for the Psi+ branch, -1 for Psi-.
int branch_sign(BellOutcome outcome) {
    return outcome == BellOutcome::PsiPlus ? +1 : -1;
}

bool is_psi_branch(BellOutcome outcome) {
    return outcome == BellOutcome::PsiPlus || outcome == BellOutcome::PsiMinus;
}

}  // namespace

double branch_norm_squared(const gates::VppbsParams& p, BellOutcome outcome) {
    if (!is_psi_branch(outcome)) return 0.0;
    const double s = branch_sign(outcome);
    return std::norm(p.t_h + s * p.t_v) + std::norm(p.r_h - s * p.r_v);
}

double branch_probability(const gates::VppbsParams& p, BellOutcome outcome) {
    return branch_norm_squared(p, outcome) / 4.0;
}

CcrTriple ccr_before_closed_form(const gates::VppbsParams& p) {
    const double tt = std::norm(p.t_h) + std::norm(p.t_v);
    const double rr = std::norm(p.r_h) + std::norm(p.r_v);
    const double predictability = 0.25 * tt * tt + 0.25 * rr * rr - 0.5;
    const double coherence = 0.5 * std::norm(p.t_h * std::conj(p.r_h) - p.t_v * std::conj(p.r_v));
    const double entanglement = 1.0 - 0.25 * rr * rr - 0.25 * tt * tt - coherence;
    return CcrTriple{predictability, coherence, entanglement};
}

CcrTriple ccr_after_closed_form(const gates::VppbsParams& p, BellOutcome outcome) {
    if (!is_psi_branch(outcome)) {
        throw ZeroProbabilityOutcome(std::string("Bell outcome ") + to_string(outcome) +
                                     " carries no amplitude for the |Psi+> input pair");
    }
    const double s = branch_sign(outcome);
    const double a = std::norm(p.t_h + s * p.t_v);  // |T_H +- T_V|^2
    const double b = std::norm(p.r_h - s * p.r_v);  // |R_H -+ R_V|^2
    const double n2 = a + b;
    if (n2 < kProbabilityFloor) {
        throw ZeroProbabilityOutcome(std::string("branch ") + to_string(outcome) +
                                     " has vanishing norm at these parameters");
    }
    const double predictability = (a * a + b * b) / (n2 * n2) - 0.5;
    const double coherence = 2.0 * a * b / (n2 * n2);
    return CcrTriple{predictability, coherence, 0.0};
}

ClosedFormCcr ccr_closed_forms(const gates::VppbsParams& p) {
    return ClosedFormCcr{ccr_before_closed_form(p),
                         ccr_after_closed_form(p, BellOutcome::PsiPlus),
                         ccr_after_closed_form(p, BellOutcome::PsiMinus)};
}

double restored_coherence(const gates::VppbsParams& p, BellOutcome outcome) {
    return ccr_after_closed_form(p, outcome).coherence - ccr_before_closed_form(p).coherence;
}

}  // namespace eqe
