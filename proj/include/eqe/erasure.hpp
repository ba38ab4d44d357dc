// Bell-basis measurement with post-selection: outcome probabilities,
// conditional path states, and the full before/after report for one
// parameter point. Degenerate branches are reported as absent values so grid
// sweeps never abort at corner points.

#pragma once

#include <optional>

#include "eqe/ccr.hpp"
#include "eqe/circuit.hpp"

namespace eqe {

struct BranchResult {
    double probability = 0.0;                   // always filled, may be ~0
    std::optional<StateVector> b_prime_state;   // absent when the branch is degenerate
    std::optional<CcrTriple> after;
    std::optional<double> delta_coherence;      // C_after - C_before
};

struct ErasureRecord {
    gates::VppbsParams params;
    double phi = 0.0;
    Stage stage = Stage::Psi2;
    CcrTriple before;
    BranchResult psi_plus;
    BranchResult psi_minus;
};

// Evaluates the measurement on the state inside the interferometer (stage
// Psi2 by default); stage Psi3/Psi4 are available for fringe analysis.
ErasureRecord erase(const gates::VppbsParams& params, double phi = 0.0,
                    Stage stage = Stage::Psi2);

struct PostselectResult {
    DensityMatrix state;  // normalized conditional path state
    double probability;
};

// <Bell| rho3 |Bell> over qubits (A, B), trace-normalized. Accepts noisy or
// tomographic inputs; throws NonPhysicalInput when the trace is off by more
// than 1e-6 and ZeroProbabilityOutcome below the probability floor.
PostselectResult density_matrix_postselect(const DensityMatrix& rho3, BellOutcome outcome);

}  // namespace eqe
