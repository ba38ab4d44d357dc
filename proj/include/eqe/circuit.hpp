// The eraser circuit: Bell-pair preparation, VPPBS, mirrors + phase shifter,
// output beam splitter, and the optional Bell-basis-measurement rotation.
//
// Qubit assignment: qubit 0 = A (idler polarization), qubit 1 = B (quanton
// polarization), qubit 2 = B' (quanton path). The fourth optical mode A' stays
// |0> throughout the protocol and is dropped as an inert ancilla.

#pragma once

#include <utility>

#include "eqe/gates.hpp"

namespace eqe {

inline constexpr int kQubitA = 0;
inline constexpr int kQubitB = 1;
inline constexpr int kQubitBPrime = 2;

enum class Stage { Psi1, Psi2, Psi3, Psi4 };

const char* to_string(Stage stage);

struct CircuitParams {
    gates::VppbsParams vppbs;
    double phi = 0.0;          // interferometer phase shifter, wrapped into [0, 2*pi]
    bool include_bbm = false;  // rotate (A, B) to the Bell basis at the end
    Stage stage = Stage::Psi4;
};

struct PipelineState {
    Stage stage;
    bool bbm_applied = false;
    StateVector state;
};

// |Psi+>_{AB} (x) |0>_{B'}, built as H(q0), CNOT(q0->q1), X(q1).
PipelineState prepare_psi1();

PipelineState run_to_stage(const CircuitParams& params);

// CNOT(q0->q1) then H(q0); afterwards computational outcomes on (q0, q1) map
// to Bell outcomes as 00 <-> Phi+, 10 <-> Phi-, 01 <-> Psi+, 11 <-> Psi-.
PipelineState bbm_transform(PipelineState input);

BellOutcome bbm_outcome_from_bits(int q0_bit, int q1_bit);
std::pair<int, int> bbm_bits_from_outcome(BellOutcome outcome);

struct DetectionProbabilities {
    double detector0 = 0.0;           // conditional P(B' = 0 | Bell outcome)
    double detector1 = 0.0;           // conditional P(B' = 1 | Bell outcome)
    double outcome_probability = 0.0; // probability of the Bell outcome itself
};

// Conditional detector statistics at the interferometer output (stage Psi4),
// post-selected on a Bell outcome of (A, B). Throws ZeroProbabilityOutcome for
// outcomes with no support (the Phi branches, and degenerate Psi branches).
DetectionProbabilities output_probabilities(const CircuitParams& params, BellOutcome outcome);

}  // namespace eqe
