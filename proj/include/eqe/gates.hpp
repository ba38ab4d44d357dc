// Optical elements of the interferometer as unitary gates, including the
// variable partially-polarizing beam splitter (VPPBS) in both its closed 4x4
// form and its gate-level decomposition.

#pragma once

#include <utility>
#include <vector>

#include "eqe/qstate.hpp"

namespace eqe {

enum class BellOutcome { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* to_string(BellOutcome outcome);

namespace gates {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduces an angle to [0, 2*pi); values already in [0, 2*pi] pass unchanged.
double wrap_angle(double phi);

struct Coefficients {
    cplx t;  // transmission amplitude e^{i phi/2} cos(phi/2)
    cplx r;  // reflection amplitude  i e^{i phi/2} sin(phi/2)
};

Coefficients coefficients(double phi);

// Beam-splitter angles with the derived transmission/reflection amplitudes
// for the horizontal and vertical polarizations.
struct VppbsParams {
    double phi_h = 0.0;
    double phi_v = 0.0;
    cplx t_h, r_h, t_v, r_v;
    bool wrapped = false;  // set when an input angle had to be reduced mod 2*pi

    static VppbsParams make(double phi_h, double phi_v);
};

UnitaryGate hadamard();
UnitaryGate pauli_x();
UnitaryGate pauli_y();
UnitaryGate pauli_z();
UnitaryGate s_gate();
UnitaryGate phase(double phi);     // diag(1, e^{i phi})
UnitaryGate beam_splitter();       // (1/sqrt2) [[1, i], [i, 1]] == S H S
UnitaryGate mirror();              // Y Z == [[0, i], [i, 0]]
UnitaryGate half_wave_plate();     // flips both polarization states (X)
UnitaryGate cnot();                // control = first target qubit

// Two-qubit gates below act on (B, B') with B as the most significant bit.
UnitaryGate controlled_phase(double phi);  // diag(1, 1, 1, e^{i phi})
UnitaryGate ps_v(double phi_v);            // phase on |11>
UnitaryGate ps_h(double phi_h);            // (X (x) X) CP(phi_h) (X (x) X): phase on |00>
std::pair<UnitaryGate, UnitaryGate> controlled_phase_pair(const VppbsParams& params);

// Closed-form 4x4 VPPBS matrix, including its overall -1 factor.
UnitaryGate vppbs(const VppbsParams& params);

// Same unitary assembled from its internal Mach-Zehnder decomposition:
// BS, mirror, PS_V, PS_H, BS (in evolution order). Reproduces vppbs() exactly.
UnitaryGate vppbs_decomposed(const VppbsParams& params);

// Gate pair realizing the Bell-basis measurement rotation: CNOT on (A, B)
// followed by H on A, after which computational readout resolves the basis.
std::pair<UnitaryGate, UnitaryGate> bbm_pair();

// Every named gate at the given parameters; used by self-checks.
std::vector<UnitaryGate> catalog(const VppbsParams& params, double phi);

StateVector bell_state(BellOutcome outcome);

}  // namespace gates
}  // namespace eqe
