#include "eqe/gates.hpp"

#include <cmath>

namespace eqe {

const char* to_string(BellOutcome outcome) {
    switch (outcome) {
        case BellOutcome::PhiPlus: return "phi_plus";
        case BellOutcome::PhiMinus: return "phi_minus";
        case BellOutcome::PsiPlus: return "psi_plus";
        case BellOutcome::PsiMinus: return "psi_minus";
    }
    return "?";
}

namespace gates {

namespace {
constexpr cplx kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

double wrap_angle(double phi) {
    if (phi >= 0.0 && phi <= kTwoPi) return phi;
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

Coefficients coefficients(double phi) {
    const cplx half_phase = std::polar(1.0, phi / 2.0);
    return Coefficients{half_phase * std::cos(phi / 2.0), kI * half_phase * std::sin(phi / 2.0)};
}

VppbsParams VppbsParams::make(double phi_h, double phi_v) {
    VppbsParams p;
    p.wrapped = (phi_h < 0.0 || phi_h > kTwoPi || phi_v < 0.0 || phi_v > kTwoPi);
    p.phi_h = wrap_angle(phi_h);
    p.phi_v = wrap_angle(phi_v);
    const Coefficients h = coefficients(p.phi_h);
    const Coefficients v = coefficients(p.phi_v);
    p.t_h = h.t;
    p.r_h = h.r;
    p.t_v = v.t;
    p.r_v = v.r;
    return p;
}

UnitaryGate hadamard() { return UnitaryGate(1, kInvSqrt2 * mat2(1, 1, 1, -1), "H"); }
UnitaryGate pauli_x() { return UnitaryGate(1, mat2(0, 1, 1, 0), "X"); }
UnitaryGate pauli_y() { return UnitaryGate(1, mat2(0, -kI, kI, 0), "Y"); }
UnitaryGate pauli_z() { return UnitaryGate(1, mat2(1, 0, 0, -1), "Z"); }
UnitaryGate s_gate() { return UnitaryGate(1, mat2(1, 0, 0, kI), "S"); }

UnitaryGate phase(double phi) {
    return UnitaryGate(1, mat2(1, 0, 0, std::polar(1.0, phi)), "P");
}

UnitaryGate beam_splitter() {
    return UnitaryGate(1, kInvSqrt2 * mat2(1, kI, kI, 1), "BS");
}

UnitaryGate mirror() { return UnitaryGate(1, mat2(0, kI, kI, 0), "MIRROR"); }

UnitaryGate half_wave_plate() { return UnitaryGate(1, mat2(0, 1, 1, 0), "HWP"); }

UnitaryGate cnot() {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return UnitaryGate(2, std::move(m), "CNOT");
}

UnitaryGate controlled_phase(double phi) {
    CMatrix m = CMatrix::Identity(4, 4);
    m(3, 3) = std::polar(1.0, phi);
    return UnitaryGate(2, std::move(m), "CP");
}

UnitaryGate ps_v(double phi_v) {
    CMatrix m = controlled_phase(phi_v).matrix();
    return UnitaryGate(2, std::move(m), "PS_V");
}

UnitaryGate ps_h(double phi_h) {
    const CMatrix xx = kron(pauli_x().matrix(), pauli_x().matrix());
    CMatrix m = xx * controlled_phase(phi_h).matrix() * xx;
    return UnitaryGate(2, std::move(m), "PS_H");
}

std::pair<UnitaryGate, UnitaryGate> controlled_phase_pair(const VppbsParams& params) {
    return {ps_v(params.phi_v), ps_h(params.phi_h)};
}

UnitaryGate vppbs(const VppbsParams& p) {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = p.t_h;
    m(0, 1) = -kI * p.r_h;
    m(1, 0) = kI * p.r_h;
    m(1, 1) = p.t_h;
    m(2, 2) = p.t_v;
    m(2, 3) = kI * p.r_v;
    m(3, 2) = -kI * p.r_v;
    m(3, 3) = p.t_v;
    return UnitaryGate(2, -m, "VPPBS");
}

UnitaryGate vppbs_decomposed(const VppbsParams& p) {
    const CMatrix id2 = CMatrix::Identity(2, 2);
    const CMatrix bs = kron(id2, beam_splitter().matrix());
    const CMatrix mir = kron(id2, mirror().matrix());
    // Evolution order: BS, mirror, PS_V, PS_H, BS.
    CMatrix m = bs * ps_h(p.phi_h).matrix() * ps_v(p.phi_v).matrix() * mir * bs;
    return UnitaryGate(2, std::move(m), "VPPBS(decomposed)");
}

std::pair<UnitaryGate, UnitaryGate> bbm_pair() { return {cnot(), hadamard()}; }

std::vector<UnitaryGate> catalog(const VppbsParams& params, double phi) {
    return {hadamard(),          pauli_x(),          pauli_y(),
            pauli_z(),           s_gate(),           phase(phi),
            beam_splitter(),     mirror(),           half_wave_plate(),
            cnot(),              controlled_phase(phi),
            ps_v(params.phi_v),  ps_h(params.phi_h),
            vppbs(params),       vppbs_decomposed(params)};
}

StateVector bell_state(BellOutcome outcome) {
    CVector amps = CVector::Zero(4);
    switch (outcome) {
        case BellOutcome::PhiPlus:
            amps(0) = kInvSqrt2;
            amps(3) = kInvSqrt2;
            break;
        case BellOutcome::PhiMinus:
            amps(0) = kInvSqrt2;
            amps(3) = -kInvSqrt2;
            break;
        case BellOutcome::PsiPlus:
            amps(1) = kInvSqrt2;
            amps(2) = kInvSqrt2;
            break;
        case BellOutcome::PsiMinus:
            amps(1) = kInvSqrt2;
            amps(2) = -kInvSqrt2;
            break;
    }
    return StateVector(2, std::move(amps));
}

}  // namespace gates
}  // namespace eqe
