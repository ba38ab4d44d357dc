// Dense complex state representations for few-qubit systems and the generic
// operations (tensor products, gate application on qubit subsets, partial
// trace, projection) everything else builds on.
//
// Index convention: qubit 0 is the most significant bit of a basis index,
// so |q0 q1 ... q_{n-1}> maps to index q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eqe/errors.hpp"

namespace eqe {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kUnitaryTol = 1e-10;        // construction-time U†U check
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kProbabilityFloor = 1e-12;  // post-selection cutoff

// Bit position of `qubit` inside a basis index.
inline int qubit_bit(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }
inline std::size_t qubit_mask(int n_qubits, int qubit) {
    return std::size_t{1} << qubit_bit(n_qubits, qubit);
}

CMatrix kron(const CMatrix& a, const CMatrix& b);

class DensityMatrix;

// Pure state of n qubits as 2^n complex amplitudes.
class StateVector {
public:
    StateVector(int n_qubits, CVector amplitudes);

    static StateVector zero_state(int n_qubits);
    static StateVector basis_state(int n_qubits, std::size_t index);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return amps_.size(); }
    const CVector& amplitudes() const { return amps_; }
    cplx amplitude(std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

    double norm() const { return amps_.norm(); }
    StateVector normalized() const;
    DensityMatrix to_density_matrix() const;

    // Entrywise comparison; with `up_to_global_phase` the phases are aligned
    // on the largest-magnitude amplitude of `other` first.
    bool approx_equal(const StateVector& other, double tol, bool up_to_global_phase = false) const;
    double max_deviation(const StateVector& other, bool up_to_global_phase = false) const;

private:
    int n_qubits_;
    CVector amps_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix entries);

    static DensityMatrix from_state(const StateVector& state);
    static DensityMatrix maximally_mixed(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const CMatrix& entries() const { return m_; }

    double trace_real() const { return m_.trace().real(); }
    double purity() const;  // Tr(rho^2)
    bool is_hermitian(double tol = kHermitianTol) const;
    DensityMatrix normalized() const;  // divide by trace
    std::vector<double> eigenvalues() const;  // Hermitian spectrum, ascending

private:
    int n_qubits_;
    CMatrix m_;
};

// 0.5 * sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// 1- or 2-qubit unitary; U†U = I is enforced at construction.
class UnitaryGate {
public:
    UnitaryGate(int arity, CMatrix matrix, std::string label);

    int arity() const { return arity_; }
    const CMatrix& matrix() const { return u_; }
    const std::string& label() const { return label_; }

private:
    int arity_;
    CMatrix u_;
    std::string label_;
};

StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Applies `gate` to the listed qubits (targets[0] is the most significant bit
// of the gate's own index space); identity on the rest.
StateVector apply_gate(const StateVector& state, const UnitaryGate& gate,
                       const std::vector<int>& targets);

// U rho U† with the same target convention as apply_gate.
DensityMatrix apply_gate(const DensityMatrix& rho, const UnitaryGate& gate,
                         const std::vector<int>& targets);

// Keeps the listed qubits (strictly ascending) and traces out the rest.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Unnormalized amplitudes of the remaining qubits after projecting the qubits
// `on` (strictly ascending) onto `basis_vector`; squared norm of the result is
// the outcome probability.
CVector conditional_amplitudes(const StateVector& state, const StateVector& basis_vector,
                               const std::vector<int>& on);

struct ProjectionResult {
    StateVector state;   // normalized conditional state on the remaining qubits
    double probability;  // outcome probability
};

// Throws ZeroProbabilityOutcome when the outcome probability is below the floor.
ProjectionResult project(const StateVector& state, const StateVector& basis_vector,
                         const std::vector<int>& on);

}  // namespace eqe
