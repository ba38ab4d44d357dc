#include "eqe/qstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace eqe {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_targets(int n_qubits, const std::vector<int>& targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits) {
            throw std::out_of_range("qubit index " + std::to_string(targets[i]) +
                                    " out of range for " + std::to_string(n_qubits) + " qubits");
        }
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("duplicate qubit index in target list");
            }
        }
    }
}

void check_ascending(const std::vector<int>& qubits, const char* what) {
    if (qubits.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
    for (std::size_t i = 1; i < qubits.size(); ++i) {
        if (qubits[i] <= qubits[i - 1]) {
            throw std::invalid_argument(std::string(what) + " list must be strictly ascending");
        }
    }
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector::StateVector(int n_qubits, CVector amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits_ < 1) throw std::invalid_argument("state needs at least one qubit");
    if (amps_.size() != Eigen::Index{1} << n_qubits_) {
        throw std::invalid_argument("amplitude count does not match qubit count");
    }
}

StateVector StateVector::zero_state(int n_qubits) { return basis_state(n_qubits, 0); }

StateVector StateVector::basis_state(int n_qubits, std::size_t index) {
    if (n_qubits < 1) throw std::invalid_argument("state needs at least one qubit");
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (index >= dim) throw std::out_of_range("basis index out of range");
    CVector amps = CVector::Zero(static_cast<Eigen::Index>(dim));
    amps(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::normalized() const {
    const double n = amps_.norm();
    if (n < kProbabilityFloor) throw std::invalid_argument("cannot normalize a null state");
    return StateVector(n_qubits_, amps_ / n);
}

DensityMatrix StateVector::to_density_matrix() const { return DensityMatrix::from_state(*this); }

bool StateVector::approx_equal(const StateVector& other, double tol, bool up_to_global_phase) const {
    return max_deviation(other, up_to_global_phase) <= tol;
}

double StateVector::max_deviation(const StateVector& other, bool up_to_global_phase) const {
    if (n_qubits_ != other.n_qubits_) return std::numeric_limits<double>::infinity();
    cplx phase = 1.0;
    if (up_to_global_phase) {
        Eigen::Index pivot = 0;
        other.amps_.cwiseAbs().maxCoeff(&pivot);
        if (std::abs(other.amps_(pivot)) > 0 && std::abs(amps_(pivot)) > 0) {
            phase = (amps_(pivot) / other.amps_(pivot));
            phase /= std::abs(phase);
        }
    }
    return (amps_ - phase * other.amps_).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || !is_power_of_two(static_cast<std::size_t>(m_.rows()))) {
        throw std::invalid_argument("density matrix dimension must be a power of 2 (>= 2)");
    }
    n_qubits_ = 0;
    for (Eigen::Index d = m_.rows(); d > 1; d >>= 1) ++n_qubits_;
}

DensityMatrix DensityMatrix::from_state(const StateVector& state) {
    return DensityMatrix(state.amplitudes() * state.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

bool DensityMatrix::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix DensityMatrix::normalized() const {
    const double tr = trace_real();
    if (std::abs(tr) < kProbabilityFloor) throw NonPhysicalInput("density matrix has null trace");
    return DensityMatrix(m_ / tr);
}

std::vector<double> DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
    const auto& evs = solver.eigenvalues();
    return std::vector<double>(evs.data(), evs.data() + evs.size());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.entries() - b.entries(), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

UnitaryGate::UnitaryGate(int arity, CMatrix matrix, std::string label)
    : arity_(arity), u_(std::move(matrix)), label_(std::move(label)) {
    if (arity_ != 1 && arity_ != 2) throw std::invalid_argument("gate arity must be 1 or 2");
    const Eigen::Index dim = Eigen::Index{1} << arity_;
    if (u_.rows() != dim || u_.cols() != dim) {
        throw std::invalid_argument("gate matrix size does not match arity: " + label_);
    }
    const double dev = (u_.adjoint() * u_ - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (dev > kUnitaryTol) {
        throw std::invalid_argument("matrix is not unitary (deviation " + std::to_string(dev) +
                                    "): " + label_);
    }
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    CVector out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
    }
    return StateVector(a.n_qubits() + b.n_qubits(), std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.entries(), b.entries()));
}

StateVector apply_gate(const StateVector& state, const UnitaryGate& gate,
                       const std::vector<int>& targets) {
    const int n = state.n_qubits();
    if (static_cast<int>(targets.size()) != gate.arity()) {
        throw std::invalid_argument("target count does not match gate arity: " + gate.label());
    }
    check_targets(n, targets);

    const int k = gate.arity();
    const std::size_t gdim = std::size_t{1} << k;
    std::array<std::size_t, 2> masks{};
    std::size_t tmask = 0;
    for (int b = 0; b < k; ++b) {
        masks[static_cast<std::size_t>(b)] = qubit_mask(n, targets[static_cast<std::size_t>(b)]);
        tmask |= masks[static_cast<std::size_t>(b)];
    }

    const auto& g = gate.matrix();
    const std::size_t dim = static_cast<std::size_t>(state.dim());
    CVector out = CVector::Zero(state.dim());
    std::array<std::size_t, 4> sub{};
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & tmask) continue;
        for (std::size_t gi = 0; gi < gdim; ++gi) {
            std::size_t idx = base;
            for (int b = 0; b < k; ++b) {
                if (gi & (std::size_t{1} << (k - 1 - b))) idx |= masks[static_cast<std::size_t>(b)];
            }
            sub[gi] = idx;
        }
        for (std::size_t row = 0; row < gdim; ++row) {
            cplx acc = 0.0;
            for (std::size_t col = 0; col < gdim; ++col) {
                acc += g(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                       state.amplitudes()(static_cast<Eigen::Index>(sub[col]));
            }
            out(static_cast<Eigen::Index>(sub[row])) = acc;
        }
    }
    return StateVector(n, std::move(out));
}

DensityMatrix apply_gate(const DensityMatrix& rho, const UnitaryGate& gate,
                         const std::vector<int>& targets) {
    const int n = rho.n_qubits();
    // U rho U† column by column through the state-vector kernel.
    CMatrix half(rho.dim(), rho.dim());
    for (Eigen::Index c = 0; c < rho.dim(); ++c) {
        half.col(c) = apply_gate(StateVector(n, rho.entries().col(c)), gate, targets).amplitudes();
    }
    CMatrix full(rho.dim(), rho.dim());
    CMatrix half_adj = half.adjoint();
    for (Eigen::Index c = 0; c < rho.dim(); ++c) {
        full.col(c) = apply_gate(StateVector(n, half_adj.col(c)), gate, targets).amplitudes();
    }
    return DensityMatrix(full.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int n = rho.n_qubits();
    check_ascending(keep, "keep");
    check_targets(n, keep);

    const int m = static_cast<int>(keep.size());
    std::vector<std::size_t> keep_masks(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep_masks[i] = qubit_mask(n, keep[i]);
    std::vector<std::size_t> traced_masks;
    for (int q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
            traced_masks.push_back(qubit_mask(n, q));
        }
    }

    // Bit `i` (MSB-first within each sub-index) of a kept/traced sub-index
    // selects masks[i] in the full index.
    auto embed = [](std::size_t sub, const std::vector<std::size_t>& masks) {
        std::size_t idx = 0;
        const int bits = static_cast<int>(masks.size());
        for (int b = 0; b < bits; ++b) {
            if (sub & (std::size_t{1} << (bits - 1 - b))) idx |= masks[static_cast<std::size_t>(b)];
        }
        return idx;
    };

    const std::size_t kept_dim = std::size_t{1} << m;
    const std::size_t traced_dim = std::size_t{1} << (n - m);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
    for (std::size_t r = 0; r < kept_dim; ++r) {
        for (std::size_t c = 0; c < kept_dim; ++c) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < traced_dim; ++t) {
                const std::size_t off = embed(t, traced_masks);
                acc += rho.entries()(static_cast<Eigen::Index>(embed(r, keep_masks) | off),
                                     static_cast<Eigen::Index>(embed(c, keep_masks) | off));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    }
    return DensityMatrix(std::move(out));
}

CVector conditional_amplitudes(const StateVector& state, const StateVector& basis_vector,
                               const std::vector<int>& on) {
    const int n = state.n_qubits();
    check_ascending(on, "on");
    check_targets(n, on);
    if (basis_vector.n_qubits() != static_cast<int>(on.size())) {
        throw std::invalid_argument("basis vector dimension does not match projected qubits");
    }
    if (std::abs(basis_vector.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("projection basis vector is not normalized");
    }
    if (static_cast<int>(on.size()) == n) {
        throw std::invalid_argument("projection must leave at least one qubit");
    }

    std::vector<std::size_t> on_masks(on.size());
    for (std::size_t i = 0; i < on.size(); ++i) on_masks[i] = qubit_mask(n, on[i]);
    std::vector<std::size_t> rest_masks;
    for (int q = 0; q < n; ++q) {
        if (std::find(on.begin(), on.end(), q) == on.end()) rest_masks.push_back(qubit_mask(n, q));
    }

    auto embed = [](std::size_t sub, const std::vector<std::size_t>& masks) {
        std::size_t idx = 0;
        const int bits = static_cast<int>(masks.size());
        for (int b = 0; b < bits; ++b) {
            if (sub & (std::size_t{1} << (bits - 1 - b))) idx |= masks[static_cast<std::size_t>(b)];
        }
        return idx;
    };

    const std::size_t on_dim = std::size_t{1} << on.size();
    const std::size_t rest_dim = std::size_t{1} << rest_masks.size();
    CVector cond = CVector::Zero(static_cast<Eigen::Index>(rest_dim));
    for (std::size_t r = 0; r < rest_dim; ++r) {
        cplx acc = 0.0;
        for (std::size_t s = 0; s < on_dim; ++s) {
            acc += std::conj(basis_vector.amplitude(s)) *
                   state.amplitudes()(static_cast<Eigen::Index>(embed(s, on_masks) | embed(r, rest_masks)));
        }
        cond(static_cast<Eigen::Index>(r)) = acc;
    }
    return cond;
}

ProjectionResult project(const StateVector& state, const StateVector& basis_vector,
                         const std::vector<int>& on) {
    CVector cond = conditional_amplitudes(state, basis_vector, on);
    const double p = cond.squaredNorm();
    if (p < kProbabilityFloor) {
        throw ZeroProbabilityOutcome("post-selection probability below floor (p = " +
                                     std::to_string(p) + ")");
    }
    const int rest = state.n_qubits() - static_cast<int>(on.size());
    return ProjectionResult{StateVector(rest, cond / std::sqrt(p)), p};
}

}  // namespace eqe
