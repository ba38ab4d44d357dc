// Emulation of the hardware pipeline: finite-shot sampling in Pauli bases,
// injected readout error, confusion-matrix calibration and mitigation, and
// linear-inversion state tomography for one and three qubits.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqe/ccr.hpp"
#include "eqe/circuit.hpp"

namespace eqe::tomo {

using Histogram = std::vector<std::uint64_t>;
using QuasiHistogram = std::vector<double>;

// Deterministic per-task seed derivation so parallel sweeps reproduce
// regardless of scheduling.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t fnv1a(std::string_view s);

struct ShotPlan {
    std::uint64_t shots_per_basis = 8192;  // 0 selects the exact-expectation path
    std::uint64_t rng_seed = 0;
    std::vector<std::string> basis_set;    // Pauli strings over {X, Y, Z}; empty = full set
};

// All 3^n measurement settings for full tomography.
std::vector<std::string> full_basis_set(int n_qubits);

// Per-qubit column-stochastic confusion matrices; column = true state,
// row = reported state.
class ReadoutNoise {
public:
    explicit ReadoutNoise(std::vector<Eigen::Matrix2d> per_qubit);

    // p01 = P(report 1 | true 0), p10 = P(report 0 | true 1), same on every qubit.
    static ReadoutNoise uniform(int n_qubits, double p01, double p10);

    int n_qubits() const { return static_cast<int>(m_.size()); }
    const Eigen::Matrix2d& matrix(int qubit) const { return m_.at(static_cast<std::size_t>(qubit)); }

    ReadoutNoise slice(const std::vector<int>& qubits) const;
    Eigen::MatrixXd full_matrix() const;  // tensor product, qubit 0 most significant
    std::vector<double> apply(const std::vector<double>& probs) const;
    double condition_number() const;      // product of per-qubit 2-norm conditions

private:
    std::vector<Eigen::Matrix2d> m_;
};

// Measures every qubit of `state` in the given Pauli basis. The sampling
// distribution is |amplitude|^2 after basis rotation, pushed through the
// confusion matrices when noise is present; deterministic given the plan seed
// and basis.
Histogram sample_counts(const StateVector& state, const std::string& basis, const ShotPlan& plan,
                        const ReadoutNoise* noise = nullptr);

// Prepares each computational basis state, samples it through `noise`, and
// returns the empirically estimated per-qubit confusion matrices.
ReadoutNoise calibrate(const ReadoutNoise& noise, const ShotPlan& plan);

// Readout-error unfolding: solves min ||M p - f||_2 subject to p >= 0 and
// preserves the total count. `plain_inversion` solves the linear system
// directly instead (can go negative; kept for comparison). Throws
// SingularCalibration when the confusion model is ill-conditioned.
QuasiHistogram mitigate(const Histogram& histogram, const ReadoutNoise& calibration,
                        bool plain_inversion = false);
QuasiHistogram mitigate(const QuasiHistogram& histogram, const ReadoutNoise& calibration,
                        bool plain_inversion = false);

struct TomographyResult {
    DensityMatrix estimate;
    std::map<std::string, QuasiHistogram> counts;  // per-basis histograms used
    bool mitigated = false;
    bool physicality_adjusted = false;
};

// Linear inversion rho = (1/2^n) sum_P <P> P from per-basis counts; <P> is
// averaged over every compatible measurement setting. Eigenvalues below
// -1e-6 trigger the physicality projection (clip + renormalize). Throws
// IncompleteBasisSet when some Pauli has no compatible setting.
TomographyResult tomography_from_counts(const std::map<std::string, QuasiHistogram>& counts);

std::map<std::string, double> exact_pauli_expectations(const DensityMatrix& rho);
DensityMatrix tomography_from_expectations(const std::map<std::string, double>& expectations,
                                           int n_qubits);

struct TomographyOptions {
    bool mitigate = true;
    bool plain_inversion = false;
};

// End-to-end tomography of the listed qubits (strictly ascending) of `state`.
// plan.shots_per_basis == 0 bypasses sampling and noise entirely and returns
// the exact reconstruction. `calibration` may be null to unfold with the true
// noise matrices.
TomographyResult run_state_tomography(const StateVector& state, const std::vector<int>& qubits,
                                      const ShotPlan& plan, const ReadoutNoise* noise,
                                      const ReadoutNoise* calibration,
                                      const TomographyOptions& options = {});

struct TwoStepResult {
    CcrTriple before;  // from single-qubit tomography of B' inside the MZI
    std::optional<CcrTriple> after_plus;   // 3-qubit tomography + Psi+ post-selection
    double prob_plus = 0.0;
    std::optional<CcrTriple> after_minus;  // same estimate, Psi- branch
    double prob_minus = 0.0;
    DensityMatrix rho_before;
    bool mitigated = false;
    bool physicality_adjusted = false;
};

// The experimental procedure: step 1 tomographs the path qubit before the
// mirrors; step 2 inserts the Bell-basis rotation, tomographs all three
// qubits, un-rotates the estimate, and post-selects.
TwoStepResult two_step_experiment(const gates::VppbsParams& params, const ShotPlan& plan,
                                  const ReadoutNoise* noise,
                                  const TomographyOptions& options = {});

}  // namespace eqe::tomo
