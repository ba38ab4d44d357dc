#include "eqe/tomo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "eqe/erasure.hpp"

namespace eqe::tomo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kConditionLimit = 1e6;

// Stream tags for sub-seed derivation.
constexpr std::uint64_t kStreamCalibrate = 0x43414c3100000000ull;
constexpr std::uint64_t kStreamStepOneCal = 0x533143414c000000ull;
constexpr std::uint64_t kStreamStepOne = 0x5331544f4d4f0000ull;
constexpr std::uint64_t kStreamStepTwoCal = 0x533243414c000000ull;
constexpr std::uint64_t kStreamStepTwo = 0x5332544f4d4f0000ull;

const Eigen::Matrix2cd& sigma(char axis) {
    static const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    static const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    static const Eigen::Matrix2cd sy =
        (Eigen::Matrix2cd() << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)).finished();
    static const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    switch (axis) {
        case 'I': return id;
        case 'X': return sx;
        case 'Y': return sy;
        case 'Z': return sz;
    }
    throw std::invalid_argument(std::string("unknown Pauli axis '") + axis + "'");
}

CMatrix pauli_matrix(const std::string& label) {
    CMatrix m = sigma(label[0]);
    for (std::size_t i = 1; i < label.size(); ++i) m = kron(m, sigma(label[i]));
    return m;
}

std::vector<std::string> all_pauli_strings(int n_qubits) {
    std::vector<std::string> out{""};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<std::string> next;
        next.reserve(out.size() * 4);
        for (const auto& s : out) {
            for (char axis : {'I', 'X', 'Y', 'Z'}) next.push_back(s + axis);
        }
        out = std::move(next);
    }
    return out;
}

void check_basis(const std::string& basis) {
    for (char c : basis) {
        if (c != 'X' && c != 'Y' && c != 'Z') {
            throw std::invalid_argument("measurement basis must be over {X, Y, Z}: " + basis);
        }
    }
}

// Rotates the listed qubits so that measuring Z afterwards realizes the
// requested Pauli basis (H for X; S† then H for Y).
StateVector rotate_to_basis(StateVector state, const std::string& basis,
                            const std::vector<int>& qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        switch (basis[i]) {
            case 'X':
                state = apply_gate(state, gates::hadamard(), {qubits[i]});
                break;
            case 'Y':
                state = apply_gate(state, gates::phase(-kPi / 2.0), {qubits[i]});
                state = apply_gate(state, gates::hadamard(), {qubits[i]});
                break;
            case 'Z':
                break;
            default:
                throw std::invalid_argument("unknown basis axis");
        }
    }
    return state;
}

// Marginal computational-basis distribution over the listed qubits (ascending;
// the first listed qubit is the most significant bit of the outcome index).
std::vector<double> outcome_distribution(const StateVector& state, const std::vector<int>& qubits) {
    const int n = state.n_qubits();
    const std::size_t dim = static_cast<std::size_t>(state.dim());
    const std::size_t m = qubits.size();
    std::vector<double> probs(std::size_t{1} << m, 0.0);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        std::size_t out = 0;
        for (std::size_t b = 0; b < m; ++b) {
            if (idx & qubit_mask(n, qubits[b])) out |= std::size_t{1} << (m - 1 - b);
        }
        probs[out] += std::norm(state.amplitude(idx));
    }
    double total = 0.0;
    for (double p : probs) total += p;
    if (total > 0.0) {
        for (double& p : probs) p /= total;
    }
    return probs;
}

Histogram multinomial_sample(const std::vector<double>& probs, std::uint64_t shots,
                             std::mt19937_64& rng) {
    Histogram h(probs.size(), 0);
    double remaining_p = 1.0;
    std::uint64_t remaining_n = shots;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        if (remaining_n == 0) break;
        double p = remaining_p > 0.0 ? probs[i] / remaining_p : 0.0;
        p = std::clamp(p, 0.0, 1.0);
        std::uint64_t c;
        if (p >= 1.0) {
            c = remaining_n;
        } else {
            std::binomial_distribution<std::uint64_t> bin(remaining_n, p);
            c = bin(rng);
        }
        h[i] = c;
        remaining_n -= c;
        remaining_p -= probs[i];
    }
    h.back() += remaining_n;
    return h;
}

Histogram sample_outcomes(const StateVector& state, const std::string& basis,
                          const std::vector<int>& qubits, std::uint64_t shots,
                          std::uint64_t seed, const ReadoutNoise* noise) {
    StateVector rotated = rotate_to_basis(state, basis, qubits);
    std::vector<double> dist = outcome_distribution(rotated, qubits);
    if (noise != nullptr) dist = noise->apply(dist);
    std::mt19937_64 rng(seed);
    return multinomial_sample(dist, shots, rng);
}

int outcome_bit(std::size_t outcome, std::size_t qubit_pos, std::size_t n) {
    return (outcome >> (n - 1 - qubit_pos)) & 1u;
}

double expectation_from_histogram(const QuasiHistogram& h, std::size_t support_mask) {
    double total = 0.0, signed_sum = 0.0;
    for (std::size_t z = 0; z < h.size(); ++z) {
        total += h[z];
        signed_sum += (std::popcount(z & support_mask) % 2 == 0) ? h[z] : -h[z];
    }
    if (total <= 0.0) throw std::invalid_argument("empty histogram");
    return signed_sum / total;
}

// Lawson-Hanson non-negative least squares for the small unfolding systems.
Eigen::VectorXd nnls(const Eigen::MatrixXd& m, const Eigen::VectorXd& f) {
    const Eigen::Index nvar = m.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
    std::vector<bool> passive(static_cast<std::size_t>(nvar), false);
    const double tol = 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff());

    for (int outer = 0; outer < 4 * nvar; ++outer) {
        const Eigen::VectorXd w = m.transpose() * (f - m * x);
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index i = 0; i < nvar; ++i) {
            if (!passive[static_cast<std::size_t>(i)] && w(i) > best_w) {
                best_w = w(i);
                best = i;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < 4 * nvar; ++inner) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index i = 0; i < nvar; ++i) {
                if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
            }
            Eigen::MatrixXd mp(m.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) mp.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
            const Eigen::VectorXd z = mp.colPivHouseholderQr().solve(f);

            bool feasible = true;
            for (Eigen::Index k = 0; k < z.size(); ++k) {
                if (z(k) <= 0.0) feasible = false;
            }
            if (feasible) {
                x.setZero();
                for (std::size_t k = 0; k < idx.size(); ++k) x(idx[k]) = z(static_cast<Eigen::Index>(k));
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double zk = z(static_cast<Eigen::Index>(k));
                if (zk <= 0.0) {
                    const double xk = x(idx[k]);
                    alpha = std::min(alpha, xk / (xk - zk));
                }
            }
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double zk = z(static_cast<Eigen::Index>(k));
                double nx = x(idx[k]) + alpha * (zk - x(idx[k]));
                if (nx <= tol) {
                    nx = 0.0;
                    passive[static_cast<std::size_t>(idx[k])] = false;
                }
                x(idx[k]) = nx;
            }
        }
    }
    return x;
}

QuasiHistogram unfold(const QuasiHistogram& histogram, const ReadoutNoise& calibration,
                      bool plain_inversion) {
    const std::size_t dim = std::size_t{1} << calibration.n_qubits();
    if (histogram.size() != dim) {
        throw std::invalid_argument("histogram size does not match calibration dimension");
    }
    if (calibration.condition_number() > kConditionLimit) {
        throw SingularCalibration("confusion model condition number exceeds 1e6");
    }
    const Eigen::MatrixXd m = calibration.full_matrix();
    Eigen::VectorXd f(static_cast<Eigen::Index>(dim));
    double total = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        f(static_cast<Eigen::Index>(i)) = histogram[i];
        total += histogram[i];
    }
    Eigen::VectorXd p;
    if (plain_inversion) {
        p = m.partialPivLu().solve(f);
    } else {
        p = nnls(m, f);
        const double psum = p.sum();
        if (psum > 0.0 && total > 0.0) p *= total / psum;  // preserve total shots
    }
    return QuasiHistogram(p.data(), p.data() + p.size());
}

DensityMatrix unrotate_bbm(const DensityMatrix& rho) {
    // bbm_transform applies CNOT(q0->q1) then H(q0); both are involutions.
    DensityMatrix out = apply_gate(rho, gates::hadamard(), {kQubitA});
    return apply_gate(out, gates::cnot(), {kQubitA, kQubitB});
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream));
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> full_basis_set(int n_qubits) {
    std::vector<std::string> out{""};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<std::string> next;
        next.reserve(out.size() * 3);
        for (const auto& s : out) {
            for (char axis : {'X', 'Y', 'Z'}) next.push_back(s + axis);
        }
        out = std::move(next);
    }
    return out;
}

ReadoutNoise::ReadoutNoise(std::vector<Eigen::Matrix2d> per_qubit) : m_(std::move(per_qubit)) {
    if (m_.empty()) throw std::invalid_argument("readout noise needs at least one qubit");
    for (const auto& m : m_) {
        for (int c = 0; c < 2; ++c) {
            double col = 0.0;
            for (int r = 0; r < 2; ++r) {
                if (m(r, c) < -1e-12 || m(r, c) > 1.0 + 1e-12) {
                    throw std::invalid_argument("confusion matrix entries must lie in [0, 1]");
                }
                col += m(r, c);
            }
            if (std::abs(col - 1.0) > 1e-12) {
                throw std::invalid_argument("confusion matrix columns must sum to 1");
            }
        }
    }
}

ReadoutNoise ReadoutNoise::uniform(int n_qubits, double p01, double p10) {
    Eigen::Matrix2d m;
    m << 1.0 - p01, p10, p01, 1.0 - p10;
    return ReadoutNoise(std::vector<Eigen::Matrix2d>(static_cast<std::size_t>(n_qubits), m));
}

ReadoutNoise ReadoutNoise::slice(const std::vector<int>& qubits) const {
    std::vector<Eigen::Matrix2d> out;
    out.reserve(qubits.size());
    for (int q : qubits) out.push_back(matrix(q));
    return ReadoutNoise(std::move(out));
}

Eigen::MatrixXd ReadoutNoise::full_matrix() const {
    Eigen::MatrixXd full = m_[0];
    for (std::size_t q = 1; q < m_.size(); ++q) {
        Eigen::MatrixXd next(full.rows() * 2, full.cols() * 2);
        for (Eigen::Index i = 0; i < full.rows(); ++i) {
            for (Eigen::Index j = 0; j < full.cols(); ++j) {
                next.block(i * 2, j * 2, 2, 2) = full(i, j) * m_[q];
            }
        }
        full = std::move(next);
    }
    return full;
}

std::vector<double> ReadoutNoise::apply(const std::vector<double>& probs) const {
    const std::size_t n = m_.size();
    const std::size_t dim = std::size_t{1} << n;
    if (probs.size() != dim) {
        throw std::invalid_argument("distribution size does not match noise qubit count");
    }
    std::vector<double> out(dim, 0.0);
    for (std::size_t z = 0; z < dim; ++z) {
        for (std::size_t t = 0; t < dim; ++t) {
            double w = 1.0;
            for (std::size_t q = 0; q < n; ++q) {
                w *= m_[q](outcome_bit(z, q, n), outcome_bit(t, q, n));
            }
            out[z] += w * probs[t];
        }
    }
    return out;
}

double ReadoutNoise::condition_number() const {
    double cond = 1.0;
    for (const auto& m : m_) {
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
        const double smin = svd.singularValues()(1);
        if (smin < 1e-300) return std::numeric_limits<double>::infinity();
        cond *= svd.singularValues()(0) / smin;
    }
    return cond;
}

Histogram sample_counts(const StateVector& state, const std::string& basis, const ShotPlan& plan,
                        const ReadoutNoise* noise) {
    if (static_cast<int>(basis.size()) != state.n_qubits()) {
        throw std::invalid_argument("basis length must equal the qubit count");
    }
    check_basis(basis);
    std::vector<int> qubits(static_cast<std::size_t>(state.n_qubits()));
    for (int q = 0; q < state.n_qubits(); ++q) qubits[static_cast<std::size_t>(q)] = q;
    return sample_outcomes(state, basis, qubits, plan.shots_per_basis,
                           derive_subseed(plan.rng_seed, fnv1a(basis)), noise);
}

ReadoutNoise calibrate(const ReadoutNoise& noise, const ShotPlan& plan) {
    const int n = noise.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<std::array<std::array<double, 2>, 2>> counts(
        static_cast<std::size_t>(n), {{{0.0, 0.0}, {0.0, 0.0}}});
    for (std::size_t k = 0; k < dim; ++k) {
        std::vector<double> dist(dim, 0.0);
        dist[k] = 1.0;
        dist = noise.apply(dist);
        std::mt19937_64 rng(derive_subseed(plan.rng_seed, kStreamCalibrate + k));
        const Histogram h = multinomial_sample(dist, plan.shots_per_basis, rng);
        for (std::size_t z = 0; z < dim; ++z) {
            if (h[z] == 0) continue;
            for (int q = 0; q < n; ++q) {
                const int true_bit = outcome_bit(k, static_cast<std::size_t>(q), static_cast<std::size_t>(n));
                const int rep_bit = outcome_bit(z, static_cast<std::size_t>(q), static_cast<std::size_t>(n));
                counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(rep_bit)]
                      [static_cast<std::size_t>(true_bit)] += static_cast<double>(h[z]);
            }
        }
    }
    std::vector<Eigen::Matrix2d> estimated(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        Eigen::Matrix2d m;
        for (int b = 0; b < 2; ++b) {
            const double col = counts[static_cast<std::size_t>(q)][0][static_cast<std::size_t>(b)] +
                               counts[static_cast<std::size_t>(q)][1][static_cast<std::size_t>(b)];
            for (int r = 0; r < 2; ++r) {
                m(r, b) = col > 0.0
                              ? counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)]
                                      [static_cast<std::size_t>(b)] / col
                              : (r == b ? 1.0 : 0.0);
            }
        }
        estimated[static_cast<std::size_t>(q)] = m;
    }
    return ReadoutNoise(std::move(estimated));
}

QuasiHistogram mitigate(const Histogram& histogram, const ReadoutNoise& calibration,
                        bool plain_inversion) {
    return unfold(QuasiHistogram(histogram.begin(), histogram.end()), calibration, plain_inversion);
}

QuasiHistogram mitigate(const QuasiHistogram& histogram, const ReadoutNoise& calibration,
                        bool plain_inversion) {
    return unfold(histogram, calibration, plain_inversion);
}

TomographyResult tomography_from_counts(const std::map<std::string, QuasiHistogram>& counts) {
    if (counts.empty()) throw IncompleteBasisSet("no measurement settings supplied");
    const std::size_t n = counts.begin()->first.size();
    for (const auto& [basis, h] : counts) {
        check_basis(basis);
        if (basis.size() != n || h.size() != (std::size_t{1} << n)) {
            throw std::invalid_argument("inconsistent basis or histogram size");
        }
    }

    std::map<std::string, double> expectations;
    for (const auto& pauli : all_pauli_strings(static_cast<int>(n))) {
        if (pauli.find_first_not_of('I') == std::string::npos) continue;
        std::size_t support_mask = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if (pauli[q] != 'I') support_mask |= std::size_t{1} << (n - 1 - q);
        }
        double acc = 0.0;
        int compatible = 0;
        for (const auto& [basis, h] : counts) {
            bool ok = true;
            for (std::size_t q = 0; q < n; ++q) {
                if (pauli[q] != 'I' && basis[q] != pauli[q]) ok = false;
            }
            if (!ok) continue;
            acc += expectation_from_histogram(h, support_mask);
            ++compatible;
        }
        if (compatible == 0) {
            throw IncompleteBasisSet("no measurement setting covers Pauli " + pauli);
        }
        expectations[pauli] = acc / compatible;
    }

    TomographyResult result{tomography_from_expectations(expectations, static_cast<int>(n)),
                            counts, false, false};
    // Physicality projection: clip negative eigenvalues and renormalize.
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(result.estimate.entries());
    if (solver.eigenvalues().minCoeff() < -1e-6) {
        Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
        clipped /= clipped.sum();
        result.estimate = DensityMatrix(solver.eigenvectors() * clipped.asDiagonal() *
                                        solver.eigenvectors().adjoint());
        result.physicality_adjusted = true;
    }
    return result;
}

std::map<std::string, double> exact_pauli_expectations(const DensityMatrix& rho) {
    std::map<std::string, double> out;
    for (const auto& pauli : all_pauli_strings(rho.n_qubits())) {
        if (pauli.find_first_not_of('I') == std::string::npos) continue;
        out[pauli] = (rho.entries() * pauli_matrix(pauli)).trace().real();
    }
    return out;
}

DensityMatrix tomography_from_expectations(const std::map<std::string, double>& expectations,
                                           int n_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    CMatrix m = CMatrix::Identity(dim, dim);
    for (const auto& pauli : all_pauli_strings(n_qubits)) {
        if (pauli.find_first_not_of('I') == std::string::npos) continue;
        const auto it = expectations.find(pauli);
        if (it == expectations.end()) {
            throw IncompleteBasisSet("missing expectation for Pauli " + pauli);
        }
        m += it->second * pauli_matrix(pauli);
    }
    return DensityMatrix(m / static_cast<double>(dim));
}

TomographyResult run_state_tomography(const StateVector& state, const std::vector<int>& qubits,
                                      const ShotPlan& plan, const ReadoutNoise* noise,
                                      const ReadoutNoise* calibration,
                                      const TomographyOptions& options) {
    const int m = static_cast<int>(qubits.size());
    if (plan.shots_per_basis == 0) {
        // Exact-expectation path: infinite-shot, noiseless reconstruction.
        const DensityMatrix reduced =
            partial_trace(DensityMatrix::from_state(state), qubits);
        return TomographyResult{
            tomography_from_expectations(exact_pauli_expectations(reduced), m), {}, false, false};
    }

    const std::vector<std::string> bases =
        plan.basis_set.empty() ? full_basis_set(m) : plan.basis_set;
    const ReadoutNoise* unfold_with = calibration != nullptr ? calibration : noise;

    std::map<std::string, QuasiHistogram> histograms;
    for (const auto& basis : bases) {
        check_basis(basis);
        if (static_cast<int>(basis.size()) != m) {
            throw std::invalid_argument("basis length does not match tomographed qubits");
        }
        Histogram h = sample_outcomes(state, basis, qubits, plan.shots_per_basis,
                                      derive_subseed(plan.rng_seed, fnv1a(basis)), noise);
        QuasiHistogram q(h.begin(), h.end());
        if (options.mitigate && noise != nullptr && unfold_with != nullptr) {
            q = mitigate(q, *unfold_with, options.plain_inversion);
        }
        histograms.emplace(basis, std::move(q));
    }
    TomographyResult result = tomography_from_counts(histograms);
    result.mitigated = options.mitigate && noise != nullptr;
    return result;
}

TwoStepResult two_step_experiment(const gates::VppbsParams& params, const ShotPlan& plan,
                                  const ReadoutNoise* noise, const TomographyOptions& options) {
    const PipelineState psi2 = run_to_stage(CircuitParams{params, 0.0, false, Stage::Psi2});

    // Step 1: single-qubit tomography of the path qubit inside the MZI.
    std::optional<ReadoutNoise> noise1;
    std::optional<ReadoutNoise> cal1;
    if (noise != nullptr) {
        noise1 = noise->slice({kQubitBPrime});
        if (options.mitigate && plan.shots_per_basis > 0) {
            cal1 = calibrate(*noise1, ShotPlan{plan.shots_per_basis,
                                               derive_subseed(plan.rng_seed, kStreamStepOneCal),
                                               {}});
        }
    }
    ShotPlan plan1{plan.shots_per_basis, derive_subseed(plan.rng_seed, kStreamStepOne), {}};
    const TomographyResult step1 =
        run_state_tomography(psi2.state, {kQubitBPrime}, plan1,
                             noise1 ? &*noise1 : nullptr, cal1 ? &*cal1 : nullptr, options);

    // Step 2: Bell-basis rotation, full tomography, un-rotation, post-selection.
    const PipelineState rotated = bbm_transform(psi2);
    std::optional<ReadoutNoise> cal3;
    if (noise != nullptr && options.mitigate && plan.shots_per_basis > 0) {
        cal3 = calibrate(*noise, ShotPlan{plan.shots_per_basis,
                                          derive_subseed(plan.rng_seed, kStreamStepTwoCal),
                                          {}});
    }
    ShotPlan plan3{plan.shots_per_basis, derive_subseed(plan.rng_seed, kStreamStepTwo), {}};
    const TomographyResult step2 =
        run_state_tomography(rotated.state, {kQubitA, kQubitB, kQubitBPrime}, plan3, noise,
                             cal3 ? &*cal3 : nullptr, options);

    const DensityMatrix rho2_estimate = unrotate_bbm(step2.estimate);

    TwoStepResult out{ccr_of(step1.estimate),
                      std::nullopt,
                      0.0,
                      std::nullopt,
                      0.0,
                      step1.estimate,
                      step1.mitigated || step2.mitigated,
                      step1.physicality_adjusted || step2.physicality_adjusted};

    auto eval_branch = [&](BellOutcome outcome, std::optional<CcrTriple>& triple, double& prob) {
        try {
            const PostselectResult ps = density_matrix_postselect(rho2_estimate, outcome);
            triple = ccr_of(ps.state);
            prob = ps.probability;
        } catch (const ZeroProbabilityOutcome&) {
            triple = std::nullopt;
            prob = 0.0;
        }
    };
    eval_branch(BellOutcome::PsiPlus, out.after_plus, out.prob_plus);
    eval_branch(BellOutcome::PsiMinus, out.after_minus, out.prob_minus);
    return out;
}

}  // namespace eqe::tomo
