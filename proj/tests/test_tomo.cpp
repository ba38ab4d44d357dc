#include <doctest.h>

#include <numeric>

#include "eqe/erasure.hpp"
#include "eqe/tomo.hpp"
#include "oracles.hpp"

using namespace eqe;
using gates::VppbsParams;
using oracles::kPi;


namespace {

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return 0.5 * tv;
}

std::vector<double> normalize(const std::vector<double>& counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
    return out;
}

}  // namespace

TEST_CASE("shot sampling") {
    SUBCASE("|0> in Z is deterministic") {
        const tomo::Histogram h =
            tomo::sample_counts(StateVector::zero_state(1), "Z", tomo::ShotPlan{5000, 7, {}});
        CHECK(h[0] == 5000);
        CHECK(h[1] == 0);
    }
    SUBCASE("|+> in Z is balanced within the binomial bound") {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const StateVector plus(1, (CVector(2) << inv_sqrt2, inv_sqrt2).finished());
        const tomo::Histogram h = tomo::sample_counts(plus, "Z", tomo::ShotPlan{1000000, 11, {}});
        CHECK(h[0] + h[1] == 1000000);
        CHECK(std::abs(static_cast<double>(h[0]) / 1e6 - 0.5) < 0.002);
    }
    SUBCASE("|+> in X is deterministic") {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const StateVector plus(1, (CVector(2) << inv_sqrt2, inv_sqrt2).finished());
        const tomo::Histogram h = tomo::sample_counts(plus, "X", tomo::ShotPlan{4096, 3, {}});
        CHECK(h[0] == 4096);
    }
    SUBCASE("readout error pushes |0> counts into the 1 bin") {
        Eigen::Matrix2d m;
        m << 0.95, 0.1, 0.05, 0.9;
        const tomo::ReadoutNoise noise({m});
        const std::uint64_t shots = 200000;
        const tomo::Histogram h = tomo::sample_counts(StateVector::zero_state(1), "Z",
                                                  tomo::ShotPlan{shots, 13, {}}, &noise);
        const double freq1 = static_cast<double>(h[1]) / static_cast<double>(shots);
        const double sigma = std::sqrt(0.05 * 0.95 / static_cast<double>(shots));
        CHECK(std::abs(freq1 - 0.05) < 3.0 * sigma);
    }
    SUBCASE("same seed, same histogram") {
        auto gen = oracles::rng(0x70707);
        const StateVector s = oracles::random_state(3, gen);
        const tomo::ShotPlan plan{8192, 99, {}};
        CHECK(tomo::sample_counts(s, "XYZ", plan) == tomo::sample_counts(s, "XYZ", plan));
    }
}

TEST_CASE("calibration") {
    SUBCASE("noiseless calibration is the identity within sampling error") {
        const tomo::ReadoutNoise none = tomo::ReadoutNoise::uniform(2, 0.0, 0.0);
        const tomo::ReadoutNoise est = tomo::calibrate(none, tomo::ShotPlan{20000, 5, {}});
        for (int q = 0; q < 2; ++q) {
            CHECK(oracles::max_abs(CMatrix(est.matrix(q).cast<cplx>()) -
                                   CMatrix::Identity(2, 2)) < 1e-12);
        }
    }
    SUBCASE("asymmetric per-qubit noise is recovered per qubit") {
        Eigen::Matrix2d m0, m1, m2;
        m0 << 0.95, 0.03, 0.05, 0.97;
        m1 << 0.92, 0.06, 0.08, 0.94;
        m2 << 0.99, 0.02, 0.01, 0.98;
        const tomo::ReadoutNoise noise({m0, m1, m2});
        const tomo::ReadoutNoise est = tomo::calibrate(noise, tomo::ShotPlan{100000, 17, {}});
        for (int q = 0; q < 3; ++q) {
            CHECK((est.matrix(q) - noise.matrix(q)).cwiseAbs().maxCoeff() < 0.01);
        }
    }
}

TEST_CASE("mitigation") {
    SUBCASE("identity calibration leaves the histogram unchanged") {
        const tomo::ReadoutNoise identity = tomo::ReadoutNoise::uniform(2, 0.0, 0.0);
        const tomo::Histogram h{10, 20, 30, 40};
        const tomo::QuasiHistogram out = tomo::mitigate(h, identity);
        for (std::size_t i = 0; i < h.size(); ++i) {
            CHECK(out[i] == doctest::Approx(static_cast<double>(h[i])).epsilon(1e-12));
        }
    }
    SUBCASE("exact confusion model and exact frequencies invert exactly") {
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(3, 0.05, 0.03);
        std::vector<double> truth{0.1, 0.0, 0.25, 0.05, 0.2, 0.0, 0.3, 0.1};
        const std::vector<double> folded = noise.apply(truth);
        tomo::QuasiHistogram counts(folded.begin(), folded.end());
        for (double& c : counts) c *= 100000.0;
        const tomo::QuasiHistogram out = tomo::mitigate(counts, noise);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            CHECK(std::abs(out[i] / 100000.0 - truth[i]) < 1e-10);
        }
    }
    SUBCASE("never negative, preserves the total") {
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(2, 0.2, 0.15);
        const tomo::Histogram h{4000, 10, 5, 80};  // strongly non-invertible-friendly counts
        const tomo::QuasiHistogram out = tomo::mitigate(h, noise);
        double total = 0.0;
        for (double v : out) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(4095.0).epsilon(1e-9));
    }
    SUBCASE("closer to the truth than raw counts on random states") {
        auto gen = oracles::rng(0x4D495449);
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(3, 0.05, 0.05);
        int improved = 0;
        double mean_raw = 0.0, mean_mitigated = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const StateVector s = oracles::random_state(3, gen);
            std::vector<double> truth(8);
            for (std::size_t i = 0; i < 8; ++i) truth[i] = std::norm(s.amplitude(i));
            const tomo::ShotPlan plan{8192, 1000 + static_cast<std::uint64_t>(trial), {}};
            const tomo::Histogram raw = tomo::sample_counts(s, "ZZZ", plan, &noise);
            const tomo::QuasiHistogram fixed = tomo::mitigate(raw, noise);
            const double tv_raw =
                total_variation(normalize(tomo::QuasiHistogram(raw.begin(), raw.end())), truth);
            const double tv_fixed = total_variation(normalize(fixed), truth);
            mean_raw += tv_raw;
            mean_mitigated += tv_fixed;
            if (tv_fixed < tv_raw) ++improved;
        }
        CHECK(mean_mitigated < mean_raw);
        CHECK(improved >= 80);
    }
    SUBCASE("plain inversion is available and can go negative") {
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(1, 0.3, 0.3);
        const tomo::Histogram h{1000, 0};
        const tomo::QuasiHistogram out = tomo::mitigate(h, noise, /*plain_inversion=*/true);
        CHECK(out[1] < 0.0);
    }
    SUBCASE("ill-conditioned model throws") {
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(3, 0.4999, 0.4999);
        CHECK_THROWS_AS(tomo::mitigate(tomo::Histogram{1, 1, 1, 1, 1, 1, 1, 1}, noise),
                        SingularCalibration);
    }
}

TEST_CASE("tomography") {
    SUBCASE("exact expectations of |0> reconstruct |0><0|") {
        const DensityMatrix rho = DensityMatrix::from_state(StateVector::zero_state(1));
        const DensityMatrix est =
            tomo::tomography_from_expectations(tomo::exact_pauli_expectations(rho), 1);
        CHECK(oracles::max_abs(est.entries() - rho.entries()) < 1e-12);
    }
    SUBCASE("exact expectations reconstruct the full pipeline state") {
        const StateVector psi2 =
            run_to_stage(
                CircuitParams{VppbsParams::make(kPi / 2.0, 0.0), 0.0, false, Stage::Psi2})
                .state;
        const DensityMatrix rho = psi2.to_density_matrix();
        const DensityMatrix est =
            tomo::tomography_from_expectations(tomo::exact_pauli_expectations(rho), 3);
        CHECK(oracles::max_abs(est.entries() - rho.entries()) < 1e-10);
    }
    SUBCASE("exact round trip on random mixed states") {
        auto gen = oracles::rng(0x544F4D4F);
        for (int trial = 0; trial < 25; ++trial) {
            const DensityMatrix rho = oracles::random_density(8, gen);
            const DensityMatrix est =
                tomo::tomography_from_expectations(tomo::exact_pauli_expectations(rho), 3);
            CHECK(trace_distance(rho, est) < 1e-10);
        }
    }
    SUBCASE("incomplete basis set throws") {
        std::map<std::string, tomo::QuasiHistogram> counts{{"ZZ", {1, 0, 0, 0}}};
        CHECK_THROWS_AS(tomo::tomography_from_counts(counts), IncompleteBasisSet);
    }
    SUBCASE("finite-shot error shrinks with the shot budget") {
        auto gen = oracles::rng(0x53484f54);
        const StateVector s = oracles::random_state(3, gen);
        const DensityMatrix truth = s.to_density_matrix();
        double previous = 1.0;
        for (std::uint64_t shots : {256ull, 16384ull, 1048576ull}) {
            double median_err = 0.0;
            std::vector<double> errs;
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto result = tomo::run_state_tomography(
                    s, {0, 1, 2}, tomo::ShotPlan{shots, 900 + seed, {}}, nullptr, nullptr,
                    {false, false});
                errs.push_back(trace_distance(result.estimate, truth));
            }
            std::sort(errs.begin(), errs.end());
            median_err = errs[2];
            CHECK(median_err < previous);
            previous = median_err;
        }
        CHECK(previous < 0.005);
    }
    SUBCASE("end-to-end: PBS limit with shots, post-selected coherence") {
        const StateVector psi2 =
            run_to_stage(CircuitParams{VppbsParams::make(0.0, kPi), 0.0, false, Stage::Psi2}).state;
        const PipelineState rotated = bbm_transform(PipelineState{Stage::Psi2, false, psi2});
        const auto result = tomo::run_state_tomography(rotated.state, {0, 1, 2},
                                                     tomo::ShotPlan{8192, 4242, {}}, nullptr,
                                                     nullptr, {false, false});
        // Undo the rotation before projecting onto the Bell sector.
        DensityMatrix rho2 = apply_gate(result.estimate, gates::hadamard(), {0});
        rho2 = apply_gate(rho2, gates::cnot(), {0, 1});
        const auto ps = density_matrix_postselect(rho2, BellOutcome::PsiPlus);
        const CcrTriple triple = ccr_of(ps.state);
        CHECK(std::abs(triple.predictability - 0.0) < 0.05);
        CHECK(std::abs(triple.coherence - 0.5) < 0.05);
    }
}

TEST_CASE("two-step experiment") {
    SUBCASE("exact expectations match the closed forms") {
        for (const auto& [h, v] : std::vector<std::pair<double, double>>{
                 {kPi / 2.0, 0.0}, {0.0, kPi}, {1.0, 2.0}, {kPi, 0.3}}) {
            const auto params = VppbsParams::make(h, v);
            const tomo::TwoStepResult res =
                tomo::two_step_experiment(params, tomo::ShotPlan{0, 0, {}}, nullptr);
            const CcrTriple before = ccr_before_closed_form(params);
            CHECK(std::abs(res.before.predictability - before.predictability) < 1e-9);
            CHECK(std::abs(res.before.coherence - before.coherence) < 1e-9);
            CHECK(std::abs(res.before.entanglement - before.entanglement) < 1e-9);
            REQUIRE(res.after_plus.has_value());
            const CcrTriple after = ccr_after_closed_form(params, BellOutcome::PsiPlus);
            CHECK(std::abs(res.after_plus->predictability - after.predictability) < 1e-9);
            CHECK(std::abs(res.after_plus->coherence - after.coherence) < 1e-9);
            CHECK(std::abs(res.prob_plus - branch_probability(params, BellOutcome::PsiPlus)) <
                  1e-9);
        }
    }
    SUBCASE("noisy mitigated run lands near the truth") {
        const auto params = VppbsParams::make(kPi, 0.0);
        const tomo::ReadoutNoise noise = tomo::ReadoutNoise::uniform(3, 0.05, 0.03);
        const tomo::TwoStepResult res =
            tomo::two_step_experiment(params, tomo::ShotPlan{8192, 31337, {}}, &noise);
        CHECK(res.mitigated);
        CHECK(std::abs(res.before.entanglement - 0.5) < 0.08);
        REQUIRE(res.after_plus.has_value());
        CHECK(std::abs(res.after_plus->coherence - 0.5) < 0.08);
    }
}
