// Parameter sweeps over the beam-splitter angles: named scenarios, exact and
// emulated pipelines, CSV/JSON emission, scenario reports, and the property
// self-test. Grid points are independent; the parallel driver uses OpenMP and
// per-point sub-seeds so results match the serial reference bit for bit.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqe/erasure.hpp"
#include "eqe/tomo.hpp"

namespace eqe::sweep {

enum class Scenario { Grid2d, PhiVZero, PhiHEqPiPlusPhiV, Custom };
enum class Mode { Exact, Emulated };

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario scenario);
const char* to_string(Mode mode);

// Accepts plain radians ("1.5707") or multiples of pi ("pi:0.5").
double parse_angle(const std::string& text);

struct SweepConfig {
    Scenario scenario = Scenario::Grid2d;
    int resolution = 33;
    double phi = 0.0;    // interferometer phase recorded with every row
    double phi_h = 0.0;  // used by Scenario::Custom when no point list is given
    double phi_v = 0.0;
    std::vector<std::array<double, 3>> custom_points;  // (phi_h, phi_v, phi)
    Mode mode = Mode::Exact;
    std::uint64_t shots = 8192;
    std::uint64_t seed = 0;
    std::optional<tomo::ReadoutNoise> noise;
    bool mitigate = true;
    int threads = 0;  // 0 = runtime default, 1 = serial reference
    std::string out_path;
    std::string format = "csv";
};

// Throws std::invalid_argument with a field-level diagnostic on bad input.
SweepConfig config_from_json(const nlohmann::json& j);

struct SweepRow {
    double phi_h = 0.0, phi_v = 0.0, phi = 0.0;
    double prob_psi_plus = 0.0, prob_psi_minus = 0.0;
    double p_before = 0.0, c_before = 0.0, s_before = 0.0, ccr_sum = 0.0;
    std::optional<double> p_after_plus, c_after_plus;
    std::optional<double> p_after_minus, c_after_minus;
    std::optional<double> delta_c_plus, delta_c_minus;
    std::string mode = "exact";
    std::uint64_t seed = 0;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

const std::string& csv_header();
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& is);
nlohmann::json rows_to_json(const std::vector<SweepRow>& rows);

// Named scenario reports checking the qualitative claim for each family:
// "pbs-limit", "conjugate-T", "equal-T", "anti-diagonal".
std::vector<std::string> scenario_report_names();
nlohmann::json run_scenario_report(const std::string& name);

struct CheckResult {
    std::string name;
    bool pass = false;
    double deviation = 0.0;
    std::string detail;
};

// Property suite: gate unitarity, coefficient normalization, Bell-outcome
// completeness, empty Phi sectors, post-measurement purity, and the
// decomposition identities.
std::vector<CheckResult> selftest();

}  // namespace eqe::sweep
