// Command-line surface for the eraser simulator: parameter sweeps, named
// scenario reports, the emulated tomography pipeline, detector probabilities,
// and the property self-test.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqe/sweep.hpp"

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct CommonFlags {
    std::optional<std::string> phi_h, phi_v, phi;
    std::optional<std::uint64_t> shots, seed;
    std::optional<std::string> readout_error;
    std::optional<std::string> mitigate;
    std::optional<std::string> out, format;
};

// "p01,p10" applied to every qubit or "p01,p10;p01,p10;p01,p10" per qubit.
eqe::tomo::ReadoutNoise parse_readout_error(const std::string& spec) {
    std::vector<Eigen::Matrix2d> mats;
    std::stringstream per_qubit(spec);
    std::string pair;
    while (std::getline(per_qubit, pair, ';')) {
        const auto comma = pair.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("--readout-error expects p01,p10 pairs");
        }
        const double p01 = std::stod(pair.substr(0, comma));
        const double p10 = std::stod(pair.substr(comma + 1));
        Eigen::Matrix2d m;
        m << 1.0 - p01, p10, p01, 1.0 - p10;
        mats.push_back(m);
    }
    if (mats.size() == 1) {
        mats = std::vector<Eigen::Matrix2d>(3, mats[0]);
    }
    if (mats.size() != 3) {
        throw std::invalid_argument("--readout-error needs one pair or three per-qubit pairs");
    }
    return eqe::tomo::ReadoutNoise(std::move(mats));
}

std::uint64_t seed_fallback() {
    if (const char* env = std::getenv("EQE_SEED")) return std::stoull(env);
    return 0;
}

bool parse_on_off(const std::string& v, const char* flag) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw std::invalid_argument(std::string(flag) + " expects on|off");
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    os << payload;
}

int run_sweep_command(const std::string& config_path, const std::string& scenario,
                      std::optional<int> resolution, std::optional<int> threads,
                      const CommonFlags& flags, std::optional<std::string> mode) {
    eqe::sweep::SweepConfig cfg;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw std::runtime_error("cannot open config file " + config_path);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config parse error in " + config_path + ": " + e.what());
        }
        cfg = eqe::sweep::config_from_json(j);
    }
    // Flags win over the config file.
    if (!scenario.empty()) cfg.scenario = eqe::sweep::scenario_from_string(scenario);
    if (resolution) cfg.resolution = *resolution;
    if (threads) cfg.threads = *threads;
    if (mode) {
        if (*mode == "exact") {
            cfg.mode = eqe::sweep::Mode::Exact;
        } else if (*mode == "emulated") {
            cfg.mode = eqe::sweep::Mode::Emulated;
        } else {
            throw std::invalid_argument("--mode expects exact|emulated");
        }
    }
    if (flags.phi_h) {
        cfg.phi_h = eqe::sweep::parse_angle(*flags.phi_h);
        if (scenario.empty() && config_path.empty()) cfg.scenario = eqe::sweep::Scenario::Custom;
    }
    if (flags.phi_v) {
        cfg.phi_v = eqe::sweep::parse_angle(*flags.phi_v);
        if (scenario.empty() && config_path.empty()) cfg.scenario = eqe::sweep::Scenario::Custom;
    }
    if (flags.phi) cfg.phi = eqe::sweep::parse_angle(*flags.phi);
    if (flags.shots) cfg.shots = *flags.shots;
    if (flags.seed) {
        cfg.seed = *flags.seed;
    } else if (cfg.seed == 0) {
        cfg.seed = seed_fallback();
    }
    if (flags.readout_error) cfg.noise = parse_readout_error(*flags.readout_error);
    if (flags.mitigate) cfg.mitigate = parse_on_off(*flags.mitigate, "--mitigate");
    if (flags.out) cfg.out_path = *flags.out;
    if (flags.format) {
        if (*flags.format != "csv" && *flags.format != "json") {
            throw std::invalid_argument("--format expects csv|json");
        }
        cfg.format = *flags.format;
    }
    if (cfg.mode == eqe::sweep::Mode::Emulated && cfg.shots == 0) {
        throw std::invalid_argument("emulated mode needs --shots > 0 (0 is the exact path)");
    }

    const auto rows = eqe::sweep::run_sweep(cfg);
    if (cfg.format == "json") {
        write_output(cfg.out_path, eqe::sweep::rows_to_json(rows).dump(2) + "\n");
    } else {
        std::stringstream ss;
        eqe::sweep::write_csv(ss, rows);
        write_output(cfg.out_path, ss.str());
    }
    std::cerr << "wrote " << rows.size() << " rows (" << eqe::sweep::to_string(cfg.scenario)
              << ", " << eqe::sweep::to_string(cfg.mode) << ")\n";
    return 0;
}

json triple_to_json(const eqe::CcrTriple& t) {
    return {{"P", t.predictability}, {"C", t.coherence}, {"S", t.entanglement}, {"sum", t.sum()}};
}

int run_tomo_command(const CommonFlags& flags) {
    const double phi_h = flags.phi_h ? eqe::sweep::parse_angle(*flags.phi_h) : 0.0;
    const double phi_v = flags.phi_v ? eqe::sweep::parse_angle(*flags.phi_v) : 0.0;
    const auto params = eqe::gates::VppbsParams::make(phi_h, phi_v);
    if (params.wrapped) std::cerr << "note: angles were wrapped into [0, 2*pi]\n";

    const std::uint64_t shots = flags.shots.value_or(8192);
    const std::uint64_t seed = flags.seed.value_or(seed_fallback());
    std::optional<eqe::tomo::ReadoutNoise> noise;
    if (flags.readout_error) noise = parse_readout_error(*flags.readout_error);
    const bool mitigate = flags.mitigate ? parse_on_off(*flags.mitigate, "--mitigate") : true;

    const eqe::tomo::TwoStepResult res = eqe::tomo::two_step_experiment(
        params, eqe::tomo::ShotPlan{shots, seed, {}}, noise ? &*noise : nullptr,
        eqe::tomo::TomographyOptions{mitigate, false});

    const eqe::CcrTriple exact_before = eqe::ccr_before_closed_form(params);
    json out{{"phi_h", params.phi_h},
             {"phi_v", params.phi_v},
             {"shots", shots},
             {"seed", seed},
             {"mitigated", res.mitigated},
             {"physicality_adjusted", res.physicality_adjusted},
             {"before", triple_to_json(res.before)},
             {"prob_psi_plus", res.prob_plus},
             {"prob_psi_minus", res.prob_minus},
             {"exact", json{{"before", triple_to_json(exact_before)}}}};
    out["after_plus"] = res.after_plus ? triple_to_json(*res.after_plus) : json(nullptr);
    out["after_minus"] = res.after_minus ? triple_to_json(*res.after_minus) : json(nullptr);
    try {
        out["exact"]["after_plus"] =
            triple_to_json(eqe::ccr_after_closed_form(params, eqe::BellOutcome::PsiPlus));
    } catch (const eqe::ZeroProbabilityOutcome&) {
        out["exact"]["after_plus"] = nullptr;
    }
    out["exact"]["prob_psi_plus"] = eqe::branch_probability(params, eqe::BellOutcome::PsiPlus);

    write_output(flags.out.value_or(""), out.dump(2) + "\n");
    return 0;
}

int run_probabilities_command(const CommonFlags& flags) {
    const double phi_h = flags.phi_h ? eqe::sweep::parse_angle(*flags.phi_h) : 0.0;
    const double phi_v = flags.phi_v ? eqe::sweep::parse_angle(*flags.phi_v) : 0.0;
    const double phi = flags.phi ? eqe::sweep::parse_angle(*flags.phi) : 0.0;
    const auto params = eqe::gates::VppbsParams::make(phi_h, phi_v);
    if (params.wrapped) std::cerr << "note: angles were wrapped into [0, 2*pi]\n";

    json outcomes = json::array();
    for (eqe::BellOutcome outcome : {eqe::BellOutcome::PhiPlus, eqe::BellOutcome::PhiMinus,
                                     eqe::BellOutcome::PsiPlus, eqe::BellOutcome::PsiMinus}) {
        json row{{"outcome", eqe::to_string(outcome)}};
        try {
            const auto det = eqe::output_probabilities(
                eqe::CircuitParams{params, phi, false, eqe::Stage::Psi4}, outcome);
            row["probability"] = det.outcome_probability;
            row["detector0"] = det.detector0;
            row["detector1"] = det.detector1;
        } catch (const eqe::ZeroProbabilityOutcome&) {
            row["probability"] = 0.0;
            row["detector0"] = nullptr;
            row["detector1"] = nullptr;
        }
        outcomes.push_back(std::move(row));
    }
    const json out{{"phi_h", params.phi_h}, {"phi_v", params.phi_v}, {"phi", phi},
                   {"outcomes", outcomes}};
    write_output(flags.out.value_or(""), out.dump(2) + "\n");
    return 0;
}

int run_scenario_command(const std::string& name, const CommonFlags& flags) {
    const json report = eqe::sweep::run_scenario_report(name);
    write_output(flags.out.value_or(""), report.dump(2) + "\n");
    return report.at("verified").get<bool>() ? 0 : 1;
}

int run_selftest_command(const std::string& format) {
    const auto checks = eqe::sweep::selftest();
    bool all_pass = true;
    if (format == "json") {
        json out = json::array();
        for (const auto& c : checks) {
            out.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"deviation", c.deviation},
                           {"detail", c.detail}});
            all_pass = all_pass && c.pass;
        }
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& c : checks) {
            std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
            all_pass = all_pass && c.pass;
        }
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entangled-quantum-eraser simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string config_path, scenario_name, report_name, selftest_format = "text";
    std::optional<int> resolution, threads;
    std::optional<std::string> mode;

    auto add_common = [&](CLI::App* cmd, bool with_phi = true) {
        cmd->add_option("--phi-h", flags.phi_h, "horizontal beam-splitter angle (radians or pi:x)");
        cmd->add_option("--phi-v", flags.phi_v, "vertical beam-splitter angle (radians or pi:x)");
        if (with_phi) cmd->add_option("--phi", flags.phi, "interferometer phase (radians or pi:x)");
        cmd->add_option("--shots", flags.shots, "shots per measurement basis");
        cmd->add_option("--seed", flags.seed, "RNG seed (falls back to EQE_SEED)");
        cmd->add_option("--readout-error", flags.readout_error,
                        "p01,p10 per qubit, or three ;-separated pairs");
        cmd->add_option("--mitigate", flags.mitigate, "readout-error mitigation: on|off");
        cmd->add_option("--out", flags.out, "output path (stdout when omitted)");
        cmd->add_option("--format", flags.format, "csv|json");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep and emit rows");
    sweep->add_option("--config", config_path, "JSON config file (flags win over it)");
    sweep->add_option("--scenario", scenario_name,
                      "grid2d|phiV_zero|phiH_eq_pi_plus_phiV|custom");
    sweep->add_option("--resolution", resolution, "grid resolution (>= 2)");
    sweep->add_option("--mode", mode, "exact|emulated");
    sweep->add_option("--threads", threads, "worker threads (1 = serial reference)");
    add_common(sweep);

    CLI::App* scenario = app.add_subcommand("scenario", "check a named special-case claim");
    scenario->add_option("name", report_name, "pbs-limit|conjugate-T|equal-T|anti-diagonal")
        ->required();
    scenario->add_option("--out", flags.out, "output path (stdout when omitted)");

    CLI::App* tomo = app.add_subcommand("tomo", "run the emulated two-step tomography pipeline");
    add_common(tomo, /*with_phi=*/false);

    CLI::App* probabilities =
        app.add_subcommand("probabilities", "detector statistics per Bell outcome");
    add_common(probabilities);

    CLI::App* selftest = app.add_subcommand("selftest", "run the property suite");
    selftest->add_option("--format", selftest_format, "text|json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            return run_sweep_command(config_path, scenario_name, resolution, threads, flags, mode);
        }
        if (scenario->parsed()) return run_scenario_command(report_name, flags);
        if (tomo->parsed()) return run_tomo_command(flags);
        if (probabilities->parsed()) return run_probabilities_command(flags);
        if (selftest->parsed()) return run_selftest_command(selftest_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
