#include "eqe/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

#ifdef EQE_HAVE_OPENMP
#include <omp.h>
#endif

namespace eqe::sweep {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_optional(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

struct GridPoint {
    double phi_h, phi_v, phi;
};

std::vector<GridPoint> build_grid(const SweepConfig& cfg) {
    if (cfg.scenario == Scenario::Custom) {
        if (!cfg.custom_points.empty()) {
            std::vector<GridPoint> pts;
            pts.reserve(cfg.custom_points.size());
            for (const auto& p : cfg.custom_points) pts.push_back({p[0], p[1], p[2]});
            return pts;
        }
        return {GridPoint{cfg.phi_h, cfg.phi_v, cfg.phi}};
    }
    if (cfg.resolution < 2) throw std::invalid_argument("config field 'resolution': must be >= 2");
    const int res = cfg.resolution;
    auto tick = [&](int i) { return gates::kTwoPi * i / (res - 1); };
    std::vector<GridPoint> pts;
    switch (cfg.scenario) {
        case Scenario::Grid2d:
            pts.reserve(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
            for (int i = 0; i < res; ++i) {
                for (int j = 0; j < res; ++j) pts.push_back({tick(i), tick(j), cfg.phi});
            }
            break;
        case Scenario::PhiVZero:
            pts.reserve(static_cast<std::size_t>(res));
            for (int i = 0; i < res; ++i) pts.push_back({tick(i), 0.0, cfg.phi});
            break;
        case Scenario::PhiHEqPiPlusPhiV:
            pts.reserve(static_cast<std::size_t>(res));
            for (int i = 0; i < res; ++i) {
                pts.push_back({gates::wrap_angle(kPi + tick(i)), tick(i), cfg.phi});
            }
            break;
        case Scenario::Custom:
            break;
    }
    return pts;
}

SweepRow evaluate_exact(const SweepConfig& cfg, const GridPoint& pt) {
    const ErasureRecord rec = erase(gates::VppbsParams::make(pt.phi_h, pt.phi_v), pt.phi);
    SweepRow row;
    row.phi_h = rec.params.phi_h;
    row.phi_v = rec.params.phi_v;
    row.phi = rec.phi;
    row.prob_psi_plus = rec.psi_plus.probability;
    row.prob_psi_minus = rec.psi_minus.probability;
    row.p_before = rec.before.predictability;
    row.c_before = rec.before.coherence;
    row.s_before = rec.before.entanglement;
    row.ccr_sum = rec.before.sum();
    if (rec.psi_plus.after) {
        row.p_after_plus = rec.psi_plus.after->predictability;
        row.c_after_plus = rec.psi_plus.after->coherence;
        row.delta_c_plus = rec.psi_plus.delta_coherence;
    }
    if (rec.psi_minus.after) {
        row.p_after_minus = rec.psi_minus.after->predictability;
        row.c_after_minus = rec.psi_minus.after->coherence;
        row.delta_c_minus = rec.psi_minus.delta_coherence;
    }
    row.mode = "exact";
    row.seed = cfg.seed;
    return row;
}

SweepRow evaluate_emulated(const SweepConfig& cfg, const GridPoint& pt, std::size_t index) {
    const gates::VppbsParams params = gates::VppbsParams::make(pt.phi_h, pt.phi_v);
    const tomo::ShotPlan plan{cfg.shots, tomo::derive_subseed(cfg.seed, index), {}};
    const tomo::ReadoutNoise* noise = cfg.noise ? &*cfg.noise : nullptr;
    const tomo::TwoStepResult res =
        tomo::two_step_experiment(params, plan, noise, tomo::TomographyOptions{cfg.mitigate, false});

    SweepRow row;
    row.phi_h = params.phi_h;
    row.phi_v = params.phi_v;
    row.phi = gates::wrap_angle(pt.phi);
    row.prob_psi_plus = res.prob_plus;
    row.prob_psi_minus = res.prob_minus;
    row.p_before = res.before.predictability;
    row.c_before = res.before.coherence;
    row.s_before = res.before.entanglement;
    row.ccr_sum = res.before.sum();
    if (res.after_plus) {
        row.p_after_plus = res.after_plus->predictability;
        row.c_after_plus = res.after_plus->coherence;
        row.delta_c_plus = res.after_plus->coherence - res.before.coherence;
    }
    if (res.after_minus) {
        row.p_after_minus = res.after_minus->predictability;
        row.c_after_minus = res.after_minus->coherence;
        row.delta_c_minus = res.after_minus->coherence - res.before.coherence;
    }
    row.mode = "emulated";
    row.seed = cfg.seed;
    return row;
}

double angle_from_json(const nlohmann::json& v, const std::string& field) {
    if (v.is_string()) return parse_angle(v.get<std::string>());
    if (v.is_number()) return v.get<double>();
    throw std::invalid_argument("config field '" + field + "': expected a number or \"pi:x\"");
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
    if (name == "grid2d") return Scenario::Grid2d;
    if (name == "phiV_zero") return Scenario::PhiVZero;
    if (name == "phiH_eq_pi_plus_phiV") return Scenario::PhiHEqPiPlusPhiV;
    if (name == "custom") return Scenario::Custom;
    throw std::invalid_argument(
        "unknown scenario '" + name +
        "' (expected grid2d, phiV_zero, phiH_eq_pi_plus_phiV, or custom)");
}

const char* to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::Grid2d: return "grid2d";
        case Scenario::PhiVZero: return "phiV_zero";
        case Scenario::PhiHEqPiPlusPhiV: return "phiH_eq_pi_plus_phiV";
        case Scenario::Custom: return "custom";
    }
    return "?";
}

const char* to_string(Mode mode) { return mode == Mode::Exact ? "exact" : "emulated"; }

double parse_angle(const std::string& text) {
    std::string body = text;
    double factor = 1.0;
    if (text.rfind("pi:", 0) == 0) {
        body = text.substr(3);
        factor = kPi;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(body, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse angle '" + text + "'");
    }
    if (used != body.size()) throw std::invalid_argument("cannot parse angle '" + text + "'");
    return factor * value;
}

SweepConfig config_from_json(const nlohmann::json& j) {
    SweepConfig cfg;
    if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "scenario") {
            cfg.scenario = scenario_from_string(value.get<std::string>());
        } else if (key == "resolution") {
            if (!value.is_number_integer() || value.get<int>() < 2) {
                throw std::invalid_argument("config field 'resolution': must be an integer >= 2");
            }
            cfg.resolution = value.get<int>();
        } else if (key == "phi") {
            cfg.phi = angle_from_json(value, key);
        } else if (key == "phi_h") {
            cfg.phi_h = angle_from_json(value, key);
        } else if (key == "phi_v") {
            cfg.phi_v = angle_from_json(value, key);
        } else if (key == "points") {
            if (!value.is_array()) throw std::invalid_argument("config field 'points': expected an array");
            for (const auto& p : value) {
                if (!p.is_array() || (p.size() != 2 && p.size() != 3)) {
                    throw std::invalid_argument(
                        "config field 'points': each point is [phi_h, phi_v] or [phi_h, phi_v, phi]");
                }
                cfg.custom_points.push_back({angle_from_json(p[0], "points[].phi_h"),
                                             angle_from_json(p[1], "points[].phi_v"),
                                             p.size() == 3 ? angle_from_json(p[2], "points[].phi") : 0.0});
            }
        } else if (key == "mode") {
            const std::string m = value.get<std::string>();
            if (m == "exact") {
                cfg.mode = Mode::Exact;
            } else if (m == "emulated") {
                cfg.mode = Mode::Emulated;
            } else {
                throw std::invalid_argument("config field 'mode': expected \"exact\" or \"emulated\"");
            }
        } else if (key == "shots") {
            cfg.shots = value.get<std::uint64_t>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "readout_error") {
            if (!value.is_array() || value.empty()) {
                throw std::invalid_argument("config field 'readout_error': expected [p01, p10] or per-qubit pairs");
            }
            if (value[0].is_array()) {
                if (value.size() != 3) {
                    throw std::invalid_argument("config field 'readout_error': need 3 per-qubit pairs");
                }
                std::vector<Eigen::Matrix2d> mats;
                for (const auto& pair : value) {
                    const double p01 = pair.at(0).get<double>();
                    const double p10 = pair.at(1).get<double>();
                    Eigen::Matrix2d m;
                    m << 1.0 - p01, p10, p01, 1.0 - p10;
                    mats.push_back(m);
                }
                cfg.noise = tomo::ReadoutNoise(std::move(mats));
            } else {
                if (value.size() != 2) {
                    throw std::invalid_argument("config field 'readout_error': expected [p01, p10]");
                }
                cfg.noise = tomo::ReadoutNoise::uniform(3, value[0].get<double>(), value[1].get<double>());
            }
        } else if (key == "mitigate") {
            cfg.mitigate = value.get<bool>();
        } else if (key == "threads") {
            cfg.threads = value.get<int>();
        } else if (key == "out") {
            cfg.out_path = value.get<std::string>();
        } else if (key == "format") {
            const std::string f = value.get<std::string>();
            if (f != "csv" && f != "json") {
                throw std::invalid_argument("config field 'format': expected \"csv\" or \"json\"");
            }
            cfg.format = f;
        } else {
            throw std::invalid_argument("unknown config field '" + key + "'");
        }
    }
    return cfg;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    const std::vector<GridPoint> points = build_grid(cfg);
    std::vector<SweepRow> rows(points.size());
    std::exception_ptr failure;

    auto eval = [&](std::size_t i) {
        rows[i] = cfg.mode == Mode::Exact ? evaluate_exact(cfg, points[i])
                                          : evaluate_emulated(cfg, points[i], i);
    };

    if (cfg.threads == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) eval(i);
        return rows;
    }
#ifdef EQE_HAVE_OPENMP
    if (cfg.threads > 1) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(points.size()); ++i) {
        try {
            eval(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
#else
    for (std::size_t i = 0; i < points.size(); ++i) eval(i);
#endif
    return rows;
}

const std::string& csv_header() {
    static const std::string header =
        "phi_H,phi_V,phi,prob_psi_plus,prob_psi_minus,P_before,C_before,S_before,ccr_sum,"
        "P_after_plus,C_after_plus,P_after_minus,C_after_minus,delta_C_plus,delta_C_minus,"
        "mode,seed";
    return header;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << csv_header() << '\n';
    for (const auto& r : rows) {
        os << fmt_double(r.phi_h) << ',' << fmt_double(r.phi_v) << ',' << fmt_double(r.phi) << ','
           << fmt_double(r.prob_psi_plus) << ',' << fmt_double(r.prob_psi_minus) << ','
           << fmt_double(r.p_before) << ',' << fmt_double(r.c_before) << ','
           << fmt_double(r.s_before) << ',' << fmt_double(r.ccr_sum) << ','
           << fmt_optional(r.p_after_plus) << ',' << fmt_optional(r.c_after_plus) << ','
           << fmt_optional(r.p_after_minus) << ',' << fmt_optional(r.c_after_minus) << ','
           << fmt_optional(r.delta_c_plus) << ',' << fmt_optional(r.delta_c_minus) << ','
           << r.mode << ',' << r.seed << '\n';
    }
}

std::vector<SweepRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty CSV input");
    if (line != csv_header()) throw std::invalid_argument("unexpected CSV header: " + line);

    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 17) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected 17 fields, got " +
                                        std::to_string(fields.size()));
        }
        auto req = [&](std::size_t i) {
            try {
                return std::stod(fields[i]);
            } catch (const std::exception&) {
                throw std::invalid_argument("CSV line " + std::to_string(line_no) + ", field " +
                                            std::to_string(i + 1) + ": cannot parse '" + fields[i] + "'");
            }
        };
        auto opt = [&](std::size_t i) -> std::optional<double> {
            if (fields[i].empty()) return std::nullopt;
            return req(i);
        };
        SweepRow r;
        r.phi_h = req(0);
        r.phi_v = req(1);
        r.phi = req(2);
        r.prob_psi_plus = req(3);
        r.prob_psi_minus = req(4);
        r.p_before = req(5);
        r.c_before = req(6);
        r.s_before = req(7);
        r.ccr_sum = req(8);
        r.p_after_plus = opt(9);
        r.c_after_plus = opt(10);
        r.p_after_minus = opt(11);
        r.c_after_minus = opt(12);
        r.delta_c_plus = opt(13);
        r.delta_c_minus = opt(14);
        r.mode = fields[15];
        r.seed = std::stoull(fields[16]);
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json rows_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    for (const auto& r : rows) {
        out.push_back({{"phi_H", r.phi_h},
                       {"phi_V", r.phi_v},
                       {"phi", r.phi},
                       {"prob_psi_plus", r.prob_psi_plus},
                       {"prob_psi_minus", r.prob_psi_minus},
                       {"P_before", r.p_before},
                       {"C_before", r.c_before},
                       {"S_before", r.s_before},
                       {"ccr_sum", r.ccr_sum},
                       {"P_after_plus", opt(r.p_after_plus)},
                       {"C_after_plus", opt(r.c_after_plus)},
                       {"P_after_minus", opt(r.p_after_minus)},
                       {"C_after_minus", opt(r.c_after_minus)},
                       {"delta_C_plus", opt(r.delta_c_plus)},
                       {"delta_C_minus", opt(r.delta_c_minus)},
                       {"mode", r.mode},
                       {"seed", r.seed}});
    }
    return out;
}

namespace {

nlohmann::json triple_json(const CcrTriple& t) {
    return {{"P", t.predictability}, {"C", t.coherence}, {"S", t.entanglement}, {"sum", t.sum()}};
}

std::vector<double> report_angles() {
    std::vector<double> out;
    for (int k = 1; k <= 9; ++k) out.push_back(gates::kTwoPi * k / 10.0);
    return out;
}

nlohmann::json point_json(const ErasureRecord& rec) {
    nlohmann::json p{{"phi_h", rec.params.phi_h},
                     {"phi_v", rec.params.phi_v},
                     {"prob_psi_plus", rec.psi_plus.probability},
                     {"prob_psi_minus", rec.psi_minus.probability},
                     {"before", triple_json(rec.before)}};
    p["after_plus"] = rec.psi_plus.after ? triple_json(*rec.psi_plus.after) : nlohmann::json(nullptr);
    p["after_minus"] =
        rec.psi_minus.after ? triple_json(*rec.psi_minus.after) : nlohmann::json(nullptr);
    return p;
}

}  // namespace

std::vector<std::string> scenario_report_names() {
    return {"pbs-limit", "conjugate-T", "equal-T", "anti-diagonal"};
}

nlohmann::json run_scenario_report(const std::string& name) {
    nlohmann::json report{{"scenario", name}};
    nlohmann::json points = nlohmann::json::array();
    double dev = 0.0;
    auto track = [&](double d) { dev = std::max(dev, std::abs(d)); };

    if (name == "pbs-limit") {
        report["claim"] =
            "entanglement is fully converted into path coherence: C_after = 0.5 on both branches";
        const ErasureRecord rec = erase(gates::VppbsParams::make(0.0, kPi));
        track(rec.before.predictability);
        track(rec.before.coherence);
        track(rec.before.entanglement - 0.5);
        track(rec.psi_plus.probability - 0.5);
        track(rec.psi_minus.probability - 0.5);
        for (const auto* branch : {&rec.psi_plus, &rec.psi_minus}) {
            track(branch->after->predictability);
            track(branch->after->coherence - 0.5);
        }
        points.push_back(point_json(rec));
    } else if (name == "conjugate-T") {
        report["claim"] = "before/after triples are unchanged on every defined branch";
        for (double phi_v : report_angles()) {
            const ErasureRecord rec = erase(gates::VppbsParams::make(gates::kTwoPi - phi_v, phi_v));
            for (const auto* branch : {&rec.psi_plus, &rec.psi_minus}) {
                if (!branch->after) continue;
                track(branch->after->predictability - rec.before.predictability);
                track(branch->after->coherence - rec.before.coherence);
                track(rec.before.entanglement);
            }
            points.push_back(point_json(rec));
        }
    } else if (name == "equal-T") {
        report["claim"] = "entanglement is converted into predictability: P_after = 0.5, C_after = 0";
        for (double phi : report_angles()) {
            const ErasureRecord rec = erase(gates::VppbsParams::make(phi, phi));
            for (const auto* branch : {&rec.psi_plus, &rec.psi_minus}) {
                if (!branch->after) continue;
                track(branch->after->predictability - 0.5);
                track(branch->after->coherence);
            }
            points.push_back(point_json(rec));
        }
    } else if (name == "anti-diagonal") {
        report["claim"] =
            "P_before = 0 and all entanglement is converted into path coherence: C_after = 0.5";
        for (double phi_v : report_angles()) {
            const ErasureRecord rec = erase(gates::VppbsParams::make(kPi + phi_v, phi_v));
            track(rec.before.predictability);
            for (const auto* branch : {&rec.psi_plus, &rec.psi_minus}) {
                if (!branch->after) continue;
                track(branch->after->coherence - 0.5);
                track(branch->after->predictability);
            }
            points.push_back(point_json(rec));
        }
    } else {
        throw std::invalid_argument("unknown scenario report '" + name +
                                    "' (known: pbs-limit, conjugate-T, equal-T, anti-diagonal)");
    }

    report["points"] = std::move(points);
    report["max_deviation"] = dev;
    report["verified"] = dev < 1e-10;
    return report;
}

std::vector<CheckResult> selftest() {
    std::vector<CheckResult> results;
    auto add = [&](const std::string& name, double deviation, double tol, const std::string& detail) {
        results.push_back(CheckResult{name, deviation <= tol, deviation,
                                      detail + " (max deviation " + fmt_double(deviation) +
                                          ", tolerance " + fmt_double(tol) + ")"});
    };

    // Unitarity of every catalog gate across a parameter grid.
    {
        double dev = 0.0;
        for (int i = 0; i <= 4; ++i) {
            for (int j = 0; j <= 4; ++j) {
                const auto params =
                    gates::VppbsParams::make(gates::kTwoPi * i / 4.0, gates::kTwoPi * j / 4.0);
                for (double phi : {0.0, kPi / 3.0, kPi}) {
                    for (const auto& gate : gates::catalog(params, phi)) {
                        const Eigen::Index d = gate.matrix().rows();
                        dev = std::max(dev, (gate.matrix().adjoint() * gate.matrix() -
                                             CMatrix::Identity(d, d))
                                                .cwiseAbs()
                                                .maxCoeff());
                    }
                }
            }
        }
        add("catalog-unitarity", dev, 1e-10, "U†U = I for every catalog gate");
    }

    // |T|^2 + |R|^2 = 1 on a 33-point angle grid.
    {
        double dev = 0.0;
        for (int i = 0; i < 33; ++i) {
            const auto c = gates::coefficients(gates::kTwoPi * i / 32.0);
            dev = std::max(dev, std::abs(std::norm(c.t) + std::norm(c.r) - 1.0));
        }
        add("coefficient-normalization", dev, 1e-12, "|T|^2 + |R|^2 = 1");
    }

    // Bell-outcome completeness, empty Phi sectors, and post-measurement purity.
    {
        double dev_sum = 0.0, dev_phi = 0.0, dev_purity = 0.0;
        for (int i = 0; i < 17; ++i) {
            for (int j = 0; j < 17; ++j) {
                const auto params =
                    gates::VppbsParams::make(gates::kTwoPi * i / 16.0, gates::kTwoPi * j / 16.0);
                const PipelineState ps = run_to_stage(CircuitParams{params, 0.0, false, Stage::Psi2});
                double total = 0.0;
                for (BellOutcome outcome : {BellOutcome::PhiPlus, BellOutcome::PhiMinus,
                                            BellOutcome::PsiPlus, BellOutcome::PsiMinus}) {
                    const double p =
                        conditional_amplitudes(ps.state, gates::bell_state(outcome), {0, 1})
                            .squaredNorm();
                    total += p;
                    if (outcome == BellOutcome::PhiPlus || outcome == BellOutcome::PhiMinus) {
                        dev_phi = std::max(dev_phi, p);
                    }
                }
                dev_sum = std::max(dev_sum, std::abs(total - 1.0));
                const ErasureRecord rec = erase(params);
                for (const auto* branch : {&rec.psi_plus, &rec.psi_minus}) {
                    if (branch->after) {
                        dev_purity = std::max(dev_purity, std::abs(branch->after->entanglement));
                    }
                }
            }
        }
        add("bell-outcome-completeness", dev_sum, 1e-12, "Bell outcome probabilities sum to 1");
        add("phi-sector-empty", dev_phi, 1e-12, "Phi branches carry no probability");
        add("post-bbm-purity", dev_purity, 1e-10, "post-selected path states are pure (S_ln = 0)");
    }

    // Closed-form VPPBS matrix equals its gate-level decomposition.
    {
        double dev = 0.0;
        for (int i = 0; i < 17; ++i) {
            for (int j = 0; j < 17; ++j) {
                const auto params =
                    gates::VppbsParams::make(gates::kTwoPi * i / 16.0, gates::kTwoPi * j / 16.0);
                dev = std::max(dev, (gates::vppbs(params).matrix() -
                                     gates::vppbs_decomposed(params).matrix())
                                        .cwiseAbs()
                                        .maxCoeff());
            }
        }
        add("vppbs-decomposition", dev, 1e-12, "closed form matches BS/mirror/phase assembly");
    }

    // Limit and anti-diagonal coefficient relations.
    {
        double dev = 0.0;
        const auto pbs = gates::VppbsParams::make(0.0, kPi);
        dev = std::max(dev, std::abs(std::abs(pbs.t_h) - 1.0));
        dev = std::max(dev, std::abs(pbs.t_v));
        for (int k = 0; k < 17; ++k) {
            const double phi_v = gates::kTwoPi * k / 16.0;
            const auto p = gates::VppbsParams::make(kPi + phi_v, phi_v);
            dev = std::max(dev, std::abs(p.t_h + p.r_v));
            dev = std::max(dev, std::abs(p.r_h + p.t_v));
        }
        add("special-angle-relations", dev, 1e-12,
            "PBS limit and T_H = -R_V / R_H = -T_V on the anti-diagonal");
    }

    return results;
}

}  // namespace eqe::sweep
