// Compares the serial reference sweep driver against the OpenMP one on the
// same workloads and verifies the rows agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "eqe/sweep.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_ms(const eqe::sweep::SweepConfig& cfg, std::vector<eqe::sweep::SweepRow>& rows) {
    const auto t0 = Clock::now();
    rows = eqe::sweep::run_sweep(cfg);
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double max_row_difference(const std::vector<eqe::sweep::SweepRow>& a,
                          const std::vector<eqe::sweep::SweepRow>& b) {
    auto diff_opt = [](const std::optional<double>& x, const std::optional<double>& y) {
        if (x.has_value() != y.has_value()) return 1.0;
        return x ? std::abs(*x - *y) : 0.0;
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i].p_before - b[i].p_before));
        worst = std::max(worst, std::abs(a[i].c_before - b[i].c_before));
        worst = std::max(worst, std::abs(a[i].s_before - b[i].s_before));
        worst = std::max(worst, std::abs(a[i].prob_psi_plus - b[i].prob_psi_plus));
        worst = std::max(worst, diff_opt(a[i].c_after_plus, b[i].c_after_plus));
        worst = std::max(worst, diff_opt(a[i].p_after_plus, b[i].p_after_plus));
    }
    return worst;
}

void bench(const char* label, eqe::sweep::SweepConfig cfg) {
    std::vector<eqe::sweep::SweepRow> serial_rows, parallel_rows;
    cfg.threads = 1;
    const double serial_ms = run_ms(cfg, serial_rows);
    cfg.threads = 0;
    const double parallel_ms = run_ms(cfg, parallel_rows);
    const double diff = max_row_difference(serial_rows, parallel_rows);
    std::printf("%-28s  %7zu points  serial %9.1f ms  parallel %9.1f ms  speedup %5.2fx  max|diff| %g\n",
                label, serial_rows.size(), serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
    int exact_resolution = 257;
    int emulated_points = 17;
    if (argc > 1) exact_resolution = std::atoi(argv[1]);
    if (argc > 2) emulated_points = std::atoi(argv[2]);

    {
        eqe::sweep::SweepConfig cfg;
        cfg.scenario = eqe::sweep::Scenario::Grid2d;
        cfg.resolution = exact_resolution;
        bench("exact grid2d", cfg);
    }
    {
        eqe::sweep::SweepConfig cfg;
        cfg.scenario = eqe::sweep::Scenario::PhiVZero;
        cfg.resolution = emulated_points;
        cfg.mode = eqe::sweep::Mode::Emulated;
        cfg.shots = 8192;
        cfg.seed = 1;
        cfg.noise = eqe::tomo::ReadoutNoise::uniform(3, 0.05, 0.03);
        bench("emulated phiV_zero", cfg);
    }
    return 0;
}
