// Serial reference vs OpenMP Monte Carlo on the default system-identification
// scenario. Usage: ase_bench [runs] [horizon] [repeats]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ase/harness.hpp"

namespace {

std::size_t arg_or(int argc, char** argv, int i, std::size_t fallback) {
    return argc > i ? static_cast<std::size_t>(std::stoul(argv[i])) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    using clock = std::chrono::steady_clock;
    ase::SysIdScenario sc = ase::default_sysid_scenario(1);
    sc.mc_runs = arg_or(argc, argv, 1, 32);
    sc.horizon = arg_or(argc, argv, 2, 5000);
    const std::size_t repeats = arg_or(argc, argv, 3, 3);

    std::vector<ase::AlgorithmSpec> algos;
    for (auto kind : {ase::FilterKind::kIwf, ase::FilterKind::kIwfAse, ase::FilterKind::kDcdAse,
                      ase::FilterKind::kRmcc}) {
        algos.push_back({std::string(ase::to_string(kind)), kind, ase::default_filter_config(10)});
    }
    ase::resolve_kernel_widths(algos, sc.background_sd());

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("runs=%zu horizon=%zu threads=%d\n", sc.mc_runs, sc.horizon, threads);

    double best[2] = {1e300, 1e300};
    std::vector<ase::RunRecord> out[2];
    const ase::Execution modes[2] = {ase::Execution::kSerial, ase::Execution::kParallel};
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        for (int m = 0; m < 2; ++m) {
            const auto t0 = clock::now();
            out[m] = ase::run_sysid(sc, algos, modes[m]);
            const double s = std::chrono::duration<double>(clock::now() - t0).count();
            best[m] = s < best[m] ? s : best[m];
        }
    }
    bool identical = true;
    for (std::size_t a = 0; a < algos.size(); ++a) {
        identical = identical && out[0][a].nmsd_linear == out[1][a].nmsd_linear &&
                    out[0][a].mse == out[1][a].mse;
    }
    std::printf("serial   %.3f s\nparallel %.3f s\nspeedup  %.2fx\nidentical %s\n", best[0],
                best[1], best[0] / best[1], identical ? "yes" : "NO");
    return identical ? EXIT_SUCCESS : EXIT_FAILURE;
}
