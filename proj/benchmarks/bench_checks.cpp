// Timing floors that should hold on any reasonable machine. Prints the
// measurements and exits nonzero when a floor is missed.

#include <iostream>
#include <vector>

#include "nfsim/bench.hpp"
#include "nfsim/model.hpp"

using namespace nfsim;

int main() {
    const KernelSpec kernel = preset("ex1-case1-mu45-nodelay").kernel;
    const std::vector<std::size_t> sizes{16, 24, 32, 48};
    const auto rows = bench_apply(sizes, kernel, 0.6, 12, 21);
    write_bench_csv(std::cout, rows);

    double dense16 = 0, dense32 = 0, dense48 = 0, low48 = 0;
    for (const auto& r : rows) {
        if (r.form == "dense" && r.n_per_dim == 16) dense16 = r.median_seconds;
        if (r.form == "dense" && r.n_per_dim == 32) dense32 = r.median_seconds;
        if (r.form == "dense" && r.n_per_dim == 48) dense48 = r.median_seconds;
        if (r.form == "low-rank" && r.n_per_dim == 48) low48 = r.median_seconds;
    }
    int failed = 0;
    const double speedup = dense48 / low48;
    std::cout << "low-rank speedup at N=48, m=12: " << speedup << (speedup > 2.0 ? "" : "  (below 2)") << '\n';
    failed += !(speedup > 2.0);

    // Step times also carry the fixed-point iteration count, which depends on
    // the resolution; the scaling floor is checked per iteration.
    Scenario small = preset("ex2-nodelay"), big = small;
    small.n_per_dim = 16;
    big.n_per_dim = 32;
    const StepTiming s16 = bench_step(small, 9), s32 = bench_step(big, 9);
    const StepTiming s48 = bench_step(preset("ex2-nodelay"), 5);
    std::cout << "dense hexagonal step: N=16 " << s16.median_seconds << " s (" << s16.mean_iterations << " it), N=32 "
              << s32.median_seconds << " s (" << s32.mean_iterations << " it), N=48 " << s48.median_seconds << " s\n";
    const double raw = s32.median_seconds / s16.median_seconds;
    const double per_iteration =
        (s32.median_seconds / s32.mean_iterations) / (s16.median_seconds / s16.mean_iterations);
    std::cout << "N=32 / N=16 step ratio " << raw << ", per iteration " << per_iteration << ", apply "
              << dense32 / dense16 << '\n';
    failed += !(per_iteration >= 8.0 && per_iteration <= 24.0);
    failed += !(s48.median_seconds < 20.0);
    std::cout << (failed ? "FAIL" : "PASS") << '\n';
    return failed ? 1 : 0;
}
