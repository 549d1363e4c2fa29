#include <algorithm>
#include <chrono>
#include <memory>
#include <ostream>

#include "nfsim/bench.hpp"
#include "nfsim/error.hpp"
#include "nfsim/operator.hpp"
#include "nfsim/output.hpp"

namespace nfsim {

namespace {

template <class F>
double median_seconds(std::size_t reps, F&& f) {
    std::vector<double> t;
    t.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
    return t[t.size() / 2];
}

}  // namespace

std::vector<ApplyTiming> bench_apply(std::span<const std::size_t> sizes, const KernelSpec& kernel, double half_width,
                                     std::size_t rank, std::size_t reps) {
    if (reps == 0) fail(ErrorKind::InvalidArgument, "bench_apply: reps must be positive");
    std::vector<ApplyTiming> rows;
    for (std::size_t n : sizes) {
        auto grid = std::make_shared<const Grid>(Domain{half_width}, n);
        const std::vector<double> s = default_probe(*grid);
        std::vector<double> out(grid->size());

        const ConnectivityOperator dense = assemble_dense(grid, kernel);
        rows.push_back({n, "dense", 0, median_seconds(reps, [&] { dense.apply(s, out); })});
        if (rank >= 2 && rank <= n) {
            const ConnectivityOperator lr = assemble_low_rank(grid, kernel, rank);
            rows.push_back({n, "low-rank", rank, median_seconds(reps, [&] { lr.apply(s, out); })});
        }
    }
    return rows;
}

StepTiming bench_step(const Scenario& scenario, std::size_t reps) {
    if (reps == 0) fail(ErrorKind::InvalidArgument, "bench_step: reps must be positive");
    const DiscreteProblem problem = discretize(scenario);
    SolverOptions opts;
    opts.continue_on_no_convergence = true;
    ImplicitStepper stepper(problem, opts);
    long iterations = 0;
    const double t = median_seconds(reps, [&] { iterations += stepper.step().iterations; });
    return {t, static_cast<double>(iterations) / static_cast<double>(reps)};
}

void write_bench_csv(std::ostream& out, std::span<const ApplyTiming> rows) {
    out << "n_per_dim,form,rank,median_seconds\n";
    for (const auto& r : rows)
        out << r.n_per_dim << ',' << r.form << ',' << r.rank << ',' << format_double(r.median_seconds) << '\n';
}

}  // namespace nfsim
