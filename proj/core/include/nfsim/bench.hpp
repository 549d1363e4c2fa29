#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nfsim/model.hpp"
#include "nfsim/solver.hpp"

namespace nfsim {

struct ConvergenceResult {
    std::vector<double> h;
    std::vector<double> errors;  // sup-norm error at T per step size
    std::vector<double> ratios;  // errors[k] / errors[k + 1]
    double order = 0.0;          // least-squares slope of log error vs log h
};

/// Implicit runs at each h against an RK4 reference at min(h) / 64.
ConvergenceResult convergence_study(const Scenario& scenario, std::span<const double> h_list,
                                    TimeScheme scheme = TimeScheme::Trapezoidal);

/// V' = -V, V(0) = 1 through the full solver path (zero kernel and input),
/// against exp(-T).
ConvergenceResult scalar_decay_study(std::span<const double> h_list, double t_final = 2.0,
                                     TimeScheme scheme = TimeScheme::Trapezoidal);

struct ApplyTiming {
    std::size_t n_per_dim = 0;
    std::string form;  // dense or low-rank
    std::size_t rank = 0;
    double median_seconds = 0.0;
};

/// Median wall time of one operator apply per grid size, dense and (when
/// rank >= 2) low-rank at the given rank.
std::vector<ApplyTiming> bench_apply(std::span<const std::size_t> sizes, const KernelSpec& kernel, double half_width,
                                     std::size_t rank, std::size_t reps);

struct StepTiming {
    double median_seconds = 0.0;
    double mean_iterations = 0.0;  // fixed-point iterations per step
};

/// Median wall time of one implicit step over the first reps steps.
StepTiming bench_step(const Scenario& scenario, std::size_t reps);

void write_bench_csv(std::ostream& out, std::span<const ApplyTiming> rows);

}  // namespace nfsim
