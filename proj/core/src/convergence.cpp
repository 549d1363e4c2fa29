#include <algorithm>
#include <cmath>

#include "nfsim/bench.hpp"
#include "nfsim/error.hpp"

namespace nfsim {

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

ConvergenceResult summarize(std::vector<double> h, std::vector<double> errors) {
    ConvergenceResult r;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) r.ratios.push_back(errors[k] / errors[k + 1]);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double x = std::log(h[k]);
        const double y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    r.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.h = std::move(h);
    r.errors = std::move(errors);
    return r;
}

std::vector<double> final_field(const DiscreteProblem& problem, TimeScheme scheme) {
    IntegrateOptions opts;
    opts.solver.scheme = scheme;
    // Tight inner tolerance so iteration error stays below discretisation error.
    opts.solver.tolerance = 1e-13;
    opts.solver.max_iterations = 200;
    return integrate(problem, opts).final_state().values;
}

void check_h_list(std::span<const double> h_list) {
    if (h_list.size() < 2) fail(ErrorKind::InvalidArgument, "convergence study needs at least two step sizes");
}

}  // namespace

ConvergenceResult convergence_study(const Scenario& scenario, std::span<const double> h_list, TimeScheme scheme) {
    check_h_list(h_list);
    Scenario sc = scenario;
    sc.snapshot_times.clear();
    sc.activity_threshold.reset();
    const DiscreteProblem base = discretize(sc);
    const double h_min = *std::min_element(h_list.begin(), h_list.end());
    const std::vector<double> reference = integrate_rk4(base, h_min / 64.0, sc.t_final).values;

    std::vector<double> errors;
    for (double h : h_list) errors.push_back(sup_diff(final_field(with_time_step(base, h), scheme), reference));
    return summarize({h_list.begin(), h_list.end()}, std::move(errors));
}

ConvergenceResult scalar_decay_study(std::span<const double> h_list, double t_final, TimeScheme scheme) {
    check_h_list(h_list);
    Scenario sc;
    sc.name = "scalar-decay";
    sc.kernel = ConstantKernel{0.0};
    sc.n_per_dim = 2;
    sc.initial_value = 1.0;
    sc.t_final = t_final;
    sc.h_t = h_list[0];
    const DiscreteProblem base = discretize(sc);
    const double exact = std::exp(-t_final);

    std::vector<double> errors;
    for (double h : h_list) {
        const auto v = final_field(with_time_step(base, h), scheme);
        errors.push_back(std::abs(v[0] - exact));
    }
    return summarize({h_list.begin(), h_list.end()}, std::move(errors));
}

}  // namespace nfsim
