#include "nfsim/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "nfsim/analysis.hpp"
#include "nfsim/error.hpp"
#include "nfsim/parallel.hpp"

namespace nfsim {

namespace {

std::vector<double> fire(const FiringSpec& spec, std::span<const double> v) {
    std::vector<double> s(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) s[j] = firing_value(spec, v[j]);
    return s;
}

std::string time_label(double t) {
    std::ostringstream os;
    os.precision(10);
    os << t;
    return os.str();
}

void check_divergence(std::span<const double> v, double bound, double t) {
    for (double x : v) {
        if (!std::isfinite(x) || std::abs(x) > bound) {
            fail(ErrorKind::Divergence, "field left the bound " + time_label(bound) + " at t = " + time_label(t));
        }
    }
}

// Current field at time t: the head when it sits at t, otherwise the history.
std::vector<double> field_at(const HistoryBuffer& history, double t, const HistoryHead* head) {
    if (head && std::abs(head->t - t) <= 1e-12 * std::max(1.0, std::abs(t)))
        return {head->values.begin(), head->values.end()};
    std::vector<double> v(history.field_size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = sample_at(history, j, t, head);
    return v;
}

// Anderson mixing of the last `depth` fixed-point iterates. The combination
// coefficients are global scalars, so symmetric iterates stay symmetric.
class AndersonMixer {
public:
    AndersonMixer(std::size_t depth, std::size_t n) : depth_(depth), f_prev_(n), phi_prev_(n) {}

    // g <- next iterate, given phi = map(g).
    void next(std::vector<double>& g, const std::vector<double>& phi) {
        const std::size_t n = g.size();
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = phi[i] - g[i];
        if (depth_ > 0 && has_prev_) {
            std::vector<double> df(n), dg(n);
            for (std::size_t i = 0; i < n; ++i) {
                df[i] = f[i] - f_prev_[i];
                dg[i] = phi[i] - phi_prev_[i];
            }
            d_f_.push_back(std::move(df));
            d_g_.push_back(std::move(dg));
            if (d_f_.size() > depth_) {
                d_f_.erase(d_f_.begin());
                d_g_.erase(d_g_.begin());
            }
        }
        f_prev_ = f;
        phi_prev_ = phi;
        has_prev_ = true;

        std::vector<double> gamma;
        if (d_f_.empty() || !solve(f, gamma)) {
            d_f_.clear();
            d_g_.clear();
            g = phi;
            return;
        }
        g = phi;
        for (std::size_t a = 0; a < gamma.size(); ++a)
            for (std::size_t i = 0; i < n; ++i) g[i] -= gamma[a] * d_g_[a][i];
    }

private:
    static double dot(const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    }

    // Normal equations of min |f - dF gamma|, Gaussian elimination with
    // partial pivoting. False when the system is numerically singular.
    bool solve(const std::vector<double>& f, std::vector<double>& gamma) const {
        const std::size_t m = d_f_.size();
        std::vector<double> mat(m * m), rhs(m);
        double scale = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b <= a; ++b) mat[a * m + b] = mat[b * m + a] = dot(d_f_[a], d_f_[b]);
            rhs[a] = dot(d_f_[a], f);
            scale = std::max(scale, mat[a * m + a]);
        }
        if (!(scale > 0.0)) return false;
        for (std::size_t a = 0; a < m; ++a) mat[a * m + a] += 1e-12 * scale;
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < m; ++r)
                if (std::abs(mat[r * m + col]) > std::abs(mat[piv * m + col])) piv = r;
            if (std::abs(mat[piv * m + col]) <= 1e-14 * scale) return false;
            if (piv != col) {
                for (std::size_t c = 0; c < m; ++c) std::swap(mat[col * m + c], mat[piv * m + c]);
                std::swap(rhs[col], rhs[piv]);
            }
            for (std::size_t r = col + 1; r < m; ++r) {
                const double q = mat[r * m + col] / mat[col * m + col];
                for (std::size_t c = col; c < m; ++c) mat[r * m + c] -= q * mat[col * m + c];
                rhs[r] -= q * rhs[col];
            }
        }
        gamma.assign(m, 0.0);
        for (std::size_t r = m; r-- > 0;) {
            double v = rhs[r];
            for (std::size_t c = r + 1; c < m; ++c) v -= mat[r * m + c] * gamma[c];
            gamma[r] = v / mat[r * m + r];
        }
        for (double x : gamma)
            if (!std::isfinite(x)) return false;
        return true;
    }

    std::size_t depth_;
    bool has_prev_ = false;
    std::vector<double> f_prev_;
    std::vector<double> phi_prev_;
    std::vector<std::vector<double>> d_f_;
    std::vector<std::vector<double>> d_g_;
};

}  // namespace

DiscreteProblem discretize(const Scenario& scenario, const AssemblyOptions& options) {
    validate(scenario);
    auto grid = std::make_shared<const Grid>(scenario.domain, scenario.n_per_dim);
    std::vector<double> input = sample_input(scenario.input, *grid);
    DelayTable delays = compute_delays(*grid, scenario.velocity, scenario.h_t);

    auto build = [&]() -> std::pair<ConnectivityOperator, std::pair<bool, double>> {
        if (scenario.rank == 0) return {assemble_dense(grid, scenario.kernel, options), {false, 0.0}};

        // Probe with the integrand the first step sees. A constant probe is
        // reproduced exactly by any rank, so fall back to the default one.
        std::vector<double> v0 = initial_state(scenario, *grid);
        std::vector<double> probe(grid->size());
        for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = firing_value(scenario.firing, v0[i] + input[i]);
        const auto [lo, hi] = std::minmax_element(probe.begin(), probe.end());
        if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) probe.clear();

        ConnectivityOperator lr = assemble_low_rank(grid, scenario.kernel, scenario.rank, probe);
        const double err = lr.rank_error_estimate();
        if (err > kLowRankFallbackRatio * lr.probe_sup_norm())
            return {assemble_dense(grid, scenario.kernel, options), {true, err}};
        return {std::move(lr), {false, err}};
    };
    auto [op, fallback] = build();
    if (delays.has_delay()) op.materialize_rows();

    return DiscreteProblem{scenario,         grid, std::move(op), std::move(delays), std::move(input),
                           fallback.first, fallback.second};
}

DiscreteProblem with_time_step(const DiscreteProblem& problem, double h_t) {
    DiscreteProblem p = problem;
    p.scenario.h_t = h_t;
    p.delays = compute_delays(*p.grid, p.scenario.velocity, h_t);
    return p;
}

std::vector<double> rhs(const DiscreteProblem& problem, const HistoryBuffer& history, double t,
                        const HistoryHead* head) {
    const Scenario& sc = problem.scenario;
    const std::size_t n2 = problem.grid->size();
    const std::vector<double> v = field_at(history, t, head);

    std::vector<double> integral(n2);
    if (!problem.delays.has_delay()) {
        problem.op.apply(fire(sc.firing, v), integral);
    } else {
        for (std::size_t i = 0; i < n2; ++i) {
            const auto row = problem.op.row(i);
            const auto tau = problem.delays.tau_row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < n2; ++j)
                acc += row[j] * firing_value(sc.firing, sample_at(history, j, t - tau[j], head));
            integral[i] = acc;
        }
    }
    std::vector<double> out(n2);
    for (std::size_t i = 0; i < n2; ++i) out[i] = (problem.input[i] - v[i] + integral[i]) / sc.c;
    return out;
}

ImplicitStepper::ImplicitStepper(const DiscreteProblem& problem, SolverOptions options)
    : problem_(problem),
      options_(options),
      history_(problem.grid->size(), problem.scenario.h_t,
               problem.delays.has_delay() ? problem.delays.required_depth() : 2,
               initial_state(problem.scenario, *problem.grid)) {
    if (options_.max_iterations < 1) fail(ErrorKind::InvalidArgument, "solver: max_iterations must be >= 1");
    if (!(options_.tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "solver: tolerance must be positive");
    state_.t = 0.0;
    state_.values.assign(history_.initial_history().begin(), history_.initial_history().end());
    history_.push(0.0, state_.values);
    integral_now_.resize(state_.values.size());
    integral_full(0, state_.values, integral_now_);
}

// Delayed pairs with d_ij >= 1 read only stored levels k-1 and older.
void ImplicitStepper::integral_far(long k, std::span<double> out) const {
    const DelayTable& dt = problem_.delays;
    const std::size_t n2 = out.size();
    const FiringSpec& f = problem_.scenario.firing;
    std::vector<const double*> level(static_cast<std::size_t>(dt.max_steps()) + 2, nullptr);
    for (std::size_t d = 1; d < level.size(); ++d) level[d] = history_.at_step(k - static_cast<long>(d)).data();

    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2; ++i) {
        const auto row = problem_.op.row(i);
        const auto steps = dt.steps_row(i);
        const auto frac = dt.fraction_row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const auto d = static_cast<std::size_t>(steps[j]);
            if (d == 0) continue;
            const double th = frac[j];
            const double v = th == 0.0 ? level[d][j] : (1.0 - th) * level[d][j] + th * level[d + 1][j];
            acc += row[j] * firing_value(f, v);
        }
        out[i] = acc;
    }
}

// Pairs with d_ij == 0 interpolate between level k-1 and the guess for level k.
void ImplicitStepper::integral_near(long k, std::span<const double> guess, std::span<double> out) const {
    const DelayTable& dt = problem_.delays;
    const FiringSpec& f = problem_.scenario.firing;
    const auto prev = history_.at_step(k - 1);
    const std::size_t n2 = out.size();
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2; ++i) {
        const auto row = problem_.op.row(i);
        const auto frac = dt.fraction_row(i);
        double acc = 0.0;
        for (std::uint32_t j : dt.near_pairs(i)) {
            const double th = frac[j];
            const double v = th == 0.0 ? guess[j] : (1.0 - th) * guess[j] + th * prev[j];
            acc += row[j] * firing_value(f, v);
        }
        out[i] = acc;
    }
}

void ImplicitStepper::integral_full(long k, std::span<const double> level_k, std::span<double> out) const {
    if (!problem_.delays.has_delay()) {
        problem_.op.apply(fire(problem_.scenario.firing, level_k), out);
        return;
    }
    std::vector<double> near(out.size());
    integral_far(k, out);
    integral_near(k, level_k, near);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += near[i];
}

StepReport ImplicitStepper::step() {
    const Scenario& sc = problem_.scenario;
    const std::size_t n2 = state_.values.size();
    const double h = sc.h_t;
    const long k = step_ + 1;
    const double t_next = static_cast<double>(k) * h;
    const bool delayed = problem_.delays.has_delay();
    const std::vector<double>& vn = state_.values;
    const std::vector<double>& input = problem_.input;

    // The decay term is linear and solved for exactly; only the integral term
    // is iterated.
    const double ch = sc.c / h;
    const bool trap = options_.scheme == TimeScheme::Trapezoidal;
    const double weight = trap ? 0.5 : 1.0;
    const double denom = ch + weight;
    std::vector<double> base(n2);
    for (std::size_t i = 0; i < n2; ++i) {
        base[i] = trap ? ch * vn[i] + 0.5 * (input[i] - vn[i] + integral_now_[i]) + 0.5 * input[i]
                       : ch * vn[i] + input[i];
    }

    std::vector<double> far(n2, 0.0);
    if (delayed) integral_far(k, far);

    std::vector<double> g = vn;
    std::vector<double> phi(n2);
    std::vector<double> a(n2);
    std::vector<double> near(n2);
    AndersonMixer mixer(options_.anderson_depth, n2);
    StepReport report;
    report.fell_back_to_dense = problem_.fell_back_to_dense;
    report.residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options_.max_iterations; ++it) {
        if (delayed) {
            integral_near(k, g, near);
            for (std::size_t i = 0; i < n2; ++i) a[i] = far[i] + near[i];
        } else {
            problem_.op.apply(fire(sc.firing, g), a);
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < n2; ++i) {
            phi[i] = (base[i] + weight * a[i]) / denom;
            residual = std::max(residual, std::abs(phi[i] - g[i]));
        }
        check_divergence(phi, options_.divergence_bound, t_next);
        report.iterations = it;
        report.residual = residual;
        if (residual < options_.tolerance || it == options_.max_iterations) {
            g = phi;
            break;
        }
        mixer.next(g, phi);
    }
    if (report.residual >= options_.tolerance && !options_.continue_on_no_convergence) {
        std::ostringstream os;
        os << "fixed-point iteration stalled at t = " << time_label(t_next) << " (residual " << report.residual
           << " after " << report.iterations << " iterations)";
        fail(ErrorKind::NoConvergence, os.str());
    }

    history_.push(t_next, g);
    state_.t = t_next;
    state_.values = std::move(g);
    step_ = k;
    if (delayed) {
        integral_near(k, state_.values, near);
        for (std::size_t i = 0; i < n2; ++i) integral_now_[i] = far[i] + near[i];
    } else {
        problem_.op.apply(fire(sc.firing, state_.values), integral_now_);
    }
    return report;
}

FieldState step_explicit_rk4(const FieldState& prev, const HistoryBuffer& history, const DiscreteProblem& problem,
                             double h) {
    const std::size_t n2 = prev.values.size();
    const double t = prev.t;
    const std::vector<double> k1 = rhs(problem, history, t, nullptr);
    std::vector<double> y(n2);

    for (std::size_t i = 0; i < n2; ++i) y[i] = prev.values[i] + 0.5 * h * k1[i];
    HistoryHead head{t + 0.5 * h, y};
    const std::vector<double> k2 = rhs(problem, history, t + 0.5 * h, &head);

    for (std::size_t i = 0; i < n2; ++i) y[i] = prev.values[i] + 0.5 * h * k2[i];
    const std::vector<double> k3 = rhs(problem, history, t + 0.5 * h, &head);

    for (std::size_t i = 0; i < n2; ++i) y[i] = prev.values[i] + h * k3[i];
    head.t = t + h;
    const std::vector<double> k4 = rhs(problem, history, t + h, &head);

    FieldState next{t + h, std::vector<double>(n2)};
    for (std::size_t i = 0; i < n2; ++i)
        next.values[i] = prev.values[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_divergence(next.values, 1e6, next.t);
    return next;
}

FieldState integrate_rk4(const DiscreteProblem& problem, double h, double t_final) {
    const DiscreteProblem p = with_time_step(problem, h);
    const std::size_t n = steps_to(t_final, h);
    HistoryBuffer history(p.grid->size(), h, p.delays.has_delay() ? p.delays.required_depth() : 2,
                          initial_state(p.scenario, *p.grid));
    FieldState state{0.0, {history.initial_history().begin(), history.initial_history().end()}};
    history.push(0.0, state.values);
    for (std::size_t k = 1; k <= n; ++k) {
        state = step_explicit_rk4(state, history, p, h);
        state.t = static_cast<double>(k) * h;
        history.push(state.t, state.values);
    }
    return state;
}

std::size_t steps_to(double t, double h) {
    if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, "time " + time_label(t) + " is negative");
    const double q = t / h;
    const double k = std::round(q);
    if (std::abs(q - k) > 1e-9 * std::max(1.0, q))
        fail(ErrorKind::InvalidArgument, "time " + time_label(t) + " is not a multiple of h_t = " + time_label(h));
    return static_cast<std::size_t>(k);
}

const FieldState* Trajectory::snapshot_at(double t) const {
    for (const auto& s : snapshots)
        if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return &s;
    return nullptr;
}

Trajectory integrate(const Scenario& scenario, const IntegrateOptions& options) {
    const DiscreteProblem problem = discretize(scenario, options.solver.assembly);
    return integrate(problem, options);
}

Trajectory integrate(const DiscreteProblem& problem, const IntegrateOptions& options) {
    const Scenario& sc = problem.scenario;
    const Grid& grid = *problem.grid;
    const double L = grid.half_width();

    Trajectory tr;
    tr.scenario = sc;
    tr.grid = problem.grid;
    tr.probe1 = options.probe1.value_or(grid.nearest(-L, -L));
    tr.probe2 = options.probe2.value_or(grid.nearest(0.0, 0.0));
    if (tr.probe1 >= grid.size() || tr.probe2 >= grid.size())
        fail(ErrorKind::InvalidArgument, "trace probe index out of range");
    tr.fell_back_to_dense = problem.fell_back_to_dense;
    tr.rank_error = problem.rank_error;
    tr.low_rank = problem.op.is_low_rank();

    const std::optional<double> threshold =
        options.activity_threshold ? options.activity_threshold : sc.activity_threshold;
    const std::size_t n_steps = steps_to(sc.t_final, sc.h_t);
    std::vector<std::size_t> snapshot_steps;
    for (double t : sc.snapshot_times) {
        const std::size_t k = steps_to(t, sc.h_t);
        if (k > n_steps)
            fail(ErrorKind::InvalidArgument, "snapshot time " + time_label(t) + " lies beyond T");
        snapshot_steps.push_back(k);
    }
    snapshot_steps.push_back(n_steps);
    std::sort(snapshot_steps.begin(), snapshot_steps.end());
    snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()), snapshot_steps.end());

    auto record = [&](std::size_t k, const FieldState& s) {
        TraceRow row;
        row.t = s.t;
        const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
        row.max = *hi;
        row.min = *lo;
        row.probe1 = s.values[tr.probe1];
        row.probe2 = s.values[tr.probe2];
        if (threshold) row.radius = activity_radius(s.values, grid, *threshold).radius;
        tr.traces.push_back(row);
        if (k == 0 || std::binary_search(snapshot_steps.begin(), snapshot_steps.end(), k)) tr.snapshots.push_back(s);
        if (options.on_step) options.on_step(s);
    };

    const auto start = std::chrono::steady_clock::now();
    ImplicitStepper stepper(problem, options.solver);
    record(0, stepper.state());
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const StepReport rep = stepper.step();
        tr.max_iterations_used = std::max(tr.max_iterations_used, rep.iterations);
        if (rep.residual >= options.solver.tolerance) ++tr.unconverged_steps;
        record(k, stepper.state());
    }
    tr.steps = n_steps;
    tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return tr;
}

}  // namespace nfsim
