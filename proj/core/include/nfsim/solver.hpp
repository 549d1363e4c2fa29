#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nfsim/delay.hpp"
#include "nfsim/grid.hpp"
#include "nfsim/model.hpp"
#include "nfsim/operator.hpp"

namespace nfsim {

struct FieldState {
    double t = 0.0;
    std::vector<double> values;
};

struct StepReport {
    int iterations = 0;
    double residual = 0.0;
    bool fell_back_to_dense = false;
};

enum class TimeScheme {
    Trapezoidal,
    ImplicitEuler,  // first order; only for checking the convergence harness
};

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 50;
    /// Past iterates combined by Anderson mixing; 0 gives plain fixed-point
    /// (Picard) iteration.
    std::size_t anderson_depth = 0;
    double divergence_bound = 1e6;
    TimeScheme scheme = TimeScheme::Trapezoidal;
    /// Keep going (with the last iterate) when the iteration cap is hit.
    bool continue_on_no_convergence = false;
    AssemblyOptions assembly;
};

/// A scenario with everything precomputed: grid, operator, delays, input.
struct DiscreteProblem {
    Scenario scenario;
    std::shared_ptr<const Grid> grid;
    ConnectivityOperator op;
    DelayTable delays;
    std::vector<double> input;
    /// Low-rank was requested but failed the accuracy check.
    bool fell_back_to_dense = false;
    /// Estimate of the rejected or accepted low-rank operator (0 when none).
    double rank_error = 0.0;
};

/// Builds the operator (low-rank when scenario.rank > 0 and the probe check
/// passes, dense otherwise) and the delay table for step h_t. The probe is
/// S(V0 + I).
DiscreteProblem discretize(const Scenario& scenario, const AssemblyOptions& options = {});

/// Same grid and kernel with a different time step (delays re-tabulated).
DiscreteProblem with_time_step(const DiscreteProblem& problem, double h_t);

/// Right-hand side dV/dt at time t. The field at t and earlier is read from the
/// history, extended by head when given (head->t == t supplies the current
/// field).
std::vector<double> rhs(const DiscreteProblem& problem, const HistoryBuffer& history, double t,
                        const HistoryHead* head = nullptr);

/// Trapezoidal (or implicit Euler) stepper. Owns the history and the integral
/// term at the current level so each step evaluates the far delayed pairs once.
class ImplicitStepper {
public:
    ImplicitStepper(const DiscreteProblem& problem, SolverOptions options = {});

    const FieldState& state() const noexcept { return state_; }
    const HistoryBuffer& history() const noexcept { return history_; }
    long step_index() const noexcept { return step_; }

    /// Advances by h_t. Throws no-convergence (unless configured to continue)
    /// or divergence.
    StepReport step();

private:
    void integral_far(long k, std::span<double> out) const;
    void integral_near(long k, std::span<const double> guess, std::span<double> out) const;
    void integral_full(long k, std::span<const double> level_k, std::span<double> out) const;

    const DiscreteProblem& problem_;
    SolverOptions options_;
    HistoryBuffer history_;
    FieldState state_;
    std::vector<double> integral_now_;  // A at the current level
    long step_ = 0;
};

/// One classical RK4 step of size h on the same right-hand side. The history
/// must be stepped at h (delays tabulated at h); the stage values serve as
/// history head for delays shorter than the stage offset.
FieldState step_explicit_rk4(const FieldState& prev, const HistoryBuffer& history, const DiscreteProblem& problem,
                             double h);

struct TraceRow {
    double t = 0.0;
    double max = 0.0;
    double min = 0.0;
    double probe1 = 0.0;  // V(x1, t), x1 near the corner (-L, -L)
    double probe2 = 0.0;  // V(x2, t), x2 near the centre
    std::optional<double> radius;
};

struct Trajectory {
    Scenario scenario;
    std::shared_ptr<const Grid> grid;
    std::vector<FieldState> snapshots;  // t = 0, requested times, T
    std::vector<TraceRow> traces;       // one row per step, t = 0 included
    std::size_t probe1 = 0;
    std::size_t probe2 = 0;
    bool fell_back_to_dense = false;
    double rank_error = 0.0;
    bool low_rank = false;
    int max_iterations_used = 0;
    std::size_t unconverged_steps = 0;  // only nonzero with continue_on_no_convergence
    double wall_seconds = 0.0;
    std::size_t steps = 0;

    const FieldState& final_state() const { return snapshots.back(); }
    const FieldState* snapshot_at(double t) const;
};

struct IntegrateOptions {
    SolverOptions solver;
    std::optional<std::size_t> probe1;
    std::optional<std::size_t> probe2;
    /// Overrides scenario.activity_threshold for the radius trace.
    std::optional<double> activity_threshold;
    /// Called after every step (and once at t = 0).
    std::function<void(const FieldState&)> on_step;
};

Trajectory integrate(const Scenario& scenario, const IntegrateOptions& options = {});
Trajectory integrate(const DiscreteProblem& problem, const IntegrateOptions& options = {});

/// Reference trajectory with RK4 at step h (any positive h dividing T);
/// returns the final state.
FieldState integrate_rk4(const DiscreteProblem& problem, double h, double t_final);

/// Number of steps of size h covering [0, t], rejecting t off the step grid.
std::size_t steps_to(double t, double h);

}  // namespace nfsim
