#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nfsim/grid.hpp"

namespace nfsim {

/// Pairwise transmission delays tau_ij = |x_i - x_j| / v, stored as whole steps
/// d_ij = floor(tau_ij / h_t) plus a fraction theta_ij in [0, 1) so the hot loop
/// never divides.
class DelayTable {
public:
    /// velocity may be infinite (no delay): the table then holds no pairs and
    /// every delay reads as zero.
    static DelayTable compute(const Grid& grid, double velocity, double h_t);

    bool has_delay() const noexcept { return !steps_.empty(); }
    double velocity() const noexcept { return velocity_; }
    double h_t() const noexcept { return h_t_; }
    double tau_max() const noexcept { return tau_max_; }
    std::size_t size() const noexcept { return n2_; }
    /// Largest d_ij.
    std::int32_t max_steps() const noexcept { return max_steps_; }
    /// Records a history must retain: ceil(tau_max / h_t) + 2.
    std::size_t required_depth() const noexcept;

    double tau(std::size_t i, std::size_t j) const noexcept;
    std::int32_t steps(std::size_t i, std::size_t j) const noexcept;
    double fraction(std::size_t i, std::size_t j) const noexcept;

    std::span<const double> tau_row(std::size_t i) const noexcept { return {tau_.data() + i * n2_, n2_}; }
    std::span<const std::int32_t> steps_row(std::size_t i) const noexcept {
        return {steps_.data() + i * n2_, n2_};
    }
    std::span<const double> fraction_row(std::size_t i) const noexcept {
        return {fraction_.data() + i * n2_, n2_};
    }

    /// Pairs with d_ij == 0 (tau below one step), CSR by row. These are the
    /// pairs whose delayed value depends on the level being solved for.
    std::span<const std::uint32_t> near_pairs(std::size_t i) const noexcept {
        return {near_cols_.data() + near_offsets_[i], near_offsets_[i + 1] - near_offsets_[i]};
    }

private:
    double velocity_ = 0.0;
    double h_t_ = 0.0;
    double tau_max_ = 0.0;
    std::int32_t max_steps_ = 0;
    std::size_t n2_ = 0;
    std::vector<double> tau_;
    std::vector<std::int32_t> steps_;
    std::vector<double> fraction_;
    std::vector<std::size_t> near_offsets_;
    std::vector<std::uint32_t> near_cols_;
};

DelayTable compute_delays(const Grid& grid, double velocity, double h_t);

/// Ring of past field states at consecutive multiples of h_t. Step k holds the
/// field at t = k h_t; steps k <= 0 that are not stored read as the initial
/// history (constant in time on [-tau_max, 0]).
class HistoryBuffer {
public:
    HistoryBuffer(std::size_t field_size, double h_t, std::size_t depth, std::vector<double> initial_history);

    /// t must be 0 for the first push and previous + h_t afterwards (to
    /// 1e-9 h_t). The oldest record is evicted once depth records are held.
    void push(double t, std::span<const double> field);

    std::size_t field_size() const noexcept { return field_size_; }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t stored() const noexcept { return count_; }
    double h_t() const noexcept { return h_t_; }
    bool empty() const noexcept { return count_ == 0; }
    /// Step index of the newest record (-1 when empty).
    long latest_step() const noexcept { return next_step_ - 1; }
    long earliest_step() const noexcept { return next_step_ - static_cast<long>(count_); }
    double latest_time() const noexcept { return static_cast<double>(latest_step()) * h_t_; }
    std::span<const double> initial_history() const noexcept { return initial_; }

    /// Field at step k. Negative k (and k = 0 before the first push) give the
    /// initial history; evicted or future steps throw history-underrun.
    std::span<const double> at_step(long k) const;

private:
    std::size_t field_size_;
    double h_t_;
    std::size_t depth_;
    std::vector<double> initial_;
    std::vector<double> ring_;  // depth x field_size
    std::size_t count_ = 0;
    long next_step_ = 0;
};

/// Optional record beyond the newest stored step, used while a step (or an
/// RK stage) is being computed: the field is taken linear in time between the
/// newest record and the head.
struct HistoryHead {
    double t = 0.0;
    std::span<const double> values;
};

/// V_j(t_now - tau_ij) for all j, linearly interpolated in time between the
/// bracketing records. A query landing exactly on a record returns it
/// unchanged; queries at t <= 0 return the initial history.
std::vector<double> sample_delayed(const HistoryBuffer& buffer, const DelayTable& table, std::size_t i,
                                   double t_now, const HistoryHead* head = nullptr);

/// Field value of node j at an arbitrary time s (same rules as above).
double sample_at(const HistoryBuffer& buffer, std::size_t j, double s, const HistoryHead* head = nullptr);

}  // namespace nfsim
