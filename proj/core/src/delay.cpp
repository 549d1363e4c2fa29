#include "nfsim/delay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfsim/error.hpp"

namespace nfsim {

DelayTable DelayTable::compute(const Grid& grid, double velocity, double h_t) {
    if (!(velocity > 0.0)) fail(ErrorKind::InvalidArgument, "compute_delays: velocity must be positive");
    if (!(h_t > 0.0) || !std::isfinite(h_t)) fail(ErrorKind::InvalidArgument, "compute_delays: h_t must be positive");

    DelayTable t;
    t.velocity_ = velocity;
    t.h_t_ = h_t;
    t.n2_ = grid.size();
    t.near_offsets_.assign(t.n2_ + 1, 0);
    if (!std::isfinite(velocity)) return t;

    const std::size_t n2 = t.n2_;
    t.tau_.resize(n2 * n2);
    t.steps_.resize(n2 * n2);
    t.fraction_.resize(n2 * n2);
    for (std::size_t i = 0; i < n2; ++i) {
        std::size_t near = 0;
        for (std::size_t j = 0; j < n2; ++j) {
            const double dx = grid.x(i) - grid.x(j);
            const double dy = grid.y(i) - grid.y(j);
            const double tau = std::sqrt(dx * dx + dy * dy) / velocity;
            const double q = tau / h_t;
            double whole = std::floor(q);
            double frac = q - whole;
            if (frac >= 1.0) {  // rounding guard
                whole += 1.0;
                frac = 0.0;
            }
            const std::size_t k = i * n2 + j;
            t.tau_[k] = tau;
            t.steps_[k] = static_cast<std::int32_t>(whole);
            t.fraction_[k] = frac;
            t.tau_max_ = std::max(t.tau_max_, tau);
            t.max_steps_ = std::max(t.max_steps_, t.steps_[k]);
            if (t.steps_[k] == 0) ++near;
        }
        t.near_offsets_[i + 1] = t.near_offsets_[i] + near;
    }
    t.near_cols_.reserve(t.near_offsets_[n2]);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            if (t.steps_[i * n2 + j] == 0) t.near_cols_.push_back(static_cast<std::uint32_t>(j));
    return t;
}

std::size_t DelayTable::required_depth() const noexcept {
    return static_cast<std::size_t>(std::ceil(tau_max_ / h_t_ - 1e-12)) + 2;
}

double DelayTable::tau(std::size_t i, std::size_t j) const noexcept {
    return tau_.empty() ? 0.0 : tau_[i * n2_ + j];
}

std::int32_t DelayTable::steps(std::size_t i, std::size_t j) const noexcept {
    return steps_.empty() ? 0 : steps_[i * n2_ + j];
}

double DelayTable::fraction(std::size_t i, std::size_t j) const noexcept {
    return fraction_.empty() ? 0.0 : fraction_[i * n2_ + j];
}

DelayTable compute_delays(const Grid& grid, double velocity, double h_t) {
    return DelayTable::compute(grid, velocity, h_t);
}

HistoryBuffer::HistoryBuffer(std::size_t field_size, double h_t, std::size_t depth,
                             std::vector<double> initial_history)
    : field_size_(field_size), h_t_(h_t), depth_(depth), initial_(std::move(initial_history)) {
    if (depth_ < 2) fail(ErrorKind::InvalidArgument, "history: depth must be >= 2");
    if (!(h_t_ > 0.0)) fail(ErrorKind::InvalidArgument, "history: h_t must be positive");
    if (initial_.size() != field_size_)
        fail(ErrorKind::DimensionMismatch, "history: initial history has wrong length");
    ring_.resize(depth_ * field_size_);
}

void HistoryBuffer::push(double t, std::span<const double> field) {
    if (field.size() != field_size_) fail(ErrorKind::DimensionMismatch, "history: pushed field has wrong length");
    const double expected = static_cast<double>(next_step_) * h_t_;
    if (std::abs(t - expected) > 1e-9 * h_t_) {
        fail(ErrorKind::NonMonotoneTime, "history: expected time stamp " + std::to_string(expected) + ", got " +
                                             std::to_string(t));
    }
    const std::size_t slot = static_cast<std::size_t>(next_step_) % depth_;
    std::copy(field.begin(), field.end(), ring_.begin() + static_cast<std::ptrdiff_t>(slot * field_size_));
    ++next_step_;
    count_ = std::min(count_ + 1, depth_);
}

std::span<const double> HistoryBuffer::at_step(long k) const {
    if (k < 0 || (k == 0 && count_ == 0)) return initial_;
    if (k > latest_step()) {
        fail(ErrorKind::HistoryUnderrun, "history: step " + std::to_string(k) + " is not stored yet");
    }
    if (k < earliest_step()) {
        fail(ErrorKind::HistoryUnderrun, "history: step " + std::to_string(k) + " already evicted (earliest " +
                                             std::to_string(earliest_step()) + ")");
    }
    const std::size_t slot = static_cast<std::size_t>(k) % depth_;
    return {ring_.data() + slot * field_size_, field_size_};
}

double sample_at(const HistoryBuffer& buffer, std::size_t j, double s, const HistoryHead* head) {
    const double h = buffer.h_t();
    if (s < 0.0 || (s == 0.0 && buffer.latest_step() < 0)) return buffer.initial_history()[j];

    // Work in step units. Times reach here as sums and differences of step
    // multiples, so a tolerance on the step index absorbs their rounding.
    const double q = s / h;
    const double snap = 1e-9 * std::max(1.0, q);
    const long latest = buffer.latest_step();
    if (head && q > static_cast<double>(latest) + snap) {
        const double t0 = latest < 0 ? 0.0 : buffer.latest_time();
        const double v0 = latest < 0 ? buffer.initial_history()[j] : buffer.at_step(latest)[j];
        if (s >= head->t) return head->values[j];
        const double alpha = (s - t0) / (head->t - t0);
        return (1.0 - alpha) * v0 + alpha * head->values[j];
    }

    const double kf = std::floor(q + snap);
    const long k = static_cast<long>(kf);
    const double theta = q - kf;
    if (theta <= snap) return buffer.at_step(k)[j];
    return (1.0 - theta) * buffer.at_step(k)[j] + theta * buffer.at_step(k + 1)[j];
}

std::vector<double> sample_delayed(const HistoryBuffer& buffer, const DelayTable& table, std::size_t i,
                                   double t_now, const HistoryHead* head) {
    const std::size_t n2 = buffer.field_size();
    std::vector<double> out(n2);
    for (std::size_t j = 0; j < n2; ++j) out[j] = sample_at(buffer, j, t_now - table.tau(i, j), head);
    return out;
}

}  // namespace nfsim
