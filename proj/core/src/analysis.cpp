#include "nfsim/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nfsim/error.hpp"

namespace nfsim {

namespace {

struct Stencil {
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
};

// Cubic Lagrange weights on the four nodes around x.
Stencil cubic_stencil(const std::vector<double>& z, double x) {
    const std::size_t n = z.size();
    Stencil s;
    if (n < 4) {
        // Too few nodes for a cubic: use all of them with lower degree.
        const std::size_t m = n;
        for (std::size_t a = 0; a < 4; ++a) s.index[a] = std::min(a, m - 1);
        for (std::size_t a = 0; a < m; ++a) {
            double w = 1.0;
            for (std::size_t b = 0; b < m; ++b)
                if (b != a) w *= (x - z[b]) / (z[a] - z[b]);
            s.weight[a] = w;
        }
        return s;
    }
    const auto it = std::upper_bound(z.begin(), z.end(), x);
    const std::size_t k = it == z.begin() ? 0 : static_cast<std::size_t>(it - z.begin()) - 1;
    const std::size_t first = std::min(k > 0 ? k - 1 : 0, n - 4);
    for (std::size_t a = 0; a < 4; ++a) {
        s.index[a] = first + a;
        double w = 1.0;
        for (std::size_t b = 0; b < 4; ++b)
            if (b != a) w *= (x - z[first + b]) / (z[first + a] - z[first + b]);
        s.weight[a] = w;
    }
    return s;
}

double evaluate(std::span<const double> values, const Grid& grid, const Stencil& sx, const Stencil& sy) {
    double acc = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
        if (sx.weight[a] == 0.0) continue;
        double col = 0.0;
        for (std::size_t b = 0; b < 4; ++b) {
            if (sy.weight[b] == 0.0) continue;
            col += sy.weight[b] * values[grid.index(sx.index[a], sy.index[b])];
        }
        acc += sx.weight[a] * col;
    }
    return acc;
}

void check_field(std::span<const double> values, const Grid& grid) {
    if (values.size() != grid.size()) fail(ErrorKind::DimensionMismatch, "field size does not match the grid");
}

}  // namespace

ActivityResult activity_radius(std::span<const double> values, const Grid& grid, double threshold) {
    check_field(values, grid);
    ActivityResult r;
    r.threshold = threshold;
    r.active.assign(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= threshold) {
            r.active[i] = 1;
            r.radius = std::max(r.radius, grid.norm(i));
        }
    }
    return r;
}

std::vector<RadiusSample> radius_series(std::span<const FieldState> states, const Grid& grid, double threshold) {
    std::vector<RadiusSample> out;
    for (const auto& s : states)
        if (s.t > 0.0) out.push_back({s.t, activity_radius(s.values, grid, threshold).radius});
    return out;
}

std::vector<RadiusSample> radius_series(const Trajectory& trajectory) {
    std::vector<RadiusSample> out;
    for (const auto& row : trajectory.traces) {
        if (!row.radius) fail(ErrorKind::InvalidArgument, "trajectory did not track the activity radius");
        if (row.t > 0.0) out.push_back({row.t, *row.radius});
    }
    return out;
}

double front_speed(std::span<const RadiusSample> series, double t_start, double t_end) {
    if (series.empty()) fail(ErrorKind::InvalidArgument, "front_speed: empty series");
    if (!(t_start >= 0.0) || !(t_end > t_start))
        fail(ErrorKind::InvalidArgument, "front_speed: need t_end > t_start >= 0");
    for (const auto& s : series)
        if (std::abs(s.t - t_end) <= 1e-9 * std::max(1.0, t_end)) return s.radius / t_end;
    fail(ErrorKind::InvalidArgument, "front_speed: t_end is not a sample time");
}

std::vector<MinMaxSample> minmax_trace(const Trajectory& trajectory) {
    std::vector<MinMaxSample> out;
    out.reserve(trajectory.traces.size());
    for (const auto& row : trajectory.traces) out.push_back({row.t, row.max, row.min});
    return out;
}

const char* to_string(AsymptoticKind kind) noexcept {
    switch (kind) {
        case AsymptoticKind::ZeroState: return "ZeroState";
        case AsymptoticKind::NontrivialSteady: return "NontrivialSteady";
        case AsymptoticKind::Oscillatory: return "Oscillatory";
        case AsymptoticKind::Undecided: return "Undecided";
    }
    return "?";
}

std::vector<std::size_t> strict_local_maxima(std::span<const double> v) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
        if (v[k - 1] < v[k] && v[k] > v[k + 1]) out.push_back(k);
    return out;
}

AsymptoticLabel classify(std::span<const double> trace, const ClassifyOptions& options) {
    if (trace.empty()) fail(ErrorKind::InvalidArgument, "classify: empty trace");
    const auto len = static_cast<std::size_t>(
        std::ceil(options.tail_fraction * static_cast<double>(trace.size())));
    const std::size_t tail_len = std::clamp<std::size_t>(len, 1, trace.size());
    const auto tail = trace.subspan(trace.size() - tail_len);

    AsymptoticLabel label;
    double sum = 0.0;
    for (double x : tail) sum += x;
    label.tail_mean = sum / static_cast<double>(tail.size());
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    label.tail_amplitude = *hi - *lo;
    label.tail_maxima = strict_local_maxima(tail).size();

    if (label.tail_mean < options.eps_zero)
        label.kind = AsymptoticKind::ZeroState;
    else if (label.tail_amplitude < options.eps_flat * std::max(1.0, label.tail_mean))
        label.kind = AsymptoticKind::NontrivialSteady;
    else if (label.tail_maxima >= 2)
        label.kind = AsymptoticKind::Oscillatory;
    else
        label.kind = AsymptoticKind::Undecided;
    return label;
}

std::vector<double> sup_norm_trace(const Trajectory& trajectory) {
    std::vector<double> out;
    out.reserve(trajectory.traces.size());
    for (const auto& row : trajectory.traces) out.push_back(std::max(std::abs(row.max), std::abs(row.min)));
    return out;
}

double interpolate_bicubic(std::span<const double> values, const Grid& grid, double x, double y) {
    check_field(values, grid);
    return evaluate(values, grid, cubic_stencil(grid.nodes_1d(), x), cubic_stencil(grid.nodes_1d(), y));
}

Raster upsample_bicubic(std::span<const double> values, const Grid& grid, std::size_t resolution) {
    check_field(values, grid);
    if (resolution < grid.n_per_dim())
        fail(ErrorKind::InvalidArgument, "upsample: resolution must be at least the grid size");
    const double L = grid.half_width();
    const double step = 2.0 * L / static_cast<double>(resolution);
    std::vector<Stencil> cols(resolution), rows(resolution);
    for (std::size_t p = 0; p < resolution; ++p) {
        const double u = -L + (static_cast<double>(p) + 0.5) * step;
        cols[p] = cubic_stencil(grid.nodes_1d(), u);
        rows[p] = cubic_stencil(grid.nodes_1d(), -u);
    }
    Raster r{resolution, resolution, std::vector<double>(resolution * resolution)};
    for (std::size_t row = 0; row < resolution; ++row)
        for (std::size_t col = 0; col < resolution; ++col)
            r.pixels[row * resolution + col] = evaluate(values, grid, cols[col], rows[row]);
    return r;
}

double angular_variance(std::span<const double> values, const Grid& grid, double radius, std::size_t samples) {
    check_field(values, grid);
    if (samples == 0) fail(ErrorKind::InvalidArgument, "angular_variance: need at least one sample");
    std::vector<double> v(samples);
    double mean = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
        v[k] = interpolate_bicubic(values, grid, radius * std::cos(phi), radius * std::sin(phi));
        mean += v[k];
    }
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / static_cast<double>(samples);
}

double radius_of_max_abs(std::span<const double> values, const Grid& grid) {
    check_field(values, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (std::abs(values[i]) > std::abs(values[best])) best = i;
    return grid.norm(best);
}

double symmetry_defect(std::span<const double> values, const Grid& grid, std::span<const SquareSymmetry> group) {
    check_field(values, grid);
    double d = 0.0;
    for (SquareSymmetry g : group)
        for (std::size_t i = 0; i < values.size(); ++i)
            d = std::max(d, std::abs(values[i] - values[apply_symmetry(grid, g, i)]));
    return d;
}

}  // namespace nfsim
