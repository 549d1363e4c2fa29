#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nfsim/grid.hpp"
#include "nfsim/solver.hpp"

namespace nfsim {

struct ActivityResult {
    double threshold = 0.0;
    std::vector<std::uint8_t> active;  // 1 where V_i >= threshold
    double radius = 0.0;               // max |x_i| over active nodes, 0 if none
};

/// Node-granular: no sub-node localisation of the front.
ActivityResult activity_radius(std::span<const double> values, const Grid& grid, double threshold);

struct RadiusSample {
    double t = 0.0;
    double radius = 0.0;
};

/// r_a at every given state with t > 0, in the given order.
std::vector<RadiusSample> radius_series(std::span<const FieldState> states, const Grid& grid, double threshold);
/// r_a from the trace of a run that tracked activity (rows with t > 0).
std::vector<RadiusSample> radius_series(const Trajectory& trajectory);

/// Average front speed r_a(t_end) / t_end. t_end must appear in the series.
double front_speed(std::span<const RadiusSample> series, double t_start, double t_end);

struct MinMaxSample {
    double t = 0.0;
    double max = 0.0;
    double min = 0.0;
};

std::vector<MinMaxSample> minmax_trace(const Trajectory& trajectory);

enum class AsymptoticKind { ZeroState, NontrivialSteady, Oscillatory, Undecided };

const char* to_string(AsymptoticKind kind) noexcept;

struct AsymptoticLabel {
    AsymptoticKind kind = AsymptoticKind::Undecided;
    double tail_mean = 0.0;
    double tail_amplitude = 0.0;  // max - min over the tail
    std::size_t tail_maxima = 0;
};

struct ClassifyOptions {
    double tail_fraction = 0.2;
    double eps_zero = 1e-3;
    double eps_flat = 1e-2;
};

/// Labels a trace of sup-norms sampled at uniform times. Over the final
/// tail_fraction of the samples: mean < eps_zero is ZeroState; otherwise
/// max - min < eps_flat * max(1, mean) is NontrivialSteady; otherwise two or
/// more strict local maxima is Oscillatory; otherwise Undecided.
AsymptoticLabel classify(std::span<const double> trace, const ClassifyOptions& options = {});

/// sup_i |V_i| per trace row.
std::vector<double> sup_norm_trace(const Trajectory& trajectory);

/// Indices k with v[k-1] < v[k] > v[k+1].
std::vector<std::size_t> strict_local_maxima(std::span<const double> v);

struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;  // row 0 at y = +L, column 0 at x = -L

    double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Piecewise-cubic interpolant through the four nearest nodes per direction,
/// tensorised. Exact at the nodes and for bicubic fields.
double interpolate_bicubic(std::span<const double> values, const Grid& grid, double x, double y);

/// Pixel centres of a resolution x resolution raster over the domain.
Raster upsample_bicubic(std::span<const double> values, const Grid& grid, std::size_t resolution);

/// Population variance of the interpolant on the circle of the given radius.
double angular_variance(std::span<const double> values, const Grid& grid, double radius,
                        std::size_t samples = 720);

/// Norm of the node carrying max |V|.
double radius_of_max_abs(std::span<const double> values, const Grid& grid);

/// max_i max_g |V_i - V_{g(i)}| over the given square symmetries.
double symmetry_defect(std::span<const double> values, const Grid& grid, std::span<const SquareSymmetry> group);

inline constexpr SquareSymmetry kMirrorSymmetries[] = {
    SquareSymmetry::Identity,
    SquareSymmetry::Rotate180,
    SquareSymmetry::FlipX,
    SquareSymmetry::FlipY,
};

}  // namespace nfsim
