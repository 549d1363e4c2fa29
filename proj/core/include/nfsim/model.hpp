#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nfsim/grid.hpp"

namespace nfsim {

// ---------------------------------------------------------------------------
// Connectivity kernels
// ---------------------------------------------------------------------------

/// How the Gaussian exponent of the difference-of-Gaussians kernel is scaled.
enum class GaussianExponent {
    WithPi,        // exp(-r^2 / (2 pi xi^2))
    Conventional,  // exp(-r^2 / (2 xi^2))
};

/// Mexican hat: G(xi1) - A * G(xi2) with G(xi) = exp(-r^2/s(xi)) / sqrt(2 pi xi^2).
struct DifferenceOfGaussians {
    double xi1 = 0.1;
    double xi2 = 0.2;
    double amplitude_ratio = 1.0;  // A
    GaussianExponent exponent = GaussianExponent::WithPi;
};

/// K0 * sum_{i=0..2} cos(k_i . (x - y)) * exp(-|x - y| / sigma),
/// k_i = k_c (cos(i pi/3), sin(i pi/3)).
struct Hexagonal {
    double k0 = 1.5;
    double wavenumber = 3.141592653589793;
    double decay_length = 10.0;
};

/// (20 exp(-r) - 14 exp(-r/3)) / (18 pi). Short-range excitation, long-range
/// inhibition; both exponentials decay.
struct Breather {};

/// K(x, y) = value everywhere. Used for the degenerate reductions in tests
/// (value 0 turns the integral term off).
struct ConstantKernel {
    double value = 0.0;
};

using KernelSpec = std::variant<DifferenceOfGaussians, Hexagonal, Breather, ConstantKernel>;

double kernel_value(const KernelSpec& spec, double x1, double x2, double y1, double y2);
/// Radial kernels only (throws invalid-argument for Hexagonal).
double kernel_radial(const KernelSpec& spec, double r);
bool kernel_is_radial(const KernelSpec& spec) noexcept;
void validate(const KernelSpec& spec);
std::string describe(const KernelSpec& spec);

// ---------------------------------------------------------------------------
// Firing rate
// ---------------------------------------------------------------------------

/// S(x) = a / (1 + exp(-beta (x - theta))) - offset.
///
/// offset = 0 gives the plain logistic with range (0, a). offset = a/2 centres
/// the curve so that S(theta) = 0.
struct FiringSpec {
    double amplitude = 2.0;
    double slope = 1.0;
    double threshold = 0.0;
    double offset = 0.0;
};

/// Saturates cleanly to -offset or a - offset for large |beta (x - theta)|.
double firing_value(const FiringSpec& spec, double x) noexcept;
/// dS/dx, overflow-safe.
double firing_derivative(const FiringSpec& spec, double x) noexcept;
void validate(const FiringSpec& spec);

// ---------------------------------------------------------------------------
// External input
// ---------------------------------------------------------------------------

enum class InputNormalization {
    InversePiSigmaSq,  // bump scaled by 1 / (pi sigma^2): unit mass
    ExplicitFactor,
};

/// How a grid node picks up the input.
enum class InputSampling {
    Point,        // I(x_i)
    CellAverage,  // mean of I over the node's quadrature cell
};

/// I(x) = I0 + amplitude * norm * exp(-|x - centre|^2 / sigma^2).
struct InputSpec {
    double baseline = 0.0;
    double bump_amplitude = 0.0;
    double bump_width = 1.0;
    double center_x = 0.0;
    double center_y = 0.0;
    InputNormalization normalization = InputNormalization::InversePiSigmaSq;
    double factor = 1.0;
    InputSampling sampling = InputSampling::Point;

    bool has_bump() const noexcept { return bump_amplitude != 0.0; }
};

/// The input does not depend on t for any supported spec; t is accepted so the
/// signature matches the equation.
double input_value(const InputSpec& spec, double x, double y, double t = 0.0) noexcept;
void validate(const InputSpec& spec);

/// Input at every grid node according to spec.sampling. Mirror-symmetric grids
/// and centred bumps produce mirror-symmetric samples bit-for-bit.
std::vector<double> sample_input(const InputSpec& spec, const Grid& grid);

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

inline constexpr double kNoDelay = std::numeric_limits<double>::infinity();

struct Scenario {
    std::string name;
    KernelSpec kernel = ConstantKernel{};
    FiringSpec firing;
    InputSpec input;
    double c = 1.0;
    double velocity = kNoDelay;  // infinite: no transmission delay
    Domain domain;
    std::size_t n_per_dim = 16;
    std::size_t rank = 0;  // 0: dense operator
    double h_t = 0.1;
    double t_final = 1.0;
    double initial_value = 0.0;
    /// Optional spatially varying V0(x, y); overrides initial_value. It is also
    /// the history on [-tau_max, 0].
    std::function<double(double, double)> initial_field;
    std::vector<double> snapshot_times;
    /// Activity threshold used for radius tracking, when the scenario has one.
    std::optional<double> activity_threshold;

    bool has_delay() const noexcept { return std::isfinite(velocity); }
};

void validate(const Scenario& scenario);

/// V0 sampled at the grid nodes.
std::vector<double> initial_state(const Scenario& scenario, const Grid& grid);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct PresetInfo {
    std::string id;
    std::string summary;
};

const std::vector<PresetInfo>& preset_catalog();
Scenario preset(const std::string& id);

}  // namespace nfsim
