#include "nfsim/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nfsim/error.hpp"

namespace nfsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double gaussian_term(double r2, double xi, GaussianExponent exponent) {
    const double scale = exponent == GaussianExponent::WithPi ? 2.0 * std::numbers::pi * xi * xi
                                                              : 2.0 * xi * xi;
    return std::exp(-r2 / scale) / std::sqrt(2.0 * std::numbers::pi * xi * xi);
}

double dog_value(const DifferenceOfGaussians& k, double r2) {
    return gaussian_term(r2, k.xi1, k.exponent) -
           k.amplitude_ratio * gaussian_term(r2, k.xi2, k.exponent);
}

double breather_value(double r) {
    return (20.0 * std::exp(-r) - 14.0 * std::exp(-r / 3.0)) / (18.0 * std::numbers::pi);
}

// Mean of exp(-(s - c)^2 / sigma^2) over [a, b].
double gaussian_cell_mean(double a, double b, double c, double sigma) {
    const double integral = 0.5 * std::sqrt(std::numbers::pi) * sigma *
                            (std::erf((b - c) / sigma) - std::erf((a - c) / sigma));
    return integral / (b - a);
}

}  // namespace

double kernel_value(const KernelSpec& spec, double x1, double x2, double y1, double y2) {
    const double dx = x1 - y1;
    const double dy = x2 - y2;
    return std::visit(
        Overloaded{
            [&](const DifferenceOfGaussians& k) { return dog_value(k, dx * dx + dy * dy); },
            [&](const Hexagonal& k) {
                // cos is even: evaluating through |dx| and summing the i = 1, 2
                // pair first keeps K(d) == K(-d) and the x/y mirror images
                // bit-for-bit.
                const double ax = std::abs(dx);
                const double s3 = std::sqrt(3.0) / 2.0;
                const double kc = k.wavenumber;
                const double sum = std::cos(kc * ax) + (std::cos(kc * (0.5 * ax + s3 * dy)) +
                                                        std::cos(kc * (0.5 * ax - s3 * dy)));
                return k.k0 * sum * std::exp(-std::sqrt(dx * dx + dy * dy) / k.decay_length);
            },
            [&](const Breather&) { return breather_value(std::sqrt(dx * dx + dy * dy)); },
            [&](const ConstantKernel& k) { return k.value; },
        },
        spec);
}

double kernel_radial(const KernelSpec& spec, double r) {
    return std::visit(Overloaded{
                          [&](const DifferenceOfGaussians& k) { return dog_value(k, r * r); },
                          [&](const Hexagonal&) -> double {
                              fail(ErrorKind::InvalidArgument, "hexagonal kernel is not radial");
                          },
                          [&](const Breather&) { return breather_value(r); },
                          [&](const ConstantKernel& k) { return k.value; },
                      },
                      spec);
}

bool kernel_is_radial(const KernelSpec& spec) noexcept {
    return !std::holds_alternative<Hexagonal>(spec);
}

void validate(const KernelSpec& spec) {
    std::visit(Overloaded{
                   [](const DifferenceOfGaussians& k) {
                       if (!(k.xi1 > 0.0) || !(k.xi2 > 0.0))
                           fail(ErrorKind::InvalidArgument, "kernel: xi1 and xi2 must be positive");
                       if (!(k.amplitude_ratio >= 0.0))
                           fail(ErrorKind::InvalidArgument, "kernel: A must be non-negative");
                   },
                   [](const Hexagonal& k) {
                       if (!(k.k0 > 0.0) || !(k.wavenumber > 0.0) || !(k.decay_length > 0.0))
                           fail(ErrorKind::InvalidArgument,
                                "kernel: K0, k_c and sigma must be positive");
                   },
                   [](const Breather&) {},
                   [](const ConstantKernel& k) {
                       if (!std::isfinite(k.value))
                           fail(ErrorKind::InvalidArgument, "kernel: constant must be finite");
                   },
               },
               spec);
}

std::string describe(const KernelSpec& spec) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const DifferenceOfGaussians& k) {
                       os << "dog(xi1=" << k.xi1 << ", xi2=" << k.xi2 << ", A=" << k.amplitude_ratio
                          << (k.exponent == GaussianExponent::WithPi ? ", exponent=with-pi"
                                                                     : ", exponent=conventional")
                          << ")";
                   },
                   [&](const Hexagonal& k) {
                       os << "hexagonal(K0=" << k.k0 << ", kc=" << k.wavenumber
                          << ", sigma=" << k.decay_length << ")";
                   },
                   [&](const Breather&) { os << "breather"; },
                   [&](const ConstantKernel& k) { os << "constant(" << k.value << ")"; },
               },
               spec);
    return os.str();
}

double firing_value(const FiringSpec& spec, double x) noexcept {
    const double z = spec.slope * (x - spec.threshold);
    double logistic;
    if (z >= 0.0) {
        logistic = spec.amplitude / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        logistic = spec.amplitude * e / (1.0 + e);
    }
    return logistic - spec.offset;
}

double firing_derivative(const FiringSpec& spec, double x) noexcept {
    const double e = std::exp(-std::abs(spec.slope * (x - spec.threshold)));
    return spec.amplitude * spec.slope * e / ((1.0 + e) * (1.0 + e));
}

void validate(const FiringSpec& spec) {
    if (!(spec.amplitude > 0.0)) fail(ErrorKind::InvalidArgument, "firing: amplitude must be positive");
    if (!(spec.slope > 0.0)) fail(ErrorKind::InvalidArgument, "firing: slope must be positive");
    if (!std::isfinite(spec.threshold) || !std::isfinite(spec.offset))
        fail(ErrorKind::InvalidArgument, "firing: threshold and offset must be finite");
}

double input_value(const InputSpec& spec, double x, double y, double /*t*/) noexcept {
    if (!spec.has_bump()) return spec.baseline;
    const double s2 = spec.bump_width * spec.bump_width;
    const double norm = spec.normalization == InputNormalization::InversePiSigmaSq
                            ? 1.0 / (std::numbers::pi * s2)
                            : spec.factor;
    const double dx = x - spec.center_x;
    const double dy = y - spec.center_y;
    return spec.baseline + spec.bump_amplitude * norm * std::exp(-(dx * dx + dy * dy) / s2);
}

void validate(const InputSpec& spec) {
    if (!std::isfinite(spec.baseline) || !std::isfinite(spec.bump_amplitude))
        fail(ErrorKind::InvalidArgument, "input: baseline and amplitude must be finite");
    if (spec.has_bump() && !(spec.bump_width > 0.0))
        fail(ErrorKind::InvalidArgument, "input: bump width must be positive");
    if (spec.normalization == InputNormalization::ExplicitFactor && !std::isfinite(spec.factor))
        fail(ErrorKind::InvalidArgument, "input: factor must be finite");
}

std::vector<double> sample_input(const InputSpec& spec, const Grid& grid) {
    std::vector<double> out(grid.size(), spec.baseline);
    if (!spec.has_bump()) return out;

    if (spec.sampling == InputSampling::Point) {
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] = input_value(spec, grid.x(i), grid.y(i));
        return out;
    }

    // Cells [b_k, b_{k+1}] with b_{k+1} - b_k = w_k. The upper half mirrors the
    // lower half so a centred bump gives symmetric samples.
    const std::size_t n = grid.n_per_dim();
    const auto& w = grid.weights_1d();
    const double L = grid.half_width();
    std::vector<double> bounds(n + 1);
    bounds[0] = -L;
    for (std::size_t k = 0; k < n / 2; ++k) bounds[k + 1] = bounds[k] + w[k];
    for (std::size_t k = 0; k <= n / 2; ++k) bounds[n - k] = -bounds[k];
    if (n % 2 == 1) {
        // Odd rule: the middle cell is centred on 0.
        bounds[n / 2 + 1] = 0.5 * w[n / 2];
        bounds[n / 2] = -0.5 * w[n / 2];
    }

    const double s = spec.bump_width;
    const double norm = spec.normalization == InputNormalization::InversePiSigmaSq
                            ? 1.0 / (std::numbers::pi * s * s)
                            : spec.factor;
    std::vector<double> mean_x(n), mean_y(n);
    for (std::size_t k = 0; k < n; ++k) {
        mean_x[k] = gaussian_cell_mean(bounds[k], bounds[k + 1], spec.center_x, s);
        mean_y[k] = gaussian_cell_mean(bounds[k], bounds[k + 1], spec.center_y, s);
    }
    if (spec.center_x == 0.0) {
        for (std::size_t k = 0; k < n / 2; ++k) mean_x[n - 1 - k] = mean_x[k];
    }
    if (spec.center_y == 0.0) {
        for (std::size_t k = 0; k < n / 2; ++k) mean_y[n - 1 - k] = mean_y[k];
    }
    for (std::size_t ix = 0; ix < n; ++ix) {
        for (std::size_t iy = 0; iy < n; ++iy) {
            out[grid.index(ix, iy)] = spec.baseline + spec.bump_amplitude * norm * mean_x[ix] * mean_y[iy];
        }
    }
    return out;
}

void validate(const Scenario& s) {
    validate(s.kernel);
    validate(s.firing);
    validate(s.input);
    if (!(s.c > 0.0) || !std::isfinite(s.c)) fail(ErrorKind::InvalidArgument, "scenario: c must be positive");
    if (!(s.h_t > 0.0) || !std::isfinite(s.h_t))
        fail(ErrorKind::InvalidArgument, "scenario: h_t must be positive");
    if (!(s.t_final >= 0.0) || !std::isfinite(s.t_final))
        fail(ErrorKind::InvalidArgument, "scenario: T must be non-negative");
    if (!(s.velocity > 0.0)) fail(ErrorKind::InvalidArgument, "scenario: velocity must be positive or infinite");
    if (!(s.domain.half_width > 0.0)) fail(ErrorKind::InvalidArgument, "scenario: L must be positive");
    if (s.n_per_dim < 2) fail(ErrorKind::InvalidArgument, "scenario: N must be >= 2");
    if (s.rank == 1 || s.rank > s.n_per_dim)
        fail(ErrorKind::InvalidArgument, "scenario: rank must be 0 or in [2, N]");
    if (!std::isfinite(s.initial_value)) fail(ErrorKind::InvalidArgument, "scenario: V0 must be finite");
}

std::vector<double> initial_state(const Scenario& scenario, const Grid& grid) {
    std::vector<double> v(grid.size(), scenario.initial_value);
    if (scenario.initial_field) {
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = scenario.initial_field(grid.x(i), grid.y(i));
    }
    return v;
}

}  // namespace nfsim
