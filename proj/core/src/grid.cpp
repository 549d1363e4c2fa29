#include "nfsim/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nfsim/error.hpp"

namespace nfsim {

namespace {

// Legendre P_n(t) and its derivative by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(std::size_t n, double t) {
    double p0 = 1.0;
    double p1 = t;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    const double dp = static_cast<double>(n) * (t * p1 - p0) / (t * t - 1.0);
    return {p1, dp};
}

}  // namespace

QuadratureRule legendre_rule(std::size_t n, double a, double b) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "legendre_rule: n must be >= 1");
    if (!(a < b)) fail(ErrorKind::InvalidArgument, "legendre_rule: require a < b");

    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    // Only the upper half is solved for; the lower half is its mirror image so
    // symmetric grids stay symmetric bit-for-bit.
    for (std::size_t k = 0; k < n / 2; ++k) {
        double t = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre_with_derivative(n, t);
            const double dt = p / dp;
            t -= dt;
            if (std::abs(dt) < 4.0 * std::numeric_limits<double>::epsilon()) break;
        }
        const auto [p, dp] = legendre_with_derivative(n, t);
        (void)p;
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.nodes[n - 1 - k] = mid + half * t;
        rule.nodes[k] = mid - half * t;
        rule.weights[k] = rule.weights[n - 1 - k] = half * w;
    }
    if (n % 2 == 1) {
        const auto [p, dp] = legendre_with_derivative(n, 0.0);
        (void)p;
        rule.nodes[n / 2] = mid;
        rule.weights[n / 2] = half * 2.0 / (dp * dp);
    }
    return rule;
}

Grid::Grid(Domain domain, std::size_t n_per_dim) : domain_(domain), n_(n_per_dim) {
    if (!(domain.half_width > 0.0) || !std::isfinite(domain.half_width)) {
        fail(ErrorKind::InvalidArgument, "grid: domain half width must be positive");
    }
    if (n_per_dim < 2) {
        fail(ErrorKind::InvalidArgument,
             "grid: n_per_dim must be >= 2, got " + std::to_string(n_per_dim));
    }
    rule_ = legendre_rule(n_, -domain.half_width, domain.half_width);
    weights_2d_.resize(n_ * n_);
    for (std::size_t ix = 0; ix < n_; ++ix) {
        for (std::size_t iy = 0; iy < n_; ++iy) {
            weights_2d_[index(ix, iy)] = rule_.weights[ix] * rule_.weights[iy];
        }
    }
}

double Grid::norm(std::size_t i) const noexcept { return std::hypot(x(i), y(i)); }

std::size_t Grid::nearest(double px, double py) const noexcept {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = std::hypot(x(i) - px, y(i) - py);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double Grid::central_spacing() const noexcept {
    const std::size_t mid = n_ / 2;
    return rule_.nodes[mid] - rule_.nodes[mid - 1];
}

Grid build_grid(Domain domain, std::size_t n_per_dim) { return Grid(domain, n_per_dim); }

std::size_t apply_symmetry(const Grid& grid, SquareSymmetry g, std::size_t i) noexcept {
    const std::size_t n = grid.n_per_dim();
    const auto [ix, iy] = grid.split(i);
    const std::size_t rx = n - 1 - ix;
    const std::size_t ry = n - 1 - iy;
    switch (g) {
        case SquareSymmetry::Identity: return i;
        case SquareSymmetry::Rotate90: return grid.index(ry, ix);
        case SquareSymmetry::Rotate180: return grid.index(rx, ry);
        case SquareSymmetry::Rotate270: return grid.index(iy, rx);
        case SquareSymmetry::FlipX: return grid.index(rx, iy);
        case SquareSymmetry::FlipY: return grid.index(ix, ry);
        case SquareSymmetry::Transpose: return grid.index(iy, ix);
        case SquareSymmetry::AntiTranspose: return grid.index(ry, rx);
    }
    return i;
}

}  // namespace nfsim
