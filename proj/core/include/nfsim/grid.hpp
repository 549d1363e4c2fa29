#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace nfsim {

/// Square domain [-L, L]^2.
struct Domain {
    double half_width = 1.0;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Nodes are increasing and the rule is
/// mirror-symmetric about (a+b)/2 to the last bit.
QuadratureRule legendre_rule(std::size_t n, double a, double b);

/// Tensor-product Gauss-Legendre grid. Point index i = ix * n + iy (row-major
/// over (ix, iy)); every matrix and field vector in the library uses this
/// flattening.
class Grid {
public:
    Grid(Domain domain, std::size_t n_per_dim);

    std::size_t n_per_dim() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ * n_; }
    const Domain& domain() const noexcept { return domain_; }
    double half_width() const noexcept { return domain_.half_width; }

    const std::vector<double>& nodes_1d() const noexcept { return rule_.nodes; }
    const std::vector<double>& weights_1d() const noexcept { return rule_.weights; }

    std::size_t index(std::size_t ix, std::size_t iy) const noexcept { return ix * n_ + iy; }
    std::pair<std::size_t, std::size_t> split(std::size_t i) const noexcept { return {i / n_, i % n_}; }

    double x(std::size_t i) const noexcept { return rule_.nodes[i / n_]; }
    double y(std::size_t i) const noexcept { return rule_.nodes[i % n_]; }
    double weight(std::size_t i) const noexcept { return weights_2d_[i]; }
    const std::vector<double>& weights_2d() const noexcept { return weights_2d_; }

    /// Euclidean norm of node i.
    double norm(std::size_t i) const noexcept;
    /// Index of the node closest to (px, py).
    std::size_t nearest(double px, double py) const noexcept;
    /// Distance between the two innermost 1D nodes (the coarsest spacing of a
    /// Gauss-Legendre rule sits at the centre).
    double central_spacing() const noexcept;

private:
    Domain domain_;
    std::size_t n_;
    QuadratureRule rule_;
    std::vector<double> weights_2d_;
};

Grid build_grid(Domain domain, std::size_t n_per_dim);

/// The eight symmetries of the square acting on node indices.
enum class SquareSymmetry {
    Identity,
    Rotate90,
    Rotate180,
    Rotate270,
    FlipX,      // x -> -x
    FlipY,      // y -> -y
    Transpose,  // x <-> y
    AntiTranspose,
};

inline constexpr SquareSymmetry kAllSquareSymmetries[] = {
    SquareSymmetry::Identity,  SquareSymmetry::Rotate90, SquareSymmetry::Rotate180,
    SquareSymmetry::Rotate270, SquareSymmetry::FlipX,    SquareSymmetry::FlipY,
    SquareSymmetry::Transpose, SquareSymmetry::AntiTranspose,
};

std::size_t apply_symmetry(const Grid& grid, SquareSymmetry g, std::size_t i) noexcept;

}  // namespace nfsim
