#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nfsim/grid.hpp"
#include "nfsim/model.hpp"

namespace nfsim {

struct AssemblyOptions {
    /// Upper bound on the bytes a dense n^2 x n^2 matrix may take.
    std::size_t max_dense_bytes = std::size_t{4} << 30;
};

/// Discrete integral operator (Nystrom at the quadrature nodes):
///
///   apply(s)_i = sum_j w_j K(x_i, x_j) s_j  ~  int_Omega K(x_i, y) s(y) dy
///
/// Dense form stores W_ij = w_j K(x_i, x_j). LowRank form interpolates the
/// integrand by tensor Lagrange polynomials of degree m-1 on an m x m
/// Gauss-Legendre subgrid and stores
///
///   left_{i,(a,b)} = sum_j w_j K(x_i, x_j) l_a(x_j) l_b(y_j)     (n^2 x m^2)
///   right          = P (x) P,  P_{a,j} = w_j l_a(x_j) / omega_a  (m^2 x n^2)
///
/// where P is the discrete L2 projection onto the 1D Lagrange basis. With
/// m = n the subgrid coincides with the grid and both factors reduce to the
/// dense matrix exactly.
///
/// Immutable after construction; apply() is safe to call concurrently.
class ConnectivityOperator {
public:
    enum class Form { Dense, LowRank };

    Form form() const noexcept { return form_; }
    bool is_low_rank() const noexcept { return form_ == Form::LowRank; }
    std::size_t size() const noexcept { return n2_; }
    /// Subgrid points per dimension (0 for dense).
    std::size_t rank() const noexcept { return m_; }
    const Grid& grid() const noexcept { return *grid_; }
    /// Sup-norm discrepancy against the dense apply on the probe vector used
    /// at assembly time (0 for dense operators).
    double rank_error_estimate() const noexcept { return rank_error_; }
    double probe_sup_norm() const noexcept { return probe_sup_; }

    /// out = operator * s. Rows are partitioned across OpenMP workers; every row
    /// is summed left to right so the result does not depend on the partition.
    void apply(std::span<const double> s, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> s) const;

    /// Row i of the (effective) n^2 x n^2 matrix. Low-rank operators must be
    /// materialised first.
    std::span<const double> row(std::size_t i) const;
    /// Diagonal of the effective matrix (works for both forms).
    std::vector<double> diagonal() const;
    bool has_rows() const noexcept { return !dense_.empty(); }
    /// Builds the explicit n^2 x n^2 matrix left * right for low-rank
    /// operators. Needed when each target row sees a different integrand, as
    /// with transmission delays. No-op for dense operators.
    void materialize_rows();

    // Factor access for tests and benchmarks.
    std::span<const double> left_factor() const noexcept { return left_; }
    std::span<const double> projection_1d() const noexcept { return projection_; }

private:
    friend ConnectivityOperator assemble_dense(std::shared_ptr<const Grid>, const KernelSpec&,
                                               const AssemblyOptions&);
    friend ConnectivityOperator assemble_low_rank(std::shared_ptr<const Grid>, const KernelSpec&,
                                                  std::size_t, std::span<const double>);

    ConnectivityOperator() = default;

    Form form_ = Form::Dense;
    std::shared_ptr<const Grid> grid_;
    std::size_t n_ = 0;   // points per dimension
    std::size_t n2_ = 0;  // total points
    std::size_t m_ = 0;
    double rank_error_ = 0.0;
    double probe_sup_ = 0.0;

    std::vector<double> dense_;       // n2 x n2, row-major
    std::vector<double> left_;        // n2 x m^2, row-major
    std::vector<double> projection_;  // m x n, row-major
};

ConnectivityOperator assemble_dense(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                    const AssemblyOptions& options = {});

/// probe: field vector used for rank_error_estimate. Empty selects a default
/// smooth non-polynomial probe.
ConnectivityOperator assemble_low_rank(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                       std::size_t m, std::span<const double> probe = {});

/// Dense apply computed on the fly from kernel_value, without storing W.
/// Used for the rank error estimate and as an independent reference.
std::vector<double> apply_on_the_fly(const Grid& grid, const KernelSpec& kernel,
                                     std::span<const double> s);

/// Default probe: 1 + 0.5 cos(pi x / L) sin(pi y / (2 L)) + 0.25 (x/L)^3.
std::vector<double> default_probe(const Grid& grid);

/// Low-rank acceptance rule: the estimate must not exceed ratio * sup|probe|.
inline constexpr double kLowRankFallbackRatio = 1e-2;

}  // namespace nfsim
