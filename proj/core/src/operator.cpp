#include "nfsim/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nfsim/error.hpp"
#include "nfsim/parallel.hpp"

namespace nfsim {

namespace {

// l_a(x) for the Lagrange basis on nodes z, as a product of ratios so large
// degree does not overflow. Exactly 0 or 1 at the nodes themselves.
double lagrange_basis(const std::vector<double>& z, std::size_t a, double x) {
    double v = 1.0;
    for (std::size_t b = 0; b < z.size(); ++b) {
        if (b == a) continue;
        v *= (x - z[b]) / (z[a] - z[b]);
    }
    return v;
}

void check_size(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        fail(ErrorKind::DimensionMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                               " entries, got " + std::to_string(got));
    }
}

}  // namespace

ConnectivityOperator assemble_dense(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                    const AssemblyOptions& options) {
    validate(kernel);
    const std::size_t n2 = grid->size();
    const double bytes = static_cast<double>(n2) * static_cast<double>(n2) * sizeof(double);
    if (bytes > static_cast<double>(options.max_dense_bytes)) {
        fail(ErrorKind::Capacity, "assemble_dense: " + std::to_string(n2) + "^2 matrix exceeds the " +
                                      std::to_string(options.max_dense_bytes) + "-byte bound");
    }

    ConnectivityOperator op;
    op.form_ = ConnectivityOperator::Form::Dense;
    op.grid_ = grid;
    op.n_ = grid->n_per_dim();
    op.n2_ = n2;
    op.dense_.resize(n2 * n2);

    const Grid& g = *grid;
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2; ++i) {
        double* row = op.dense_.data() + i * n2;
        const double xi = g.x(i);
        const double yi = g.y(i);
        for (std::size_t j = 0; j < n2; ++j) {
            row[j] = g.weight(j) * kernel_value(kernel, xi, yi, g.x(j), g.y(j));
        }
    }
    return op;
}

std::vector<double> apply_on_the_fly(const Grid& grid, const KernelSpec& kernel,
                                     std::span<const double> s) {
    const std::size_t n2 = grid.size();
    check_size(n2, s.size(), "apply_on_the_fly");
    std::vector<double> out(n2, 0.0);
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            acc += grid.weight(j) * kernel_value(kernel, grid.x(i), grid.y(i), grid.x(j), grid.y(j)) * s[j];
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> default_probe(const Grid& grid) {
    const double L = grid.half_width();
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid.x(i) / L;
        const double v = grid.y(i) / L;
        p[i] = 1.0 + 0.5 * std::cos(std::numbers::pi * u) * std::sin(0.5 * std::numbers::pi * v) +
               0.25 * u * u * u;
    }
    return p;
}

ConnectivityOperator assemble_low_rank(std::shared_ptr<const Grid> grid, const KernelSpec& kernel,
                                       std::size_t m, std::span<const double> probe) {
    validate(kernel);
    const std::size_t n = grid->n_per_dim();
    if (m < 2 || m > n) {
        fail(ErrorKind::InvalidArgument,
             "assemble_low_rank: m must lie in [2, " + std::to_string(n) + "], got " + std::to_string(m));
    }
    const Grid& g = *grid;
    const std::size_t n2 = g.size();
    const std::size_t m2 = m * m;

    ConnectivityOperator op;
    op.form_ = ConnectivityOperator::Form::LowRank;
    op.grid_ = grid;
    op.n_ = n;
    op.n2_ = n2;
    op.m_ = m;

    const double L = g.half_width();
    const QuadratureRule sub = legendre_rule(m, -L, L);
    const auto& x = g.nodes_1d();
    const auto& w = g.weights_1d();

    // basis(j, a) = l_a(x_j), n x m.
    std::vector<double> basis(n * m);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t a = 0; a < m; ++a) basis[j * m + a] = lagrange_basis(sub.nodes, a, x[j]);

    op.projection_.resize(m * n);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t j = 0; j < n; ++j)
            op.projection_[a * n + j] = (w[j] * basis[j * m + a]) / sub.weights[a];

    op.left_.assign(n2 * m2, 0.0);
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2; ++i) {
        std::vector<double> kw(n2);
        std::vector<double> t(m * n, 0.0);  // t(a, j2) = sum_j1 l_a(x_j1) kw(j1, j2)
        const double xi = g.x(i);
        const double yi = g.y(i);
        for (std::size_t j = 0; j < n2; ++j) kw[j] = g.weight(j) * kernel_value(kernel, xi, yi, g.x(j), g.y(j));
        for (std::size_t a = 0; a < m; ++a) {
            double* ta = t.data() + a * n;
            for (std::size_t j1 = 0; j1 < n; ++j1) {
                const double la = basis[j1 * m + a];
                if (la == 0.0) continue;
                const double* kr = kw.data() + j1 * n;
                for (std::size_t j2 = 0; j2 < n; ++j2) ta[j2] += la * kr[j2];
            }
        }
        double* li = op.left_.data() + i * m2;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                double acc = 0.0;
                for (std::size_t j2 = 0; j2 < n; ++j2) acc += t[a * n + j2] * basis[j2 * m + b];
                li[a * m + b] = acc;
            }
        }
    }

    std::vector<double> p = probe.empty() ? default_probe(g) : std::vector<double>(probe.begin(), probe.end());
    check_size(n2, p.size(), "assemble_low_rank probe");
    const std::vector<double> reference = apply_on_the_fly(g, kernel, p);
    const std::vector<double> approx = op.apply(p);
    double err = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
        err = std::max(err, std::abs(reference[i] - approx[i]));
        sup = std::max(sup, std::abs(p[i]));
    }
    op.rank_error_ = err;
    op.probe_sup_ = sup;
    return op;
}

void ConnectivityOperator::apply(std::span<const double> s, std::span<double> out) const {
    check_size(n2_, s.size(), "apply input");
    check_size(n2_, out.size(), "apply output");
    if (!dense_.empty() && form_ == Form::Dense) {
        NFSIM_PARALLEL_FOR
        for (std::size_t i = 0; i < n2_; ++i) {
            const double* row = dense_.data() + i * n2_;
            double acc = 0.0;
            for (std::size_t j = 0; j < n2_; ++j) acc += row[j] * s[j];
            out[i] = acc;
        }
        return;
    }

    // coeff = (P (x) P) s, contracted one dimension at a time.
    const std::size_t n = n_;
    const std::size_t m = m_;
    std::vector<double> tmp(n * m);  // tmp(j1, b) = sum_j2 P(b, j2) s(j1, j2)
    for (std::size_t j1 = 0; j1 < n; ++j1) {
        for (std::size_t b = 0; b < m; ++b) {
            double acc = 0.0;
            const double* pb = projection_.data() + b * n;
            const double* sj = s.data() + j1 * n;
            for (std::size_t j2 = 0; j2 < n; ++j2) acc += pb[j2] * sj[j2];
            tmp[j1 * m + b] = acc;
        }
    }
    std::vector<double> coeff(m * m);
    for (std::size_t a = 0; a < m; ++a) {
        const double* pa = projection_.data() + a * n;
        for (std::size_t b = 0; b < m; ++b) {
            double acc = 0.0;
            for (std::size_t j1 = 0; j1 < n; ++j1) acc += pa[j1] * tmp[j1 * m + b];
            coeff[a * m + b] = acc;
        }
    }
    const std::size_t m2 = m * m;
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2_; ++i) {
        const double* li = left_.data() + i * m2;
        double acc = 0.0;
        for (std::size_t k = 0; k < m2; ++k) acc += li[k] * coeff[k];
        out[i] = acc;
    }
}

std::vector<double> ConnectivityOperator::apply(std::span<const double> s) const {
    std::vector<double> out(n2_);
    apply(s, out);
    return out;
}

std::span<const double> ConnectivityOperator::row(std::size_t i) const {
    if (dense_.empty()) fail(ErrorKind::InvalidArgument, "operator rows requested before materialize_rows()");
    if (i >= n2_) fail(ErrorKind::DimensionMismatch, "operator row index out of range");
    return {dense_.data() + i * n2_, n2_};
}

std::vector<double> ConnectivityOperator::diagonal() const {
    std::vector<double> d(n2_);
    if (!dense_.empty()) {
        for (std::size_t i = 0; i < n2_; ++i) d[i] = dense_[i * n2_ + i];
        return d;
    }
    const std::size_t n = n_;
    const std::size_t m = m_;
    for (std::size_t i = 0; i < n2_; ++i) {
        const std::size_t ix = i / n;
        const std::size_t iy = i % n;
        const double* li = left_.data() + i * m * m;
        double acc = 0.0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                acc += li[a * m + b] * projection_[a * n + ix] * projection_[b * n + iy];
        d[i] = acc;
    }
    return d;
}

void ConnectivityOperator::materialize_rows() {
    if (!dense_.empty()) return;
    const std::size_t n = n_;
    const std::size_t m = m_;
    dense_.resize(n2_ * n2_);
    NFSIM_PARALLEL_FOR
    for (std::size_t i = 0; i < n2_; ++i) {
        const double* li = left_.data() + i * m * m;
        std::vector<double> u(m * n, 0.0);  // u(a, j2) = sum_b L_i(a, b) P(b, j2)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                const double lab = li[a * m + b];
                const double* pb = projection_.data() + b * n;
                for (std::size_t j2 = 0; j2 < n; ++j2) u[a * n + j2] += lab * pb[j2];
            }
        double* row = dense_.data() + i * n2_;
        for (std::size_t j1 = 0; j1 < n; ++j1)
            for (std::size_t j2 = 0; j2 < n; ++j2) {
                double acc = 0.0;
                for (std::size_t a = 0; a < m; ++a) acc += projection_[a * n + j1] * u[a * n + j2];
                row[j1 * n + j2] = acc;
            }
    }
}

}  // namespace nfsim
