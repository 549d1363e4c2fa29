#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>

#include "nfsim/error.hpp"
#include "nfsim/operator.hpp"

using namespace nfsim;

namespace {

std::shared_ptr<const Grid> make_grid(double L, std::size_t n) { return std::make_shared<const Grid>(Domain{L}, n); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double l = 0.5 * (lo + mid), r = 0.5 * (mid + hi);
            const double fl = f(l), fr = f(r);
            const double left = (mid - lo) / 6 * (flo + 4 * fl + fmid);
            const double right = (hi - mid) / 6 * (fmid + 4 * fr + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
            return rec(lo, mid, flo, fl, fmid, left, d - 1) + rec(mid, hi, fmid, fr, fhi, right, d - 1);
        };
    return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth);
}

// int over [-L, L]^2 of a difference of Gaussians centred at p, in polar
// coordinates about p: the radial part is closed form, the angle adaptive.
double dog_mass_oracle(const DifferenceOfGaussians& k, double L, double px, double py) {
    const auto scale = [&](double xi) {
        return k.exponent == GaussianExponent::WithPi ? 2 * std::numbers::pi * xi * xi : 2 * xi * xi;
    };
    const double s1 = scale(k.xi1), s2 = scale(k.xi2);
    const double n1 = 1 / std::sqrt(2 * std::numbers::pi * k.xi1 * k.xi1);
    const double n2 = k.amplitude_ratio / std::sqrt(2 * std::numbers::pi * k.xi2 * k.xi2);
    const auto exit_radius = [&](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        double r = 1e300;
        if (c > 0) r = std::min(r, (L - px) / c);
        if (c < 0) r = std::min(r, (-L - px) / c);
        if (s > 0) r = std::min(r, (L - py) / s);
        if (s < 0) r = std::min(r, (-L - py) / s);
        return r;
    };
    const auto radial = [&](double phi) {
        const double R = exit_radius(phi);
        return n1 * s1 / 2 * (1 - std::exp(-R * R / s1)) - n2 * s2 / 2 * (1 - std::exp(-R * R / s2));
    };
    // split at the corner directions where exit_radius has kinks
    std::vector<double> cuts{std::atan2(L - py, L - px), std::atan2(L - py, -L - px), std::atan2(-L - py, -L - px),
                             std::atan2(-L - py, L - px)};
    for (double& c : cuts)
        if (c < 0) c += 2 * std::numbers::pi;
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t q = 0; q < 4; ++q) {
        const double a = cuts[q];
        const double b = q + 1 < 4 ? cuts[q + 1] : cuts[0] + 2 * std::numbers::pi;
        total += adaptive_simpson(radial, a, b, 1e-13);
    }
    return total;
}

}  // namespace

TEST_CASE("dense: zero kernel") {
    const auto g = make_grid(1.0, 6);
    const auto op = assemble_dense(g, ConstantKernel{0.0});
    std::vector<double> s(g->size(), 1.7);
    for (double v : op.apply(s)) CHECK(v == 0.0);
}

TEST_CASE("dense: unit kernel integrates the area") {
    const auto g = make_grid(10.0, 12);
    const auto op = assemble_dense(g, ConstantKernel{1.0});
    std::vector<double> s(g->size(), 1.0);
    for (double v : op.apply(s)) CHECK(std::abs(v - 400.0) < 1e-9 * 400.0);
}

TEST_CASE("dense: unit vector picks a column; entries are w_j K(x_i, x_j)") {
    const auto g = make_grid(2.0, 5);
    const KernelSpec k = Breather{};
    const auto op = assemble_dense(g, k);
    for (std::size_t j : {0u, 7u, 24u}) {
        std::vector<double> e(g->size(), 0.0);
        e[j] = 1.0;
        const auto col = op.apply(e);
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double wij = g->weight(j) * kernel_value(k, g->x(i), g->y(i), g->x(j), g->y(j));
            CHECK(col[i] == doctest::Approx(wij).epsilon(1e-15));
            CHECK(op.row(i)[j] == col[i]);
        }
    }
}

TEST_CASE("dense: weight-scaled symmetry W_ij / w_j = W_ji / w_i") {
    const auto g = make_grid(10.0, 9);
    for (const KernelSpec& k : {KernelSpec{Hexagonal{}}, KernelSpec{DifferenceOfGaussians{}}, KernelSpec{Breather{}}}) {
        const auto op = assemble_dense(g, k);
        for (std::size_t i = 0; i < g->size(); ++i)
            for (std::size_t j = 0; j < g->size(); ++j) {
                const double a = op.row(i)[j] / g->weight(j), b = op.row(j)[i] / g->weight(i);
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
            }
    }
}

TEST_CASE("dense: capacity guard") {
    AssemblyOptions tiny;
    tiny.max_dense_bytes = 1024;
    try {
        assemble_dense(make_grid(1.0, 8), Breather{}, tiny);
        FAIL("expected capacity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Capacity);
    }
}

TEST_CASE("apply: dimension mismatch") {
    const auto op = assemble_dense(make_grid(1.0, 4), Breather{});
    std::vector<double> s(15, 0.0);
    try {
        op.apply(s);
        FAIL("expected dimension mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("apply: linear") {
    const auto g = make_grid(1.0, 10);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto dense = assemble_dense(g, DifferenceOfGaussians{});
    const auto lr = assemble_low_rank(g, DifferenceOfGaussians{}, 6);
    for (const auto* op : {&dense, &lr}) {
        std::vector<double> s(g->size()), v(g->size()), mix(g->size());
        for (auto& x : s) x = u(rng);
        for (auto& x : v) x = u(rng);
        const double a = 0.7, b = -1.3;
        for (std::size_t i = 0; i < s.size(); ++i) mix[i] = a * s[i] + b * v[i];
        const auto rs = op->apply(s), rv = op->apply(v), rm = op->apply(mix);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(rm[i] - (a * rs[i] + b * rv[i])) < 1e-12);
    }
}

TEST_CASE("apply: point-reflection symmetric input gives symmetric output") {
    const auto g = make_grid(10.0, 16);
    const auto op = assemble_dense(g, Hexagonal{});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> s(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
        const std::size_t j = apply_symmetry(*g, SquareSymmetry::Rotate180, i);
        if (j < i) continue;
        s[i] = s[j] = u(rng);
    }
    const auto r = op.apply(s);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(std::abs(r[i] - r[apply_symmetry(*g, SquareSymmetry::Rotate180, i)]) < 1e-12);
}

TEST_CASE("dense DoG mass matches an adaptive polar quadrature oracle") {
    // Printed-exponent kernel of the Mexican-hat example, L = 1, N = 48.
    const DifferenceOfGaussians k{0.1, 0.2, 1.0, GaussianExponent::WithPi};
    const auto g = make_grid(1.0, 48);
    const auto op = assemble_dense(g, k);
    const auto r = op.apply(std::vector<double>(g->size(), 1.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); i += 37) {
        if (std::abs(g->x(i)) > 0.5 || std::abs(g->y(i)) > 0.5) continue;
        worst = std::max(worst, std::abs(r[i] - dog_mass_oracle(k, 1.0, g->x(i), g->y(i))));
    }
    CHECK(worst < 1e-6);
    // The balanced-Gaussian claim does not hold for this normalisation: the
    // whole-plane integral is pi sqrt(2 pi) (xi1 - xi2).
    const double plane = std::numbers::pi * std::sqrt(2 * std::numbers::pi) * (0.1 - 0.2);
    CHECK(dog_mass_oracle(k, 50.0, 0.0, 0.0) == doctest::Approx(plane).epsilon(1e-9));
    CHECK(r[g->nearest(0, 0)] == doctest::Approx(dog_mass_oracle(k, 1.0, g->x(g->nearest(0, 0)), g->y(g->nearest(0, 0)))).epsilon(1e-6));
}

TEST_CASE("low-rank with m = N reproduces the dense operator") {
    const auto g = make_grid(1.0, 12);
    const auto dense = assemble_dense(g, DifferenceOfGaussians{});
    const auto lr = assemble_low_rank(g, DifferenceOfGaussians{}, 12);
    CHECK(lr.is_low_rank());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> s(g->size());
    for (auto& x : s) x = u(rng);
    CHECK(sup_diff(dense.apply(s), lr.apply(s)) < 1e-10);
    const auto diag = lr.diagonal();
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(diag[i] == doctest::Approx(dense.row(i)[i]).epsilon(1e-10));
}

TEST_CASE("low-rank: rank range") {
    const auto g = make_grid(1.0, 8);
    CHECK_THROWS_AS(assemble_low_rank(g, Breather{}, 1), Error);
    CHECK_THROWS_AS(assemble_low_rank(g, Breather{}, 9), Error);
}

TEST_CASE("low-rank: Mexican-hat presets at m = 12") {
    for (const char* id : {"ex1-case1-mu45-nodelay", "ex1-case2-mu15-nodelay"}) {
        CAPTURE(id);
        const Scenario sc = preset(id);
        const auto g = make_grid(sc.domain.half_width, sc.n_per_dim);
        const auto dense = assemble_dense(g, sc.kernel);
        const auto lr = assemble_low_rank(g, sc.kernel, sc.rank);
        CHECK(lr.rank_error_estimate() <= 1e-3);
        std::vector<double> s0(g->size(), firing_value(sc.firing, sc.initial_value));
        CHECK(sup_diff(dense.apply(s0), lr.apply(s0)) <= 1e-3);
        auto m = lr;
        m.materialize_rows();
        CHECK(sup_diff(m.apply(s0), lr.apply(s0)) < 1e-12);
    }
}

namespace {

double random_probe_discrepancy(const KernelSpec& k, double L, std::size_t n, std::size_t m) {
    const auto g = make_grid(L, n);
    const auto dense = assemble_dense(g, k);
    const auto lr = assemble_low_rank(g, k, m);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> s(g->size());
        for (auto& x : s) x = u(rng);
        worst = std::max(worst, sup_diff(dense.apply(s), lr.apply(s)));
    }
    return worst;
}

}  // namespace

TEST_CASE("property: random probes, printed-exponent Mexican hat, m = 12") {
    for (double xi1 : {0.1, 0.4}) {
        const DifferenceOfGaussians k{xi1, 0.2, 1.0, GaussianExponent::WithPi};
        CHECK(random_probe_discrepancy(k, 0.6, 48, 12) <= 1e-3);
    }
}

// The Case-1 preset kernel (conventional exponent, std 0.1 on a 1.2-wide
// square) has a numerical rank above 12 per direction; m = 16 is needed for
// the 1e-3 bound on unstructured probes. Smooth fields are unaffected.
TEST_CASE("property: random probes, Mexican-hat presets, m = 12" * doctest::may_fail()) {
    for (const char* id : {"ex1-case2-mu15-nodelay", "ex1-case1-mu45-nodelay"}) {
        CAPTURE(id);
        const Scenario sc = preset(id);
        CHECK(random_probe_discrepancy(sc.kernel, sc.domain.half_width, 48, 12) <= 1e-3);
    }
}

TEST_CASE("property: random probes, Case-1 preset kernel at m = 16") {
    const Scenario sc = preset("ex1-case1-mu45-nodelay");
    CHECK(random_probe_discrepancy(sc.kernel, sc.domain.half_width, 48, 16) <= 1e-3);
}

TEST_CASE("low-rank: sharp-input hexagonal scenario exceeds the fallback ratio") {
    const Scenario sc = preset("ex2-v10");
    const auto g = make_grid(sc.domain.half_width, sc.n_per_dim);
    std::vector<double> probe = sample_input(sc.input, *g);
    for (auto& v : probe) v = firing_value(sc.firing, v + sc.initial_value);
    const auto lr = assemble_low_rank(g, sc.kernel, sc.rank, probe);
    CHECK(lr.rank_error_estimate() > kLowRankFallbackRatio * lr.probe_sup_norm());
}

TEST_CASE("apply_on_the_fly matches the stored dense matrix") {
    const auto g = make_grid(3.0, 7);
    const auto op = assemble_dense(g, Breather{});
    const auto s = default_probe(*g);
    const auto a = op.apply(s), b = apply_on_the_fly(*g, Breather{}, s);
    CHECK(sup_diff(a, b) < 1e-13);
}
