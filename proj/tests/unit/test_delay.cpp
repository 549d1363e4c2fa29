#include <doctest.h>

#include <cmath>
#include <limits>

#include "nfsim/delay.hpp"
#include "nfsim/error.hpp"

using namespace nfsim;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("delays: distance over speed") {
    const Grid g = build_grid(Domain{10.0}, 8);
    const DelayTable t = compute_delays(g, 10.0, 0.08);
    for (std::size_t i = 0; i < g.size(); i += 5)
        for (std::size_t j = 0; j < g.size(); j += 3) {
            const double d = std::hypot(g.x(i) - g.x(j), g.y(i) - g.y(j));
            CHECK(t.tau(i, j) == doctest::Approx(d / 10.0).epsilon(1e-15));
            CHECK(t.tau(i, j) == t.tau(j, i));
            const double steps = std::floor(t.tau(i, j) / 0.08);
            CHECK(t.steps(i, j) == static_cast<int>(steps));
            CHECK(t.fraction(i, j) >= 0.0);
            CHECK(t.fraction(i, j) < 1.0);
            CHECK((t.steps(i, j) + t.fraction(i, j)) * 0.08 == doctest::Approx(t.tau(i, j)).epsilon(1e-12));
        }
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(t.tau(i, i) == 0.0);
}

TEST_CASE("delays: a pair five apart at v = 10 is half a time unit") {
    // nodes (x, y) and (x, y') with |y - y'| read off the grid, scaled to 5
    const Grid g = build_grid(Domain{2.5}, 2);
    const double gap = g.nodes_1d()[1] - g.nodes_1d()[0];
    const DelayTable t = compute_delays(g, 10.0 * gap / 5.0, 0.1);
    CHECK(t.tau(g.index(0, 0), g.index(0, 1)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("delays: infinite speed means no table") {
    const Grid g = build_grid(Domain{1.0}, 6);
    const DelayTable t = compute_delays(g, std::numeric_limits<double>::infinity(), 0.1);
    CHECK_FALSE(t.has_delay());
    CHECK(t.tau_max() == 0.0);
    CHECK(t.required_depth() == 2);
    CHECK(t.tau(3, 17) == 0.0);
}

TEST_CASE("delays: tau_max on the L = 10 grid") {
    const Grid g = build_grid(Domain{10.0}, 48);
    const DelayTable t = compute_delays(g, 10.0, 0.08);
    CHECK(t.tau_max() <= 2 * std::sqrt(2.0));
    const std::size_t a = g.index(0, 0), b = g.index(47, 47);
    CHECK(t.tau(a, b) == t.tau_max());
    CHECK(t.required_depth() == static_cast<std::size_t>(std::ceil(t.tau_max() / 0.08)) + 2);
}

TEST_CASE("delays: near pairs are the zero-step pairs") {
    const Grid g = build_grid(Domain{1.0}, 6);
    const DelayTable t = compute_delays(g, 3.0, 0.2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < g.size(); ++j) count += t.steps(i, j) == 0;
        CHECK(t.near_pairs(i).size() == count);
        for (auto j : t.near_pairs(i)) CHECK(t.steps(i, j) == 0);
    }
}

TEST_CASE("delays: argument errors") {
    const Grid g = build_grid(Domain{1.0}, 4);
    CHECK(kind_of([&] { compute_delays(g, 0.0, 0.1); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { compute_delays(g, -1.0, 0.1); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { compute_delays(g, 1.0, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("history: push, sample, evict") {
    const double h = 0.1;
    HistoryBuffer buf(2, h, 3, {0.01, 0.01});
    buf.push(0.0, std::vector<double>{1.0, 10.0});
    buf.push(h, std::vector<double>{3.0, 30.0});
    CHECK(buf.at_step(0)[0] == 1.0);
    CHECK(buf.at_step(1)[1] == 30.0);
    CHECK(sample_at(buf, 0, 0.5 * h) == doctest::Approx(2.0));
    CHECK(sample_at(buf, 1, -0.3) == 0.01);

    buf.push(2 * h, std::vector<double>{5.0, 50.0});
    buf.push(3 * h, std::vector<double>{7.0, 70.0});
    CHECK(buf.stored() == 3);
    CHECK(buf.earliest_step() == 1);
    CHECK(buf.latest_step() == 3);
    CHECK(kind_of([&] { buf.at_step(0); }) == ErrorKind::HistoryUnderrun);
    CHECK(kind_of([&] { buf.at_step(4); }) == ErrorKind::HistoryUnderrun);
    CHECK(buf.at_step(-2)[0] == 0.01);
}

TEST_CASE("history: time stamps must advance by h") {
    HistoryBuffer buf(1, 0.5, 4, {0.0});
    CHECK(kind_of([&] { buf.push(0.5, std::vector<double>{1.0}); }) == ErrorKind::NonMonotoneTime);
    buf.push(0.0, std::vector<double>{1.0});
    CHECK(kind_of([&] { buf.push(0.0, std::vector<double>{1.0}); }) == ErrorKind::NonMonotoneTime);
    CHECK(kind_of([&] { buf.push(1.0, std::vector<double>{1.0}); }) == ErrorKind::NonMonotoneTime);
    CHECK_NOTHROW(buf.push(0.5, std::vector<double>{2.0}));
    CHECK(kind_of([&] { buf.push(1.0, std::vector<double>{1.0, 2.0}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("history: exact record hits are returned bitwise") {
    const Grid g = build_grid(Domain{1.0}, 4);
    const double h = 0.1;
    HistoryBuffer buf(g.size(), h, 8, std::vector<double>(g.size(), 0.0));
    std::vector<double> f(g.size());
    for (int k = 0; k < 5; ++k) {
        for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::sin(0.1 * j + k) / 3.0;
        buf.push(k * h, f);
    }
    const DelayTable none = compute_delays(g, std::numeric_limits<double>::infinity(), h);
    const auto latest = sample_delayed(buf, none, 2, 4 * h);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(latest[j] == buf.at_step(4)[j]);
    for (long k = 0; k <= 4; ++k)
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(sample_at(buf, j, k * h) == buf.at_step(k)[j]);
}

TEST_CASE("history: initial history before t = 0") {
    const Grid g = build_grid(Domain{1.0}, 2);
    const double h = 0.1;
    const double gap = g.nodes_1d()[1] - g.nodes_1d()[0];
    const DelayTable t = compute_delays(g, gap / (5 * h), h);  // neighbours 5 steps apart
    const std::size_t i = g.index(0, 0), j = g.index(0, 1);
    CHECK(t.tau(i, j) == doctest::Approx(5 * h));
    HistoryBuffer buf(g.size(), h, t.required_depth(), std::vector<double>(g.size(), 0.01));
    buf.push(0.0, std::vector<double>(g.size(), 0.01));
    buf.push(h, std::vector<double>(g.size(), 0.5));
    const auto s = sample_delayed(buf, t, i, h);
    CHECK(s[j] == 0.01);
    CHECK(s[i] == 0.5);
}

TEST_CASE("property: linear-in-time fields are sampled exactly") {
    const Grid g = build_grid(Domain{2.0}, 6);
    const double h = 0.05;
    const DelayTable table = compute_delays(g, 7.0, h);
    HistoryBuffer buf(g.size(), h, table.required_depth() + 3, std::vector<double>(g.size(), 0.0));
    const auto field = [&](std::size_t j, double t) { return 0.3 + 1.7 * t - 0.4 * t * (j % 5); };
    std::vector<double> f(g.size());
    const long last = static_cast<long>(table.required_depth()) + 4;
    for (long k = 0; k <= last; ++k) {
        for (std::size_t j = 0; j < g.size(); ++j) f[j] = field(j, k * h);
        buf.push(k * h, f);
    }
    const double t_now = last * h;
    for (std::size_t i = 0; i < g.size(); i += 4) {
        const auto s = sample_delayed(buf, table, i, t_now);
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(s[j] - field(j, t_now - table.tau(i, j))) < 1e-12);
    }
    // memory bound: depth fields of n^2 values
    CHECK(buf.depth() * buf.field_size() == (table.required_depth() + 3) * g.size());
}

TEST_CASE("history head extends past the newest record") {
    HistoryBuffer buf(1, 1.0, 4, {0.0});
    buf.push(0.0, std::vector<double>{2.0});
    const std::vector<double> v{4.0};
    const HistoryHead head{1.0, v};
    CHECK(sample_at(buf, 0, 0.25, &head) == doctest::Approx(2.5));
    CHECK(sample_at(buf, 0, 1.0, &head) == 4.0);
}

TEST_CASE("history: accumulated times far into a long run hit the stored records") {
    const double h = 0.1 / 8192;
    HistoryBuffer buf(1, h, 4, {0.0});
    double t = 0.0;
    for (long k = 0; k <= 20000; ++k) {
        buf.push(static_cast<double>(k) * h, std::vector<double>{static_cast<double>(k)});
        if (k) t += h;
        CHECK_NOTHROW(sample_at(buf, 0, t));
    }
    CHECK(sample_at(buf, 0, t) == doctest::Approx(20000.0));
}
