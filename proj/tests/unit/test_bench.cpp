#include <doctest.h>

#include <sstream>

#include "nfsim/bench.hpp"
#include "nfsim/error.hpp"

using namespace nfsim;

TEST_CASE("scalar decay through the solver is second order") {
    const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
    const ConvergenceResult r = scalar_decay_study(hs);
    REQUIRE(r.errors.size() == 4);
    REQUIRE(r.ratios.size() == 3);
    CHECK(r.order == doctest::Approx(2.0).epsilon(5e-3));
    for (double q : r.ratios) CHECK(q == doctest::Approx(4.0).epsilon(2e-2));

    const ConvergenceResult e = scalar_decay_study(hs, 2.0, TimeScheme::ImplicitEuler);
    CHECK(e.order == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bench_apply reports one dense and one low-rank row per size") {
    const std::vector<std::size_t> sizes{8, 12};
    const auto rows = bench_apply(sizes, DifferenceOfGaussians{}, 0.6, 6, 3);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.median_seconds > 0.0);
        CHECK((r.form == "dense" || r.form == "low-rank"));
    }
    CHECK(bench_apply(sizes, DifferenceOfGaussians{}, 0.6, 0, 1).size() == 2);

    std::ostringstream out;
    write_bench_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line.find("n_per_dim") != std::string::npos);
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 4);
}
