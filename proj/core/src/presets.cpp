#include <cmath>
#include <numbers>

#include "nfsim/error.hpp"
#include "nfsim/model.hpp"

namespace nfsim {

namespace {

// Mexican-hat family. The sigmoid is centred (S(0) = 0) so that V = 0 is an
// equilibrium whose stability depends on mu, and the Gaussians use the
// conventional exponent. L = 0.6 places the mu thresholds between the paired
// variants of both cases.
constexpr double kEx1HalfWidth = 0.6;

// Hexagonal front family. c is not given for this experiment; 0.1 lets the
// centre cross V_th within the first step while the fixed-point map stays
// contractive at h_t = 0.08.
constexpr double kEx2TimeConstant = 0.1;

Scenario ex1(int kase, double mu, double velocity) {
    Scenario s;
    DifferenceOfGaussians k;
    k.xi1 = kase == 1 ? 0.1 : 0.4;
    k.xi2 = 0.2;
    k.amplitude_ratio = 1.0;
    k.exponent = GaussianExponent::Conventional;
    s.kernel = k;
    s.firing = FiringSpec{2.0, mu, 0.0, 1.0};
    s.input = InputSpec{};
    s.velocity = velocity;
    s.domain = Domain{kEx1HalfWidth};
    s.n_per_dim = 48;
    s.rank = 12;
    s.h_t = 0.5;
    s.t_final = 75.0;
    s.initial_value = 0.01;
    s.snapshot_times = {30.0, 45.0, 60.0, 75.0};
    return s;
}

Scenario ex2(double velocity) {
    Scenario s;
    s.kernel = Hexagonal{1.5, std::numbers::pi, 10.0};
    s.firing = FiringSpec{2.0, 5.5, 3.0, 0.0};
    InputSpec in;
    in.baseline = 2.0;
    in.bump_amplitude = 1.0;
    in.bump_width = 0.2;
    in.normalization = InputNormalization::InversePiSigmaSq;
    // A sigma = 0.2 bump falls between the 48 Gauss nodes; cell averages keep
    // its mass on the grid.
    in.sampling = InputSampling::CellAverage;
    s.input = in;
    s.c = kEx2TimeConstant;
    s.velocity = velocity;
    s.domain = Domain{10.0};
    s.n_per_dim = 48;
    // Rank reduction is requested and rejected by the fallback rule.
    s.rank = 12;
    s.h_t = 0.08;
    s.t_final = 0.96;
    s.initial_value = 0.0;
    s.snapshot_times = {0.08, 0.24, 0.48, 0.96};
    s.activity_threshold = 2.1;
    return s;
}

Scenario ex3(double velocity) {
    Scenario s;
    s.kernel = Breather{};
    s.firing = FiringSpec{2.0, 10000.0, 0.005, 0.0};
    InputSpec in;
    in.bump_amplitude = 5.0;
    in.bump_width = std::sqrt(32.0);
    in.normalization = InputNormalization::InversePiSigmaSq;
    s.input = in;
    s.velocity = velocity;
    s.domain = Domain{20.0};
    s.n_per_dim = 48;
    s.rank = 24;
    s.h_t = 0.02;
    s.t_final = 1.6;
    s.initial_value = 0.0;
    s.snapshot_times = {0.08, 0.4, 0.8, 1.2, 1.6};
    return s;
}

struct Entry {
    PresetInfo info;
    Scenario (*make)();
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {{"ex1-case1-mu45-nodelay", "Mexican hat case 1, mu=45, no delay"}, [] { return ex1(1, 45, kNoDelay); }},
        {{"ex1-case1-mu45-v1", "Mexican hat case 1, mu=45, v=1"}, [] { return ex1(1, 45, 1.0); }},
        {{"ex1-case1-mu15-nodelay", "Mexican hat case 1, mu=15, no delay"}, [] { return ex1(1, 15, kNoDelay); }},
        {{"ex1-case1-mu15-v1", "Mexican hat case 1, mu=15, v=1"}, [] { return ex1(1, 15, 1.0); }},
        {{"ex1-case2-mu15-nodelay", "Mexican hat case 2, mu=15, no delay"}, [] { return ex1(2, 15, kNoDelay); }},
        {{"ex1-case2-mu15-v0.1", "Mexican hat case 2, mu=15, v=0.1"}, [] { return ex1(2, 15, 0.1); }},
        {{"ex1-case2-mu10-nodelay", "Mexican hat case 2, mu=10, no delay"}, [] { return ex1(2, 10, kNoDelay); }},
        {{"ex1-case2-mu10-v0.1", "Mexican hat case 2, mu=10, v=0.1"}, [] { return ex1(2, 10, 0.1); }},
        {{"ex2-v10", "hexagonal front, v=10"}, [] { return ex2(10.0); }},
        {{"ex2-v20", "hexagonal front, v=20"}, [] { return ex2(20.0); }},
        {{"ex2-nodelay", "hexagonal front, no delay"}, [] { return ex2(kNoDelay); }},
        {{"ex3-v50", "breather, v=50"}, [] { return ex3(50.0); }},
        {{"ex3-nodelay", "breather, no delay"}, [] { return ex3(kNoDelay); }},
    };
    return entries;
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog = [] {
        std::vector<PresetInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return catalog;
}

Scenario preset(const std::string& id) {
    for (const auto& e : registry()) {
        if (e.info.id == id) {
            Scenario s = e.make();
            s.name = id;
            return s;
        }
    }
    fail(ErrorKind::UnknownPreset, "unknown preset '" + id + "'");
}

}  // namespace nfsim
