#include "nfsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "nfsim/error.hpp"

namespace nfsim {

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;

    std::string name() const { return section.empty() ? key : section + "." + key; }
};

[[noreturn]] void config_error(const Entry& e, const std::string& what) {
    fail(ErrorKind::Config, "line " + std::to_string(e.line) + ": " + e.name() + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"') quoted = !quoted;
        if (!quoted && s[k] == '#') return s.substr(0, k);
    }
    return s;
}

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> out;
    std::string section;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) fail(ErrorKind::Config, where + "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(ErrorKind::Config, where + "expected key = value");
        Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) fail(ErrorKind::Config, where + "missing key");
        if (e.value.empty()) config_error(e, "missing value");
        if (const auto [it, fresh] = seen.emplace(e.name(), line_no); !fresh)
            config_error(e, "duplicate key (first set on line " + std::to_string(it->second) + ")");
        out.push_back(std::move(e));
    }
    return out;
}

double parse_number(const Entry& e, std::string_view s) {
    s = trim(s);
    if (s == "inf" || s == "infinity" || s == "\"inf\"") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) config_error(e, "expected a number, got '" + std::string(s) + "'");
    return v;
}

double number(const Entry& e) { return parse_number(e, e.value); }

std::size_t count(const Entry& e) {
    const double v = number(e);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) config_error(e, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string text_value(const Entry& e) {
    const std::string& v = e.value;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (v.find('"') != std::string::npos) config_error(e, "unbalanced quotes");
    return v;
}

bool boolean(const Entry& e) {
    const std::string v = text_value(e);
    if (v == "true") return true;
    if (v == "false") return false;
    config_error(e, "expected true or false");
}

std::vector<double> number_list(const Entry& e) {
    const std::string_view v = e.value;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') config_error(e, "expected a list [a, b, ...]");
    std::vector<double> out;
    std::string_view body = trim(v.substr(1, v.size() - 2));
    while (!body.empty()) {
        const auto comma = body.find(',');
        out.push_back(parse_number(e, body.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        body = trim(body.substr(comma + 1));
    }
    return out;
}

std::pair<double, double> point(const Entry& e) {
    const auto v = number_list(e);
    if (v.size() != 2) config_error(e, "expected a point [x, y]");
    return {v[0], v[1]};
}

template <class T>
T& kernel_as(Scenario& s, const Entry& e) {
    if (auto* k = std::get_if<T>(&s.kernel)) return *k;
    config_error(e, "does not apply to kernel " + describe(s.kernel));
}

using Handler = std::function<void(RunConfig&, const Entry&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        // [scenario]
        {"scenario.name", [](RunConfig& c, const Entry& e) { c.scenario.name = text_value(e); }},
        {"scenario.c", [](RunConfig& c, const Entry& e) { c.scenario.c = number(e); }},
        {"scenario.velocity", [](RunConfig& c, const Entry& e) { c.scenario.velocity = number(e); }},
        {"scenario.half_width", [](RunConfig& c, const Entry& e) { c.scenario.domain.half_width = number(e); }},
        {"scenario.n_per_dim", [](RunConfig& c, const Entry& e) { c.scenario.n_per_dim = count(e); }},
        {"scenario.rank", [](RunConfig& c, const Entry& e) { c.scenario.rank = count(e); }},
        {"scenario.h_t", [](RunConfig& c, const Entry& e) { c.scenario.h_t = number(e); }},
        {"scenario.t_final", [](RunConfig& c, const Entry& e) { c.scenario.t_final = number(e); }},
        {"scenario.initial_value", [](RunConfig& c, const Entry& e) { c.scenario.initial_value = number(e); }},
        {"scenario.snapshot_times", [](RunConfig& c, const Entry& e) { c.scenario.snapshot_times = number_list(e); }},
        {"scenario.activity_threshold",
         [](RunConfig& c, const Entry& e) { c.scenario.activity_threshold = number(e); }},
        // [kernel]
        {"kernel.type", [](RunConfig&, const Entry&) {}},  // consumed before the others
        {"kernel.xi1", [](RunConfig& c, const Entry& e) { kernel_as<DifferenceOfGaussians>(c.scenario, e).xi1 = number(e); }},
        {"kernel.xi2", [](RunConfig& c, const Entry& e) { kernel_as<DifferenceOfGaussians>(c.scenario, e).xi2 = number(e); }},
        {"kernel.amplitude_ratio",
         [](RunConfig& c, const Entry& e) { kernel_as<DifferenceOfGaussians>(c.scenario, e).amplitude_ratio = number(e); }},
        {"kernel.exponent",
         [](RunConfig& c, const Entry& e) {
             const std::string v = text_value(e);
             auto& k = kernel_as<DifferenceOfGaussians>(c.scenario, e);
             if (v == "with-pi")
                 k.exponent = GaussianExponent::WithPi;
             else if (v == "conventional")
                 k.exponent = GaussianExponent::Conventional;
             else
                 config_error(e, "expected with-pi or conventional");
         }},
        {"kernel.k0", [](RunConfig& c, const Entry& e) { kernel_as<Hexagonal>(c.scenario, e).k0 = number(e); }},
        {"kernel.wavenumber", [](RunConfig& c, const Entry& e) { kernel_as<Hexagonal>(c.scenario, e).wavenumber = number(e); }},
        {"kernel.decay_length",
         [](RunConfig& c, const Entry& e) { kernel_as<Hexagonal>(c.scenario, e).decay_length = number(e); }},
        {"kernel.value", [](RunConfig& c, const Entry& e) { kernel_as<ConstantKernel>(c.scenario, e).value = number(e); }},
        // [firing]
        {"firing.amplitude", [](RunConfig& c, const Entry& e) { c.scenario.firing.amplitude = number(e); }},
        {"firing.slope", [](RunConfig& c, const Entry& e) { c.scenario.firing.slope = number(e); }},
        {"firing.threshold", [](RunConfig& c, const Entry& e) { c.scenario.firing.threshold = number(e); }},
        {"firing.offset", [](RunConfig& c, const Entry& e) { c.scenario.firing.offset = number(e); }},
        // [input]
        {"input.baseline", [](RunConfig& c, const Entry& e) { c.scenario.input.baseline = number(e); }},
        {"input.bump_amplitude", [](RunConfig& c, const Entry& e) { c.scenario.input.bump_amplitude = number(e); }},
        {"input.bump_width", [](RunConfig& c, const Entry& e) { c.scenario.input.bump_width = number(e); }},
        {"input.center", [](RunConfig& c, const Entry& e) {
             std::tie(c.scenario.input.center_x, c.scenario.input.center_y) = point(e);
         }},
        {"input.normalization",
         [](RunConfig& c, const Entry& e) {
             const std::string v = text_value(e);
             if (v == "inverse-pi-sigma-sq")
                 c.scenario.input.normalization = InputNormalization::InversePiSigmaSq;
             else if (v == "explicit")
                 c.scenario.input.normalization = InputNormalization::ExplicitFactor;
             else
                 config_error(e, "expected inverse-pi-sigma-sq or explicit");
         }},
        {"input.factor", [](RunConfig& c, const Entry& e) { c.scenario.input.factor = number(e); }},
        {"input.sampling",
         [](RunConfig& c, const Entry& e) {
             const std::string v = text_value(e);
             if (v == "point")
                 c.scenario.input.sampling = InputSampling::Point;
             else if (v == "cell-average")
                 c.scenario.input.sampling = InputSampling::CellAverage;
             else
                 config_error(e, "expected point or cell-average");
         }},
        // [trace]
        {"trace.probe1", [](RunConfig& c, const Entry& e) { c.trace.probe1 = point(e); }},
        {"trace.probe2", [](RunConfig& c, const Entry& e) { c.trace.probe2 = point(e); }},
        {"trace.activity_threshold", [](RunConfig& c, const Entry& e) { c.trace.activity_threshold = number(e); }},
        {"trace.tail_fraction", [](RunConfig& c, const Entry& e) { c.trace.classify.tail_fraction = number(e); }},
        {"trace.eps_zero", [](RunConfig& c, const Entry& e) { c.trace.classify.eps_zero = number(e); }},
        {"trace.eps_flat", [](RunConfig& c, const Entry& e) { c.trace.classify.eps_flat = number(e); }},
        // [output]
        {"output.dir", [](RunConfig& c, const Entry& e) { c.output.dir = text_value(e); }},
        {"output.trace_csv", [](RunConfig& c, const Entry& e) { c.output.trace_csv = boolean(e); }},
        {"output.radius_csv", [](RunConfig& c, const Entry& e) { c.output.radius_csv = boolean(e); }},
        {"output.snapshot_csv", [](RunConfig& c, const Entry& e) { c.output.snapshot_csv = boolean(e); }},
        {"output.heatmap_pgm", [](RunConfig& c, const Entry& e) { c.output.heatmap_pgm = boolean(e); }},
        {"output.heatmap_resolution", [](RunConfig& c, const Entry& e) { c.output.heatmap_resolution = count(e); }},
        // [solver]
        {"solver.tolerance", [](RunConfig& c, const Entry& e) { c.solver.tolerance = number(e); }},
        {"solver.max_iterations",
         [](RunConfig& c, const Entry& e) { c.solver.max_iterations = static_cast<int>(count(e)); }},
        {"solver.anderson_depth", [](RunConfig& c, const Entry& e) { c.solver.anderson_depth = count(e); }},
        {"solver.divergence_bound", [](RunConfig& c, const Entry& e) { c.solver.divergence_bound = number(e); }},
        {"solver.scheme",
         [](RunConfig& c, const Entry& e) {
             const std::string v = text_value(e);
             if (v == "trapezoidal")
                 c.solver.scheme = TimeScheme::Trapezoidal;
             else if (v == "implicit-euler")
                 c.solver.scheme = TimeScheme::ImplicitEuler;
             else
                 config_error(e, "expected trapezoidal or implicit-euler");
         }},
        {"solver.continue_on_no_convergence",
         [](RunConfig& c, const Entry& e) { c.solver.continue_on_no_convergence = boolean(e); }},
        {"solver.workers", [](RunConfig& c, const Entry& e) { c.workers = static_cast<int>(count(e)); }},
        {"solver.deterministic", [](RunConfig& c, const Entry& e) { c.deterministic = boolean(e); }},
    };
    return table;
}

KernelSpec kernel_from_type(const Entry& e) {
    const std::string t = text_value(e);
    if (t == "dog") return DifferenceOfGaussians{};
    if (t == "hexagonal") return Hexagonal{};
    if (t == "breather") return Breather{};
    if (t == "constant") return ConstantKernel{};
    config_error(e, "unknown kernel type '" + t + "' (dog, hexagonal, breather, constant)");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    const std::vector<Entry> entries = tokenize(text);

    const Entry* preset_entry = nullptr;
    const Entry* kernel_entry = nullptr;
    for (const auto& e : entries) {
        if (e.name() == "preset") preset_entry = &e;
        if (e.name() == "kernel.type") kernel_entry = &e;
    }
    if (!preset_entry && !kernel_entry)
        fail(ErrorKind::Config, "scenario source required: set preset = \"<id>\" or [kernel] type");

    RunConfig config;
    if (preset_entry) {
        config.preset = text_value(*preset_entry);
        try {
            config.scenario = preset(*config.preset);
            config.solver = preset_solver_options(*config.preset);
        } catch (const Error& err) {
            config_error(*preset_entry, err.what());
        }
    }
    if (kernel_entry) config.scenario.kernel = kernel_from_type(*kernel_entry);

    for (const auto& e : entries) {
        if (e.name() == "preset") continue;
        const auto it = handlers().find(e.name());
        if (it == handlers().end()) config_error(e, "unknown key");
        it->second(config, e);
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

SolverOptions preset_solver_options(const std::string& id) {
    SolverOptions o;
    // A few steps of the steep-sigmoid and c = 0.1 presets end the capped
    // iteration slightly above tolerance; the summary line counts them.
    (void)preset(id);
    o.continue_on_no_convergence = true;
    return o;
}

RunConfig config_for_preset(const std::string& id) {
    RunConfig c;
    c.preset = id;
    c.scenario = preset(id);
    c.solver = preset_solver_options(id);
    return c;
}

void validate(const RunConfig& config) {
    const Scenario& s = config.scenario;
    auto check = [](bool ok, const std::string& key, const std::string& what) {
        if (!ok) fail(ErrorKind::Config, key + ": " + what);
    };
    check(s.h_t > 0.0 && std::isfinite(s.h_t), "scenario.h_t", "must be positive");
    check(s.t_final >= 0.0 && std::isfinite(s.t_final), "scenario.t_final", "must be non-negative");
    check(s.c > 0.0 && std::isfinite(s.c), "scenario.c", "must be positive");
    check(s.velocity > 0.0, "scenario.velocity", "must be positive or inf");
    check(s.domain.half_width > 0.0, "scenario.half_width", "must be positive");
    check(s.n_per_dim >= 2, "scenario.n_per_dim", "must be at least 2");
    check(s.rank == 0 || (s.rank >= 2 && s.rank <= s.n_per_dim), "scenario.rank", "must be 0 or in [2, n_per_dim]");
    check(config.solver.tolerance > 0.0, "solver.tolerance", "must be positive");
    check(config.solver.max_iterations >= 1, "solver.max_iterations", "must be at least 1");
    check(config.trace.classify.tail_fraction > 0.0 && config.trace.classify.tail_fraction <= 1.0,
          "trace.tail_fraction", "must lie in (0, 1]");
    try {
        steps_to(s.t_final, s.h_t);
    } catch (const Error& e) {
        fail(ErrorKind::Config, std::string("scenario.t_final: ") + e.what());
    }
    for (double t : s.snapshot_times) {
        try {
            check(steps_to(t, s.h_t) <= steps_to(s.t_final, s.h_t), "scenario.snapshot_times", "time beyond t_final");
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            fail(ErrorKind::Config, std::string("scenario.snapshot_times: ") + e.what());
        }
    }
    try {
        validate(s);
    } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
    }
}

}  // namespace nfsim
