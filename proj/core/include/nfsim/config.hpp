#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "nfsim/analysis.hpp"
#include "nfsim/model.hpp"
#include "nfsim/solver.hpp"

namespace nfsim {

struct OutputOptions {
    std::filesystem::path dir = ".";
    bool trace_csv = true;
    bool radius_csv = true;
    bool snapshot_csv = true;
    bool heatmap_pgm = true;
    /// Raster side for heatmaps; 0 picks 4 N.
    std::size_t heatmap_resolution = 0;
};

struct TraceOptions {
    std::optional<std::pair<double, double>> probe1;
    std::optional<std::pair<double, double>> probe2;
    std::optional<double> activity_threshold;
    ClassifyOptions classify;
};

struct RunConfig {
    std::optional<std::string> preset;
    Scenario scenario;
    OutputOptions output;
    TraceOptions trace;
    SolverOptions solver;
    int workers = 0;  // 0: runtime default
    /// Pins the worker count so reruns partition rows identically.
    bool deterministic = true;
};

/// Document format, one entry per line:
///
///   # comment
///   preset = "ex2-v10"
///   [scenario]
///   h_t = 0.04
///   snapshot_times = [0.08, 0.48]
///
/// Top-level keys: preset. Sections: scenario, kernel, firing, input, trace,
/// output, solver. A scenario needs either a preset or [kernel] type. Unknown
/// keys are errors; errors carry the line number and key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Config equivalent to `preset = "<id>"` with defaults elsewhere.
/// Solver settings a preset runs with by default.
SolverOptions preset_solver_options(const std::string& id);
RunConfig config_for_preset(const std::string& id);

/// Checks the cross-field rules (snapshot times on the step grid, positive
/// h_t, ...) and throws config errors naming the key.
void validate(const RunConfig& config);

}  // namespace nfsim
