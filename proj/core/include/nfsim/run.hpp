#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfsim/analysis.hpp"
#include "nfsim/config.hpp"
#include "nfsim/error.hpp"
#include "nfsim/solver.hpp"

namespace nfsim {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitDivergence = 3,
    kExitIo = 4,
};

int exit_code(ErrorKind kind) noexcept;

struct RunSummary {
    std::string id;
    AsymptoticLabel label;
    std::optional<double> final_radius;
    double seconds_per_step = 0.0;
    Trajectory trajectory;
};

/// Integrates the configured scenario and writes the enabled outputs into
/// config.output.dir (created if missing). Throws Error.
RunSummary execute(const RunConfig& config);

/// label, final r_a and wall time per step on one line.
std::string summary_line(const RunSummary& summary);

/// execute() with errors mapped to exit codes; the summary goes to out and
/// errors to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Table1Row {
    std::string id;
    AsymptoticKind expected;
    AsymptoticLabel label;
    double seconds = 0.0;
};

/// The eight Mexican-hat runs. n_per_dim overrides N when set.
std::vector<Table1Row> table1(std::optional<std::size_t> n_per_dim = std::nullopt, std::ostream* progress = nullptr);
void print_table1(std::ostream& out, const std::vector<Table1Row>& rows);

struct Table2Row {
    std::string id;
    std::vector<RadiusSample> series;
    std::size_t unconverged_steps = 0;
};

/// The three hexagonal-front runs.
std::vector<Table2Row> table2(std::ostream* progress = nullptr);
void print_table2(std::ostream& out, const std::vector<Table2Row>& rows);

}  // namespace nfsim
