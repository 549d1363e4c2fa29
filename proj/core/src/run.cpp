#include "nfsim/run.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nfsim/output.hpp"
#include "nfsim/parallel.hpp"

namespace nfsim {

namespace {

std::string time_tag(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::UnknownPreset:
        case ErrorKind::InvalidArgument: return kExitConfig;
        case ErrorKind::Divergence:
        case ErrorKind::NoConvergence: return kExitDivergence;
        case ErrorKind::Io: return kExitIo;
        default: return kExitFailure;
    }
}

RunSummary execute(const RunConfig& config) {
    validate(config);
    if (config.workers > 0) set_worker_count(config.workers);

    const OutputOptions& out = config.output;
    const bool writes = out.trace_csv || out.radius_csv || out.snapshot_csv || out.heatmap_pgm;
    if (writes) {
        std::error_code ec;
        std::filesystem::create_directories(out.dir, ec);
        if (ec || !std::filesystem::is_directory(out.dir))
            fail(ErrorKind::Io, "cannot create output directory " + out.dir.string());
    }

    const Scenario& sc = config.scenario;
    const DiscreteProblem problem = discretize(sc, config.solver.assembly);
    IntegrateOptions opts;
    opts.solver = config.solver;
    opts.activity_threshold = config.trace.activity_threshold;
    if (config.trace.probe1) opts.probe1 = problem.grid->nearest(config.trace.probe1->first, config.trace.probe1->second);
    if (config.trace.probe2) opts.probe2 = problem.grid->nearest(config.trace.probe2->first, config.trace.probe2->second);

    RunSummary summary{config.preset.value_or(sc.name), {}, std::nullopt, 0.0, integrate(problem, opts)};
    const Trajectory& tr = summary.trajectory;
    summary.label = classify(sup_norm_trace(tr), config.trace.classify);
    summary.seconds_per_step = tr.steps ? tr.wall_seconds / static_cast<double>(tr.steps) : 0.0;
    const bool tracks_radius = !tr.traces.empty() && tr.traces.back().radius.has_value();
    if (tracks_radius) summary.final_radius = tr.traces.back().radius;

    const Grid& grid = *tr.grid;
    if (out.trace_csv) write_trace_csv(out.dir / "trace.csv", tr);
    if (out.radius_csv && tracks_radius) write_radius_csv(out.dir / "radius.csv", radius_series(tr));
    const std::size_t res = out.heatmap_resolution ? out.heatmap_resolution : 4 * grid.n_per_dim();
    for (const auto& s : tr.snapshots) {
        const std::string tag = time_tag(s.t);
        if (out.snapshot_csv) write_snapshot_csv(out.dir / ("snapshot_t" + tag + ".csv"), grid, s.values);
        if (out.heatmap_pgm)
            write_heatmap_pgm(out.dir / ("heatmap_t" + tag + ".pgm"), upsample_bicubic(s.values, grid, res));
    }
    return summary;
}

std::string summary_line(const RunSummary& s) {
    std::ostringstream os;
    os << s.id << ": label=" << to_string(s.label.kind) << " tail_mean=" << format_double(s.label.tail_mean)
       << " r_a=" << (s.final_radius ? format_double(*s.final_radius) : std::string("n/a"))
       << " wall_per_step=" << fixed(s.seconds_per_step, 6) << "s"
       << " max_iterations=" << s.trajectory.max_iterations_used
       << (s.trajectory.unconverged_steps ? " unconverged_steps=" + std::to_string(s.trajectory.unconverged_steps) : "")
       << (s.trajectory.fell_back_to_dense ? " operator=dense(fallback)"
                                          : s.trajectory.low_rank ? " operator=low-rank" : " operator=dense");
    return os.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const RunSummary s = execute(config);
        out << summary_line(s) << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

std::vector<Table1Row> table1(std::optional<std::size_t> n_per_dim, std::ostream* progress) {
    struct Case {
        const char* id;
        AsymptoticKind expected;
    };
    static const Case cases[] = {
        {"ex1-case1-mu45-nodelay", AsymptoticKind::NontrivialSteady},
        {"ex1-case1-mu45-v1", AsymptoticKind::NontrivialSteady},
        {"ex1-case1-mu15-nodelay", AsymptoticKind::ZeroState},
        {"ex1-case1-mu15-v1", AsymptoticKind::ZeroState},
        {"ex1-case2-mu15-nodelay", AsymptoticKind::NontrivialSteady},
        {"ex1-case2-mu15-v0.1", AsymptoticKind::NontrivialSteady},
        {"ex1-case2-mu10-nodelay", AsymptoticKind::ZeroState},
        {"ex1-case2-mu10-v0.1", AsymptoticKind::ZeroState},
    };
    std::vector<Table1Row> rows;
    for (const auto& c : cases) {
        Scenario sc = preset(c.id);
        if (n_per_dim) sc.n_per_dim = *n_per_dim;
        const auto t0 = std::chrono::steady_clock::now();
        IntegrateOptions opts;
        opts.solver = preset_solver_options(c.id);
        const Trajectory tr = integrate(sc, opts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({c.id, c.expected, classify(sup_norm_trace(tr)), secs});
        if (progress) *progress << "  " << c.id << " done in " << fixed(secs, 1) << " s\n" << std::flush;
    }
    return rows;
}

void print_table1(std::ostream& out, const std::vector<Table1Row>& rows) {
    out << std::left << std::setw(26) << "preset" << std::setw(18) << "label" << std::setw(18) << "expected"
        << std::setw(14) << "tail_mean" << "tail_amplitude\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(26) << r.id << std::setw(18) << to_string(r.label.kind) << std::setw(18)
            << to_string(r.expected) << std::setw(14) << std::setprecision(4) << r.label.tail_mean
            << r.label.tail_amplitude << '\n';
    }
}

std::vector<Table2Row> table2(std::ostream* progress) {
    std::vector<Table2Row> rows;
    for (const char* id : {"ex2-v10", "ex2-v20", "ex2-nodelay"}) {
        IntegrateOptions opts;
        opts.solver = preset_solver_options(id);
        const Trajectory tr = integrate(preset(id), opts);
        rows.push_back({id, radius_series(tr), tr.unconverged_steps});
        if (progress) *progress << "  " << id << " done in " << fixed(tr.wall_seconds, 1) << " s\n" << std::flush;
    }
    return rows;
}

void print_table2(std::ostream& out, const std::vector<Table2Row>& rows) {
    if (rows.empty()) return;
    out << std::left << std::setw(14) << "t";
    for (const auto& r : rows) out << std::setw(14) << r.id;
    out << '\n';
    for (std::size_t k = 0; k < rows.front().series.size(); ++k) {
        out << std::left << std::setw(14) << fixed(rows.front().series[k].t, 2);
        for (const auto& r : rows) out << std::setw(14) << (k < r.series.size() ? fixed(r.series[k].radius, 3) : "-");
        out << '\n';
    }
    for (const auto& r : rows)
        if (r.unconverged_steps) out << r.id << ": " << r.unconverged_steps << " step(s) hit the iteration cap\n";
}

}  // namespace nfsim
