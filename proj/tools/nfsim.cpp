#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "nfsim/bench.hpp"
#include "nfsim/config.hpp"
#include "nfsim/parallel.hpp"
#include "nfsim/run.hpp"

namespace {

// NFSIM_WORKERS beats --workers beats the config file.
std::optional<int> env_workers() {
    const char* v = std::getenv("NFSIM_WORKERS");
    if (!v || !*v) return std::nullopt;
    try {
        const int n = std::stoi(v);
        if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring NFSIM_WORKERS='" << v << "'\n";
    return std::nullopt;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const nfsim::Error& e) {
        std::cerr << "error (" << nfsim::to_string(e.kind()) << "): " << e.what() << '\n';
        return nfsim::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nfsim::kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nfsim: 2D neural field simulator with transmission delays"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "worker threads for row-partitioned loops (NFSIM_WORKERS overrides)");

    std::string config_path;
    std::string run_out;
    auto* run_cmd = app.add_subcommand("run", "run a configuration file");
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->add_option("--out", run_out, "output directory (overrides the config)");

    std::string preset_id;
    std::string preset_out = ".";
    std::size_t preset_n = 0;
    double preset_t = -1.0;
    auto* preset_cmd = app.add_subcommand("preset", "run a named preset");
    preset_cmd->add_option("id", preset_id, "preset id (see list-presets)")->required();
    preset_cmd->add_option("--out", preset_out, "output directory");
    preset_cmd->add_option("--n", preset_n, "override points per dimension");
    preset_cmd->add_option("--t-final", preset_t, "override the final time");

    auto* list_cmd = app.add_subcommand("list-presets", "list preset ids");

    std::size_t table1_n = 0;
    auto* t1_cmd = app.add_subcommand("table1", "classify the eight Mexican-hat runs");
    t1_cmd->add_option("--n", table1_n, "override points per dimension");

    auto* t2_cmd = app.add_subcommand("table2", "activity radius of the three hexagonal-front runs");

    std::vector<std::size_t> sizes{16, 24, 32, 48};
    std::size_t reps = 5;
    std::size_t rank = 12;
    bool convergence = false;
    auto* bench_cmd = app.add_subcommand("bench", "operator timings as CSV");
    bench_cmd->add_option("--sizes", sizes, "points per dimension");
    bench_cmd->add_option("--reps", reps, "repetitions per measurement");
    bench_cmd->add_option("--rank", rank, "low-rank subgrid size");
    bench_cmd->add_flag("--convergence", convergence, "also run the temporal order study");

    CLI11_PARSE(app, argc, argv);

    const std::optional<int> env = env_workers();
    const int pinned = env ? *env : workers;
    if (pinned > 0) nfsim::set_worker_count(pinned);

    if (*run_cmd) {
        return guarded([&] {
            nfsim::RunConfig cfg = nfsim::load_config(config_path);
            if (!run_out.empty()) cfg.output.dir = run_out;
            if (pinned > 0) cfg.workers = pinned;
            return nfsim::run(cfg, std::cout, std::cerr);
        });
    }
    if (*preset_cmd) {
        return guarded([&] {
            nfsim::RunConfig cfg = nfsim::config_for_preset(preset_id);
            cfg.output.dir = preset_out;
            if (preset_n) cfg.scenario.n_per_dim = preset_n;
            if (preset_t >= 0.0) {
                cfg.scenario.t_final = preset_t;
                std::erase_if(cfg.scenario.snapshot_times, [&](double t) { return t > preset_t; });
            }
            if (pinned > 0) cfg.workers = pinned;
            return nfsim::run(cfg, std::cout, std::cerr);
        });
    }
    if (*list_cmd) {
        for (const auto& p : nfsim::preset_catalog()) std::cout << p.id << "\t" << p.summary << '\n';
        return 0;
    }
    if (*t1_cmd) {
        return guarded([&] {
            const auto rows = nfsim::table1(table1_n ? std::optional(table1_n) : std::nullopt, &std::cerr);
            nfsim::print_table1(std::cout, rows);
            return 0;
        });
    }
    if (*t2_cmd) {
        return guarded([&] {
            nfsim::print_table2(std::cout, nfsim::table2(&std::cerr));
            return 0;
        });
    }
    if (*bench_cmd) {
        return guarded([&] {
            const nfsim::KernelSpec kernel = nfsim::preset("ex1-case1-mu45-nodelay").kernel;
            const auto rows = nfsim::bench_apply(sizes, kernel, 0.6, rank, reps);
            nfsim::write_bench_csv(std::cout, rows);
            if (convergence) {
                const double hs[] = {0.2, 0.1, 0.05};
                nfsim::Scenario sc = nfsim::preset("ex1-case1-mu15-nodelay");
                sc.n_per_dim = 16;
                sc.rank = 0;
                sc.t_final = 2.0;
                const auto r = nfsim::convergence_study(sc, hs);
                const auto s = nfsim::scalar_decay_study(hs);
                std::cout << "\nstudy,order\nex1-case1-mu15-nodelay," << r.order << "\nscalar-decay," << s.order
                          << '\n';
            }
            return 0;
        });
    }
    return 0;
}
