#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "impress/config.hpp"
#include "impress/io.hpp"
#include "impress/verify.hpp"

namespace fs = std::filesystem;
using namespace impress;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitGuardTripped = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<long long> seed;
    int threads = 1;
};

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = parse_config_file(args.config_path);
    if (args.seed.has_value()) cfg.run.seed = *args.seed;
    return cfg;
}

std::vector<std::string> header_comments(const ExperimentConfig& cfg) {
    std::vector<std::string> comments;
    comments.push_back("seed = " + std::to_string(cfg.run.seed));
    comments.emplace_back("config:");
    for (const std::string& line : cfg.source_lines) {
        comments.push_back("  " + line);
    }
    return comments;
}

fs::path resolve_out(const CommonArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return fs::path(args.out_dir) / name;
}

int cmd_simulate(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    ImpulsiveSystem sys = cfg.build_system();
    if (!cfg.run.x0.has_value()) throw config_error("[run]: x0 is required");
    if (!cfg.run.T.has_value() || !(*cfg.run.T > 0.0)) {
        throw config_error("[run]: a positive horizon T is required");
    }
    if (!cfg.run.dt.has_value() || !(*cfg.run.dt > 0.0)) {
        throw config_error("[run]: a positive sampling step dt is required");
    }
    const auto& coords = *cfg.run.x0;
    StatePoint x0 = coords.size() == 2 ? StatePoint(coords[0], coords[1])
                                       : StatePoint(coords[0]);
    TrajectoryRecord rec = impulsive_trajectory(sys, sys.space().canonical(x0), *cfg.run.T);

    fs::path path = resolve_out(args, cfg.run.out_trajectory);
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path.string());
    write_trajectory_csv(out, sys, rec, *cfg.run.dt, header_comments(cfg));
    std::cout << "wrote " << path.string() << " (" << rec.impulse_times.size()
              << " impulses)\n";
    return kExitOk;
}

int cmd_pressure(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    ImpulsiveSystem sys = cfg.build_system();
    Potential f = cfg.build_potential();
    Schedule schedule = cfg.build_schedule(sys.space());
    EstimateOptions options;
    options.record_timings = cfg.run.record_timings;

    std::vector<PressureTable> tables;
    for (EstimatorKind kind : cfg.estimator_kinds()) {
        try {
            tables.push_back(estimate_pressure(sys, f, kind, schedule, options));
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("[schedule]: ") + e.what());
        }
        const PressureTable& t = tables.back();
        std::cout << to_string(kind) << ": headline slope " << t.headline << " at eps="
                  << t.headline_eps << " delta=" << t.headline_delta;
        if (!t.warnings.empty()) std::cout << "  [" << t.warnings.size() << " warning(s)]";
        std::cout << "\n";
    }

    fs::path table_path = resolve_out(args, cfg.run.out_table);
    std::ofstream table_out(table_path);
    if (!table_out) throw config_error("cannot write " + table_path.string());
    write_pressure_csv(table_out, tables, header_comments(cfg));

    fs::path summary_path = resolve_out(args, cfg.run.out_summary);
    std::ofstream summary_out(summary_path);
    if (!summary_out) throw config_error("cannot write " + summary_path.string());
    write_summary_json(summary_out, tables);

    std::cout << "wrote " << table_path.string() << " and " << summary_path.string()
              << "\n";
    return kExitOk;
}

int cmd_verify(const CommonArgs& args, const std::string& suite) {
    ExperimentConfig cfg = load_config(args);
    SuiteReport report = run_verify_suite(suite, cfg);
    print_suite_report(std::cout, report);
    return report.pass() ? kExitOk : kExitVerifyFailure;
}

int cmd_plotdata(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    std::string name = cfg.run.table.empty() ? cfg.run.out_table : cfg.run.table;
    fs::path input = fs::path(args.out_dir) / name;
    std::ifstream in(input);
    if (!in) throw config_error("cannot open pressure table: " + input.string());
    std::vector<PressureRow> rows;
    try {
        rows = read_pressure_csv(in);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string(e.what()) + " in " + input.string());
    }

    fs::path path = resolve_out(args, cfg.run.out_plotdata);
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path.string());
    try {
        write_plotdata_csv(out, rows);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string(e.what()) + " in " + input.string());
    }
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and pressure estimation for impulsive semiflows"};
    app.require_subcommand(1);

    CommonArgs args;
    long long seed_flag = 0;
    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", args.config_path,
                                    "experiment description file");
        if (config_required) opt->required();
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--seed", seed_flag, "override the config seed")
            ->each([&](const std::string&) { args.seed = seed_flag; });
        cmd->add_option("--threads", args.threads, "worker thread budget")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* simulate =
        app.add_subcommand("simulate", "sample one impulsive trajectory to CSV");
    add_common(simulate, true);

    CLI::App* pressure = app.add_subcommand(
        "pressure", "estimate pressure over the configured lattice");
    add_common(pressure, true);

    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("suite", suite, "one of: continuous-coincidence, inequalities, "
                                       "variational, quotient, conditions")
        ->required();
    add_common(verify, true);

    CLI::App* plotdata = app.add_subcommand(
        "plotdata", "reshape a pressure table into plot-ready series");
    add_common(plotdata, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (pressure->parsed()) return cmd_pressure(args);
        if (verify->parsed()) return cmd_verify(args, suite);
        return cmd_plotdata(args);
    } catch (const spacing_violation& e) {
        std::cerr << "runtime guard: " << e.what() << "\n";
        return kExitGuardTripped;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
