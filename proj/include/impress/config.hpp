#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impress/impulsive.hpp"
#include "impress/potentials.hpp"
#include "impress/pressure.hpp"

namespace impress {

// Raised on malformed or inconsistent experiment files; the message always
// names the offending line or field so the caller can print it verbatim.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// [system] section: either a packaged example by id, or an explicit
// descriptor (space kind, flow speed, trigger -> image pairs, tube length).
struct SystemConfig {
    bool present = false;
    std::string id;
    std::string kind = "circle";  // circle | interval | suspension
    double speed = 1.0;
    double interval_min = 0.0;
    double interval_max = 1.0;
    double roof = 1.0;
    std::vector<std::pair<StatePoint, StatePoint>> impulses;
    double xi = 0.1;
    double event_tol = 0.01;
    double capture = 1e-6;
};

// [potential] section. Absent section means f identically zero.
struct PotentialConfig {
    bool present = false;
    std::string kind = "constant";  // constant | fourier | tabulated
    double value = 0.0;
    std::vector<double> sin_coeffs;
    std::vector<double> cos_coeffs;
    double constant_term = 0.0;
    std::vector<double> nodes;
    std::vector<double> values;
};

// [schedule] section, including the estimator kinds to run.
struct ScheduleConfig {
    bool present = false;
    std::vector<double> T_list;
    std::vector<double> eps_list;
    std::vector<double> delta_list;
    int grid_n = 0;
    int m = 32;
    double t_step_factor = 0.25;
    std::vector<std::string> kinds{"all"};
};

// [run] section: simulation window, seed, and output file names (all
// resolved relative to the --out directory by the harness).
struct RunConfig {
    std::optional<std::vector<double>> x0;
    std::optional<double> T;
    std::optional<double> dt;
    long long seed = 1;
    bool record_timings = false;
    std::string out_trajectory = "trajectory.csv";
    std::string out_table = "pressure.csv";
    std::string out_summary = "summary.json";
    std::string out_plotdata = "plotdata.csv";
    std::string table;  // plotdata input; defaults to out_table when empty
};

struct ExperimentConfig {
    SystemConfig system;
    PotentialConfig potential;
    ScheduleConfig schedule;
    RunConfig run;
    // Original file lines, echoed into output headers so every emitted
    // number carries the configuration that produced it.
    std::vector<std::string> source_lines;

    [[nodiscard]] ImpulsiveSystem build_system() const;
    [[nodiscard]] Potential build_potential() const;
    // Needs the system's space to lay out the candidate grid.
    [[nodiscard]] Schedule build_schedule(const Space& space) const;
    [[nodiscard]] std::vector<EstimatorKind> estimator_kinds() const;
};

[[nodiscard]] ExperimentConfig parse_config_text(const std::string& text);
[[nodiscard]] ExperimentConfig parse_config_file(const std::string& path);

}  // namespace impress
