// Acceptance gate: one line per criterion, exit 0 only if all pass.
//
// Each criterion pairs a finite-resolution estimate with a pinned tolerance,
// or an exact property that must hold with zero violations. Estimator
// tolerances live in verify.cpp next to the suites that use them.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "impress/config.hpp"
#include "impress/example_systems.hpp"
#include "impress/impulsive.hpp"
#include "impress/pressure.hpp"
#include "impress/verify.hpp"

namespace fs = std::filesystem;
using namespace impress;

namespace {

struct Criterion {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::string failed_names(const SuiteReport& rep) {
    std::string names;
    for (const VerifyAssertion& a : rep.assertions) {
        if (!a.pass) {
            if (!names.empty()) names += ", ";
            names += a.name;
        }
    }
    return names;
}

std::string count_note(const SuiteReport& rep) {
    std::ostringstream os;
    os << rep.assertions.size() << " assertions";
    return os.str();
}

// --- criterion 1: six estimators coincide on the continuous rotation ------

Criterion continuous_coincidence() {
    Criterion c{1, "estimator coincidence on the continuous rotation"};
    ExperimentConfig cfg = parse_config_text(R"(
[system]
id = rotation_circle

[potential]
kind = fourier
sin = 1.0

[schedule]
T_list = 10, 20, 40
eps_list = 0.1, 0.05, 0.02
delta_list = 0.2, 0.1
grid_n = 400
m = 8
t_step_factor = 0.5

[run]
seed = 1
)");
    SuiteReport rep = verify_continuous_coincidence(cfg);
    c.pass = rep.pass();
    c.detail = c.pass ? "sine and zero potentials, " + count_note(rep)
                      : "failed: " + failed_names(rep);
    return c;
}

// --- criterion 2: separated-set growth recovers the doubling entropy ------

Criterion entropy_recovery() {
    Criterion c{2, "entropy recovery on the doubling suspension"};
    ExperimentConfig cfg = parse_config_text(R"(
[system]
id = suspension_doubling

[schedule]
T_list = 4, 6, 8, 10
eps_list = 0.05
delta_list = 0.2
grid_n = 4096
m = 2
t_step_factor = 0.5
kinds = ClassicalS

[run]
seed = 1
)");
    ImpulsiveSystem sys = cfg.build_system();
    Schedule schedule = cfg.build_schedule(sys.space());
    PressureTable table =
        estimate_pressure(sys, Potential::constant(0.0), EstimatorKind::ClassicalS,
                          schedule);
    const double lo = 0.55;
    const double hi = 0.80;
    c.pass = table.headline >= lo && table.headline <= hi;
    std::ostringstream os;
    os << "slope " << table.headline << " vs log 2 = " << std::log(2.0) << ", band ["
       << lo << ", " << hi << "]";
    std::vector<std::string> sizes;
    for (const PressureRow& r : table.rows) {
        sizes.push_back(std::to_string(r.set_size));
    }
    os << ", set sizes";
    for (const std::string& s : sizes) os << " " << s;
    c.detail = os.str();
    return c;
}

// --- criteria 3 and 4: exact per-cell identities on every example system --

struct SystemSweep {
    std::vector<SuiteReport> reports;
    std::vector<std::string> labels;
};

SystemSweep sweep_inequalities() {
    // Per system: the bundled potential and the zero potential. The schedule
    // keeps every space at the same lattice so each report covers the full
    // (T, eps, delta, stage) product.
    const std::string schedule = R"(
[schedule]
T_list = 2, 4
eps_list = 0.2, 0.1
delta_list = 0.2, 0.1
grid_n = 64
m = 4
t_step_factor = 0.5

[run]
seed = 1
)";
    const std::string sine = "[potential]\nkind = fourier\nsin = 1.0\n";
    const std::string tent =
        "[potential]\nkind = tabulated\nnodes = 0.0, 0.5, 1.0\nvalues = 0.0, 1.0, 0.0\n";
    const std::string lift = "[potential]\nkind = constant\nvalue = 0.7\n";
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"rotation_circle", sine},
        {"impulsive_circle", sine},
        {"translation_interval", tent},
        {"suspension_doubling", lift},
    };

    SystemSweep sweep;
    for (const auto& [id, potential] : cases) {
        for (bool with_potential : {true, false}) {
            std::string text = "[system]\nid = " + id + "\n" +
                               (with_potential ? potential : std::string()) + schedule;
            sweep.reports.push_back(verify_inequalities(parse_config_text(text)));
            sweep.labels.push_back(id + (with_potential ? "/f" : "/zero"));
        }
    }
    return sweep;
}

Criterion constant_shift(const SystemSweep& sweep) {
    Criterion c{3, "constant potentials shift log-partitions by exactly c*T"};
    c.pass = true;
    std::string bad;
    for (std::size_t k = 0; k < sweep.reports.size(); ++k) {
        for (const VerifyAssertion& a : sweep.reports[k].assertions) {
            if (a.name == "constant-shift-exactness" && !a.pass) {
                c.pass = false;
                bad += (bad.empty() ? "" : ", ") + sweep.labels[k];
            }
        }
    }
    c.detail = c.pass ? "all example systems, every lattice cell, tolerance 1e-9"
                      : "failed on: " + bad;
    return c;
}

Criterion ordering_inequalities(const SystemSweep& sweep) {
    Criterion c{4, "separated/spanning orderings hold with zero violations"};
    c.pass = true;
    std::string bad;
    for (std::size_t k = 0; k < sweep.reports.size(); ++k) {
        for (const VerifyAssertion& a : sweep.reports[k].assertions) {
            if (a.name == "constant-shift-exactness") continue;  // criterion 3
            if (!a.pass) {
                c.pass = false;
                bad += (bad.empty() ? "" : ", ") + sweep.labels[k] + ":" + a.name;
            }
        }
    }
    c.detail = c.pass ? "all example systems, bundled and zero potentials"
                      : "failed on: " + bad;
    return c;
}

// --- criterion 5: variational principle on the impulsive circle -----------

Criterion variational_recovery() {
    Criterion c{5, "variational recovery on the impulsive circle"};
    ExperimentConfig cfg = parse_config_text(R"(
[system]
id = impulsive_circle

[potential]
kind = fourier
sin = 1.0

[schedule]
T_list = 20, 40, 80
eps_list = 0.05, 0.02
delta_list = 0.1, 0.05
grid_n = 800
m = 8
t_step_factor = 0.5
kinds = BarS, BarR, HatS, HatR

[run]
seed = 1
)");
    SuiteReport rep = verify_variational(cfg);
    c.pass = rep.pass();
    std::ostringstream os;
    if (c.pass) {
        os << "four estimators vs 2/pi and a constant potential, " << count_note(rep);
    } else {
        os << "failed: " << failed_names(rep);
    }
    c.detail = os.str();
    return c;
}

// --- criterion 6: quotient identification ----------------------------------

Criterion quotient_checks() {
    Criterion c{6, "quotient metric and projected flow"};
    ExperimentConfig cfg = parse_config_text(
        "[system]\nid = impulsive_circle\n\n[run]\nseed = 1\n");
    SuiteReport rep = verify_quotient(cfg);
    c.pass = rep.pass();
    c.detail = c.pass ? count_note(rep) : "failed: " + failed_names(rep);
    return c;
}

// --- criterion 7: impulse times of the bundled circle ----------------------

Criterion impulse_mechanics() {
    Criterion c{7, "impulse times on the bundled circle"};
    ImpulsiveSystem sys = make_example("impulsive_circle");
    TrajectoryRecord rec = impulsive_trajectory(sys, StatePoint(0.0), 50.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < rec.impulse_times.size(); ++k) {
        double expected = 0.5 * static_cast<double>(k + 1);
        worst = std::max(worst, std::fabs(rec.impulse_times[k] - expected));
    }
    double min_gap = 50.0;
    for (std::size_t k = 1; k < rec.impulse_times.size(); ++k) {
        min_gap = std::min(min_gap, rec.impulse_times[k] - rec.impulse_times[k - 1]);
    }
    // 0.5, 1.0, ..., 49.5 and possibly the boundary event at exactly 50.0
    bool count_ok =
        rec.impulse_times.size() == 99 || rec.impulse_times.size() == 100;
    c.pass = count_ok && worst <= 1e-9 && min_gap >= sys.xi();
    std::ostringstream os;
    os << rec.impulse_times.size() << " impulses, worst deviation " << worst
       << ", min spacing " << min_gap;
    c.detail = os.str();
    return c;
}

// --- criterion 8: shipped configurations run headless and deterministically

int run_command(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Criterion headless_configs() {
    Criterion c{8, "shipped configurations verify headless and deterministically"};
    const fs::path cli = IMPRESS_CLI_PATH;
    const fs::path cfgs = IMPRESS_CONFIG_DIR;
    fs::path scratch = fs::temp_directory_path() / "impress_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const std::vector<std::pair<std::string, std::string>> suites = {
        {"continuous-coincidence", "verify_coincidence.cfg"},
        {"inequalities", "verify_inequalities.cfg"},
        {"variational", "verify_variational.cfg"},
        {"quotient", "verify_quotient.cfg"},
        {"conditions", "verify_conditions.cfg"},
    };
    std::string bad;
    for (const auto& [suite, file] : suites) {
        fs::path out = scratch / suite;
        fs::create_directories(out);
        std::string cmd = "\"" + cli.string() + "\" verify " + suite + " --config \"" +
                          (cfgs / file).string() + "\" --out \"" + out.string() +
                          "\" > \"" + (out / "log.txt").string() + "\" 2>&1";
        if (run_command(cmd) != 0) bad += (bad.empty() ? "" : ", ") + suite;
    }

    bool deterministic = true;
    for (const char* tag : {"a", "b"}) {
        fs::path out = scratch / (std::string("det_") + tag);
        fs::create_directories(out);
        std::string cmd = "\"" + cli.string() + "\" pressure --config \"" +
                          (cfgs / "pressure_small.cfg").string() + "\" --out \"" +
                          out.string() + "\" --seed 7 > \"" +
                          (out / "log.txt").string() + "\" 2>&1";
        if (run_command(cmd) != 0) {
            bad += (bad.empty() ? "" : ", ") + std::string("pressure_small/") + tag;
        }
    }
    deterministic =
        slurp(scratch / "det_a" / "pressure.csv") ==
            slurp(scratch / "det_b" / "pressure.csv") &&
        !slurp(scratch / "det_a" / "pressure.csv").empty() &&
        slurp(scratch / "det_a" / "summary.json") ==
            slurp(scratch / "det_b" / "summary.json");

    c.pass = bad.empty() && deterministic;
    if (c.pass) {
        c.detail = "5 verify suites exit 0; repeated runs byte-identical";
    } else {
        c.detail = bad.empty() ? "outputs differ between identical runs"
                               : "failed: " + bad;
    }
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    auto timed = [&](auto&& fn) {
        auto start = std::chrono::steady_clock::now();
        Criterion c = fn();
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  start)
                        .count();
        results.push_back(std::move(c));
    };

    timed(continuous_coincidence);
    timed(entropy_recovery);
    {
        auto start = std::chrono::steady_clock::now();
        SystemSweep sweep = sweep_inequalities();
        double shared = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        Criterion c3 = constant_shift(sweep);
        Criterion c4 = ordering_inequalities(sweep);
        c3.seconds = shared;
        c4.seconds = shared;
        results.push_back(std::move(c3));
        results.push_back(std::move(c4));
    }
    timed(variational_recovery);
    timed(quotient_checks);
    timed(impulse_mechanics);
    timed(headless_configs);

    bool all = true;
    for (const Criterion& c : results) {
        all = all && c.pass;
        std::ostringstream line;
        line << "criterion " << c.id << " (" << c.title << "): "
             << (c.pass ? "PASS" : "FAIL") << "  [" << c.seconds << " s]  "
             << c.detail;
        std::cout << line.str() << "\n";
    }
    std::cout << (all ? "acceptance: all criteria satisfied"
                      : "acceptance: criteria failed")
              << "\n";
    return all ? 0 : 1;
}
