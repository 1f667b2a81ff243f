#include "impress/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "impress/example_systems.hpp"

namespace impress {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ": " << msg;
    throw config_error(os.str());
}

double parse_double(int line, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        fail(line, "field '" + key + "' expects a number, got '" + value + "'");
    }
    return d;
}

long long parse_int(int line, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    long long n = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        fail(line, "field '" + key + "' expects an integer, got '" + value + "'");
    }
    return n;
}

bool parse_bool(int line, const std::string& key, const std::string& value) {
    std::string v = trim(value);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(line, "field '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<double> parse_double_list(int line, const std::string& key,
                                      const std::string& value) {
    std::vector<double> out;
    for (const std::string& part : split(value, ',')) {
        out.push_back(parse_double(line, key, part));
    }
    if (out.empty()) fail(line, "field '" + key + "' expects a comma-separated list");
    return out;
}

StatePoint parse_point(int line, const std::string& key, const std::string& value) {
    std::vector<double> coords = parse_double_list(line, key, value);
    if (coords.size() == 1) return StatePoint(coords[0]);
    if (coords.size() == 2) return StatePoint(coords[0], coords[1]);
    fail(line, "field '" + key + "' expects 1 or 2 coordinates per point");
}

// "a -> b ; c -> d" with comma-separated coordinates inside each point.
std::vector<std::pair<StatePoint, StatePoint>> parse_impulse_pairs(
    int line, const std::string& value) {
    std::vector<std::pair<StatePoint, StatePoint>> pairs;
    for (const std::string& chunk : split(value, ';')) {
        auto arrow = chunk.find("->");
        if (arrow == std::string::npos) {
            fail(line, "impulse pair '" + chunk + "' is missing '->'");
        }
        StatePoint from = parse_point(line, "impulses", chunk.substr(0, arrow));
        StatePoint to = parse_point(line, "impulses", chunk.substr(arrow + 2));
        pairs.emplace_back(from, to);
    }
    if (pairs.empty()) fail(line, "field 'impulses' lists no pairs");
    return pairs;
}

const std::set<std::string> kSystemKinds = {"circle", "interval", "suspension"};
const std::set<std::string> kPotentialKinds = {"constant", "fourier", "tabulated"};

void check_kind_name(int line, const std::string& name) {
    if (name == "all") return;
    try {
        (void)estimator_kind_from_string(name);
    } catch (const std::invalid_argument& e) {
        fail(line, e.what());
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::string section;
    std::set<std::string> seen;  // "section.key" duplicates rejected
    while (std::getline(in, raw)) {
        ++line;
        cfg.source_lines.push_back(raw);
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section == "system") {
                cfg.system.present = true;
            } else if (section == "potential") {
                cfg.potential.present = true;
            } else if (section == "schedule") {
                cfg.schedule.present = true;
            } else if (section != "run") {
                fail(line, "unknown section [" + section + "]");
            }
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (section.empty()) fail(line, "key '" + key + "' appears before any section");
        if (!seen.insert(section + "." + key).second) {
            fail(line, "duplicate key '" + key + "' in [" + section + "]");
        }

        if (section == "system") {
            SystemConfig& sys = cfg.system;
            if (key == "id") {
                sys.id = value;
            } else if (key == "kind") {
                if (!kSystemKinds.count(value)) fail(line, "unknown system kind '" + value + "'");
                sys.kind = value;
            } else if (key == "speed") {
                sys.speed = parse_double(line, key, value);
            } else if (key == "interval") {
                auto ab = parse_double_list(line, key, value);
                if (ab.size() != 2) fail(line, "field 'interval' expects min, max");
                sys.interval_min = ab[0];
                sys.interval_max = ab[1];
            } else if (key == "roof") {
                sys.roof = parse_double(line, key, value);
            } else if (key == "impulses") {
                sys.impulses = parse_impulse_pairs(line, value);
            } else if (key == "xi") {
                sys.xi = parse_double(line, key, value);
            } else if (key == "event_tol") {
                sys.event_tol = parse_double(line, key, value);
            } else if (key == "capture") {
                sys.capture = parse_double(line, key, value);
            } else {
                fail(line, "unknown key '" + key + "' in [system]");
            }
        } else if (section == "potential") {
            PotentialConfig& pot = cfg.potential;
            if (key == "kind") {
                if (!kPotentialKinds.count(value)) {
                    fail(line, "unknown potential kind '" + value + "'");
                }
                pot.kind = value;
            } else if (key == "value") {
                pot.value = parse_double(line, key, value);
            } else if (key == "sin") {
                pot.sin_coeffs = parse_double_list(line, key, value);
            } else if (key == "cos") {
                pot.cos_coeffs = parse_double_list(line, key, value);
            } else if (key == "constant_term") {
                pot.constant_term = parse_double(line, key, value);
            } else if (key == "nodes") {
                pot.nodes = parse_double_list(line, key, value);
            } else if (key == "values") {
                pot.values = parse_double_list(line, key, value);
            } else {
                fail(line, "unknown key '" + key + "' in [potential]");
            }
        } else if (section == "schedule") {
            ScheduleConfig& sch = cfg.schedule;
            if (key == "T_list") {
                sch.T_list = parse_double_list(line, key, value);
            } else if (key == "eps_list") {
                sch.eps_list = parse_double_list(line, key, value);
            } else if (key == "delta_list") {
                sch.delta_list = parse_double_list(line, key, value);
            } else if (key == "grid_n") {
                auto n = parse_int(line, key, value);
                if (n <= 0) fail(line, "grid_n must be positive");
                sch.grid_n = static_cast<int>(n);
            } else if (key == "m") {
                auto m = parse_int(line, key, value);
                if (m < 2) fail(line, "m must be at least 2");
                sch.m = static_cast<int>(m);
            } else if (key == "t_step_factor") {
                sch.t_step_factor = parse_double(line, key, value);
            } else if (key == "kinds") {
                sch.kinds = split(value, ',');
                if (sch.kinds.empty()) fail(line, "field 'kinds' lists no names");
                for (const std::string& name : sch.kinds) check_kind_name(line, name);
            } else {
                fail(line, "unknown key '" + key + "' in [schedule]");
            }
        } else {  // run
            RunConfig& run = cfg.run;
            if (key == "x0") {
                auto coords = parse_double_list(line, key, value);
                if (coords.size() > 2) fail(line, "x0 expects 1 or 2 coordinates");
                run.x0 = coords;
            } else if (key == "T") {
                run.T = parse_double(line, key, value);
            } else if (key == "dt") {
                run.dt = parse_double(line, key, value);
            } else if (key == "seed") {
                run.seed = parse_int(line, key, value);
            } else if (key == "record_timings") {
                run.record_timings = parse_bool(line, key, value);
            } else if (key == "out_trajectory") {
                run.out_trajectory = value;
            } else if (key == "out_table") {
                run.out_table = value;
            } else if (key == "out_summary") {
                run.out_summary = value;
            } else if (key == "out_plotdata") {
                run.out_plotdata = value;
            } else if (key == "table") {
                run.table = value;
            } else {
                fail(line, "unknown key '" + key + "' in [run]");
            }
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ImpulsiveSystem ExperimentConfig::build_system() const {
    if (!system.present) throw config_error("missing [system] section");
    try {
        if (!system.id.empty()) return make_example(system.id);
        Semiflow flow = [&] {
            if (system.kind == "circle") return Semiflow::rotation_circle(system.speed);
            if (system.kind == "interval") {
                return Semiflow::translation_interval(
                    Space::interval(system.interval_min, system.interval_max),
                    system.speed);
            }
            return Semiflow::suspension_doubling(system.roof);
        }();
        if (system.impulses.empty()) return ImpulsiveSystem::continuous(flow);
        JumpSet jumps;
        for (const auto& [from, to] : system.impulses) jumps.points.push_back(from);
        jumps.capture_radius = system.capture;
        ImpulseMap map;
        map.pairs = system.impulses;
        return ImpulsiveSystem(flow, jumps, map, system.xi, system.event_tol);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[system]: ") + e.what());
    }
}

Potential ExperimentConfig::build_potential() const {
    if (!potential.present) return Potential::constant(0.0);
    try {
        if (potential.kind == "constant") return Potential::constant(potential.value);
        if (potential.kind == "fourier") {
            return Potential::fourier_circle(potential.sin_coeffs, potential.cos_coeffs,
                                             potential.constant_term);
        }
        return Potential::tabulated(potential.nodes, potential.values);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[potential]: ") + e.what());
    }
}

Schedule ExperimentConfig::build_schedule(const Space& space) const {
    if (!schedule.present) throw config_error("missing [schedule] section");
    if (schedule.grid_n <= 0) throw config_error("[schedule]: grid_n is required");
    try {
        CandidateGrid grid = space.kind() == SpaceKind::SuspensionDoubling
                                 ? suspension_base_grid(space, schedule.grid_n)
                                 : regular_grid(space, schedule.grid_n);
        Schedule sched{
            .T_list = schedule.T_list,
            .eps_list = schedule.eps_list,
            .delta_list = schedule.delta_list,
            .grid = std::move(grid),
            .m = schedule.m,
            .t_step_factor = schedule.t_step_factor,
        };
        sched.validate();
        return sched;
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("[schedule]: ") + e.what());
    }
}

std::vector<EstimatorKind> ExperimentConfig::estimator_kinds() const {
    std::vector<EstimatorKind> kinds;
    for (const std::string& name : schedule.kinds) {
        if (name == "all") {
            for (EstimatorKind k : all_estimator_kinds()) kinds.push_back(k);
        } else {
            kinds.push_back(estimator_kind_from_string(name));
        }
    }
    return kinds;
}

}  // namespace impress
