#include "impress/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace impress {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
    for (const std::string& line : comments) {
        out << "# " << line << "\n";
    }
}

void write_point(std::ostream& out, const Space& space, const StatePoint& p) {
    out << format_double(p.x());
    if (space.dimension() == 2) out << "," << format_double(p.y());
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const ImpulsiveSystem& sys,
                          const TrajectoryRecord& rec, double dt,
                          const std::vector<std::string>& header_comments) {
    if (!(dt > 0.0)) throw std::invalid_argument("sampling step must be positive");
    const Space& space = sys.space();
    const Semiflow& flow = sys.flow();
    write_comments(out, header_comments);
    out << (space.dimension() == 2 ? "t,x,y,segment_index,is_impulse\n"
                                   : "t,x,segment_index,is_impulse\n");

    const auto n = static_cast<std::size_t>(std::floor(rec.horizon / dt + 1e-9));
    std::size_t seg = 0;
    std::size_t imp = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        double t = std::min(static_cast<double>(k) * dt, rec.horizon);
        // Pre-jump rows for impulses that happen before (or at) this sample.
        while (imp < rec.impulse_times.size() &&
               rec.impulse_times[imp] <= t + 1e-9) {
            out << format_double(rec.impulse_times[imp]) << ",";
            write_point(out, space, rec.hit_points[imp]);
            out << "," << imp << ",1\n";
            ++imp;
        }
        while (seg + 1 < rec.segments.size() &&
               rec.segments[seg + 1].start_time <= t + 1e-12) {
            ++seg;
        }
        StatePoint p = flow.evaluate(std::max(0.0, t - rec.segments[seg].start_time),
                                     rec.segments[seg].start_point);
        out << format_double(t) << ",";
        write_point(out, space, p);
        out << "," << seg << ",0\n";
    }
    // Impulses in the final open stretch after the last grid sample.
    while (imp < rec.impulse_times.size()) {
        out << format_double(rec.impulse_times[imp]) << ",";
        write_point(out, space, rec.hit_points[imp]);
        out << "," << imp << ",1\n";
        ++imp;
    }
}

void write_pressure_csv(std::ostream& out, const std::vector<PressureTable>& tables,
                        const std::vector<std::string>& header_comments) {
    write_comments(out, header_comments);
    out << "kind,T,eps,delta,logZ,set_size,seconds\n";
    for (const PressureTable& table : tables) {
        for (const PressureRow& r : table.rows) {
            out << to_string(r.kind) << "," << format_double(r.T) << ","
                << format_double(r.eps) << "," << format_double(r.delta) << ","
                << format_double(r.logZ) << "," << r.set_size << ","
                << format_double(r.seconds) << "\n";
        }
    }
}

std::vector<PressureRow> read_pressure_csv(std::istream& in) {
    std::vector<PressureRow> rows;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "kind,T,eps,delta,logZ,set_size,seconds") {
                std::ostringstream os;
                os << "pressure table line " << lineno << ": unexpected header '"
                   << line << "'";
                throw std::invalid_argument(os.str());
            }
            header_seen = true;
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> parts;
        while (std::getline(cells, cell, ',')) parts.push_back(cell);
        if (parts.size() != 7) {
            std::ostringstream os;
            os << "pressure table line " << lineno << ": expected 7 cells, got "
               << parts.size();
            throw std::invalid_argument(os.str());
        }
        PressureRow r;
        r.kind = estimator_kind_from_string(parts[0]);
        r.T = std::stod(parts[1]);
        r.eps = std::stod(parts[2]);
        r.delta = std::stod(parts[3]);
        r.logZ = std::stod(parts[4]);
        r.set_size = static_cast<std::size_t>(std::stoull(parts[5]));
        r.seconds = std::stod(parts[6]);
        rows.push_back(r);
    }
    if (!header_seen) throw std::invalid_argument("pressure table has no header row");
    return rows;
}

void write_summary_json(std::ostream& out, const std::vector<PressureTable>& tables) {
    nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
    for (const PressureTable& table : tables) {
        nlohmann::ordered_json item;
        item["kind"] = to_string(table.kind);
        item["slope"] = table.headline;
        const SlopeFit* fit = table.fit_for(table.headline_eps, table.headline_delta);
        item["residual"] = fit != nullptr ? fit->residual : 0.0;
        item["eps"] = table.headline_eps;
        item["delta"] = table.headline_delta;
        item["warnings"] = table.warnings;
        summaries.push_back(item);
    }
    out << summaries.dump(2) << "\n";
}

void write_plotdata_csv(std::ostream& out, const std::vector<PressureRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("pressure table has no data rows");
    out << "kind,eps,delta,T,logZ_over_T\n";
    for (const PressureRow& r : rows) {
        out << to_string(r.kind) << "," << format_double(r.eps) << ","
            << format_double(r.delta) << "," << format_double(r.T) << ","
            << format_double(r.logZ / r.T) << "\n";
    }
}

}  // namespace impress
