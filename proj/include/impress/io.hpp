#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "impress/impulsive.hpp"
#include "impress/pressure.hpp"

namespace impress {

// Shortest exact decimal form (%.17g): parsing the text recovers the
// identical bit pattern, which the byte-level determinism contract needs.
[[nodiscard]] std::string format_double(double v);

// Sampled trajectory table: one row per grid time t = k*dt (clamped to the
// horizon), plus one pre-jump row per impulse, flagged is_impulse=1 and
// placed immediately before the first sample at or after the jump.
// Columns: t, chart coordinates, segment_index, is_impulse.
void write_trajectory_csv(std::ostream& out, const ImpulsiveSystem& sys,
                          const TrajectoryRecord& rec, double dt,
                          const std::vector<std::string>& header_comments);

// Pressure lattice rows. Columns: kind,T,eps,delta,logZ,set_size,seconds.
void write_pressure_csv(std::ostream& out, const std::vector<PressureTable>& tables,
                        const std::vector<std::string>& header_comments);

// Reads rows back (comment lines skipped); inverse of write_pressure_csv.
[[nodiscard]] std::vector<PressureRow> read_pressure_csv(std::istream& in);

// One summary object per estimated table:
// {kind, slope, residual, eps, delta, warnings}.
void write_summary_json(std::ostream& out, const std::vector<PressureTable>& tables);

// Long-format series for external plotting. Columns:
// kind,eps,delta,T,logZ_over_T. Throws std::invalid_argument on no rows.
void write_plotdata_csv(std::ostream& out, const std::vector<PressureRow>& rows);

}  // namespace impress
