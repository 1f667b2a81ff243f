#include "impress/pressure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace impress {

namespace {

constexpr double kTimeSlack = 1e-12;

struct KindInfo {
    EstimatorKind kind;
    const char* name;
    bool spanning;
    StageMetric stage;
};

constexpr KindInfo kKinds[] = {
    {EstimatorKind::ClassicalR, "ClassicalR", true, StageMetric::Classical},
    {EstimatorKind::ClassicalS, "ClassicalS", false, StageMetric::Classical},
    {EstimatorKind::BarR, "BarR", true, StageMetric::Bar},
    {EstimatorKind::BarS, "BarS", false, StageMetric::Bar},
    {EstimatorKind::HatR, "HatR", true, StageMetric::Hat},
    {EstimatorKind::HatS, "HatS", false, StageMetric::Hat},
};

const KindInfo& info_of(EstimatorKind kind) {
    for (const KindInfo& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw std::logic_error("unmapped estimator kind");
}

}  // namespace

bool is_spanning_kind(EstimatorKind kind) { return info_of(kind).spanning; }

StageMetric stage_of(EstimatorKind kind) { return info_of(kind).stage; }

std::string to_string(EstimatorKind kind) { return info_of(kind).name; }

EstimatorKind estimator_kind_from_string(const std::string& name) {
    for (const KindInfo& k : kKinds) {
        if (name == k.name) return k.kind;
    }
    throw std::invalid_argument("unknown estimator kind: " + name);
}

const std::vector<EstimatorKind>& all_estimator_kinds() {
    static const std::vector<EstimatorKind> kinds = {
        EstimatorKind::ClassicalR, EstimatorKind::ClassicalS, EstimatorKind::BarR,
        EstimatorKind::BarS,       EstimatorKind::HatR,       EstimatorKind::HatS,
    };
    return kinds;
}

void Schedule::validate() const {
    auto strictly_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) return false;
        }
        return true;
    };
    if (T_list.size() < 2 || !strictly_increasing(T_list) || T_list.front() <= 0.0) {
        throw std::invalid_argument(
            "T_list must hold at least two increasing positive horizons");
    }
    auto strictly_decreasing_positive = [](const std::vector<double>& v) {
        if (v.empty() || v.back() <= 0.0) return false;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] < v[i - 1])) return false;
        }
        return true;
    };
    if (!strictly_decreasing_positive(eps_list)) {
        throw std::invalid_argument("eps_list must be strictly decreasing and positive");
    }
    if (!strictly_decreasing_positive(delta_list)) {
        throw std::invalid_argument("delta_list must be strictly decreasing and positive");
    }
    if (grid.points.empty()) throw std::invalid_argument("candidate grid is empty");
    if (m < 2) throw std::invalid_argument("shift grid needs at least 2 samples");
    if (!(t_step_factor > 0.0) || t_step_factor > 0.5 + 1e-15) {
        throw std::invalid_argument("t_step_factor must lie in (0, 1/2]");
    }
}

PseudoMetricParams Schedule::params_for(double delta) const {
    PseudoMetricParams p;
    p.delta = delta;
    p.m = m;
    p.t_grid_step = delta * t_step_factor;
    p.validate();
    return p;
}

double Schedule::birkhoff_dt() const {
    return std::min(delta_list.back() / 8.0, 0.01);
}

OrbitTable::OrbitTable(const ImpulsiveSystem& sys, const CandidateGrid& grid,
                       double delta, int m, double t_step, double T_max)
    : sys_(&sys), m_(m) {
    if (!(delta > 0.0) || m < 2 || !(t_step > 0.0) || !(T_max > 0.0)) {
        throw std::invalid_argument("orbit table needs positive delta, t_step, T_max and m >= 2");
    }
    g_ = delta / m;
    stage_step_ = static_cast<std::size_t>(std::max(1.0, std::round(t_step / g_)));
    fast_circle_ = sys.space().kind() == SpaceKind::Circle;
    fast_interval_ = sys.space().kind() == SpaceKind::Interval;
    const auto n_samples =
        static_cast<std::size_t>(std::llround(T_max / g_)) + static_cast<std::size_t>(m) + 2;
    samples_.reserve(grid.points.size());
    const Semiflow& flow = sys.flow();
    for (const StatePoint& p : grid.points) {
        TrajectoryRecord rec =
            impulsive_trajectory(sys, p, static_cast<double>(n_samples) * g_ + g_);
        std::vector<StatePoint> row;
        row.reserve(n_samples + 1);
        std::size_t seg = 0;
        for (std::size_t k = 0; k <= n_samples; ++k) {
            double t = static_cast<double>(k) * g_;
            while (seg + 1 < rec.segments.size() &&
                   rec.segments[seg + 1].start_time <= t + kTimeSlack) {
                ++seg;
            }
            row.push_back(flow.evaluate(std::max(0.0, t - rec.segments[seg].start_time),
                                        rec.segments[seg].start_point));
        }
        samples_.push_back(std::move(row));
    }
}

double OrbitTable::hat_stage(std::size_t i, std::size_t j, std::size_t i0) const {
    const auto& a = samples_[i];
    const auto& b = samples_[j];
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m_; ++k) {
        best = std::min(best, point_dist(a[i0 + k], b[i0 + k]));
    }
    return best;
}

double OrbitTable::stage_value(std::size_t i, std::size_t j, StageMetric kind,
                               std::size_t i0) const {
    const auto& a = samples_[i];
    const auto& b = samples_[j];
    switch (kind) {
        case StageMetric::Classical: return point_dist(a[i0], b[i0]);
        case StageMetric::Hat: return hat_stage(i, j, i0);
        case StageMetric::Bar: {
            double best = std::numeric_limits<double>::infinity();
            for (int k1 = 0; k1 < m_; ++k1) {
                for (int k2 = 0; k2 < m_; ++k2) {
                    best = std::min(best, point_dist(a[i0 + k1], b[i0 + k2]));
                }
            }
            return best;
        }
    }
    return 0.0;
}

bool OrbitTable::probe_separated(std::size_t i, std::size_t j, StageMetric kind,
                                 double T, double eps) const {
    const auto idx_T = static_cast<std::size_t>(std::llround(T / g_));
    const std::size_t mid = idx_T / (2 * stage_step_) * stage_step_;
    for (std::size_t i0 : {std::size_t{0}, mid, idx_T}) {
        if (stage_value(i, j, kind, i0) >= eps) return true;
    }
    return false;
}

double OrbitTable::dyn_between(std::size_t i, std::size_t j, StageMetric kind,
                               double T) const {
    double worst = 0.0;
    visit_stages(T, [&](std::size_t i0) {
        worst = std::max(worst, stage_value(i, j, kind, i0));
        return false;
    });
    return worst;
}

bool OrbitTable::separated_at(std::size_t i, std::size_t j, StageMetric kind, double T,
                              double eps) const {
    return visit_stages(T, [&](std::size_t i0) {
        if (kind == StageMetric::Bar) {
            // bar <= hat, so a stage whose hat value stays below eps cannot
            // witness separation; the m^2 scan runs only when hat clears eps.
            if (hat_stage(i, j, i0) < eps) return false;
            return stage_value(i, j, StageMetric::Bar, i0) >= eps;
        }
        return stage_value(i, j, kind, i0) >= eps;
    });
}

bool OrbitTable::covers(std::size_t i, std::size_t j, StageMetric kind, double T,
                        double eps) const {
    return !visit_stages(T, [&](std::size_t i0) {
        if (kind == StageMetric::Bar) {
            if (hat_stage(i, j, i0) < eps) return false;  // bar <= hat < eps
            return stage_value(i, j, StageMetric::Bar, i0) >= eps;
        }
        return stage_value(i, j, kind, i0) >= eps;
    });
}

double birkhoff_integral(const ImpulsiveSystem& sys, const Potential& f,
                         const StatePoint& x, double T, double dt) {
    if (!(T > 0.0)) throw std::invalid_argument("integration horizon must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("integration step must be positive");
    const Space& space = sys.space();
    const Semiflow& flow = sys.flow();
    TrajectoryRecord rec = impulsive_trajectory(sys, x, T);
    double total = 0.0;
    for (const FlowSegment& seg : rec.segments) {
        if (!(seg.duration > 0.0)) continue;
        auto nsub = static_cast<std::size_t>(std::ceil(seg.duration / dt - 1e-12));
        nsub = std::max<std::size_t>(nsub, 1);
        double h = seg.duration / static_cast<double>(nsub);
        double acc = 0.5 * f.evaluate(space, seg.start_point);
        for (std::size_t k = 1; k < nsub; ++k) {
            acc += f.evaluate(space,
                              flow.evaluate(static_cast<double>(k) * h, seg.start_point));
        }
        acc += 0.5 * f.evaluate(space, flow.evaluate(seg.duration, seg.start_point));
        total += h * acc;
    }
    return total;
}

double log_sum_exp(const std::vector<double>& exponents) {
    if (exponents.empty()) throw std::invalid_argument("log_sum_exp of an empty list");
    double mx = *std::max_element(exponents.begin(), exponents.end());
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - mx);
    return mx + std::log(acc);
}

double partition_function(const ImpulsiveSystem& sys, const Potential& f,
                          const std::vector<StatePoint>& set, double T, double dt) {
    if (set.empty()) throw std::invalid_argument("partition set is empty");
    std::vector<double> exponents;
    exponents.reserve(set.size());
    for (const StatePoint& x : set) {
        exponents.push_back(birkhoff_integral(sys, f, x, T, dt));
    }
    return log_sum_exp(exponents);
}

std::vector<std::size_t> build_separated(const OrbitTable& table, StageMetric kind,
                                         double T, double eps) {
    std::vector<std::size_t> accepted;
    for (std::size_t i = 0; i < table.size(); ++i) {
        bool ok = true;
        for (std::size_t j : accepted) {
            if (!table.separated_at(i, j, kind, T, eps)) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(i);
    }
    return accepted;
}

std::vector<std::size_t> build_spanning(const OrbitTable& table, StageMetric kind,
                                        double T, double eps) {
    const std::size_t n = table.size();

    // Staying close at the probe stages is necessary for covering and the
    // relation is symmetric, so the probe balls double as candidate lists
    // and as upper bounds on live coverage (maintained under marking).
    std::vector<std::vector<std::uint32_t>> ball(n);
    for (std::size_t i = 0; i < n; ++i) ball[i].push_back(static_cast<std::uint32_t>(i));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!table.probe_separated(i, j, kind, T, eps)) {
                ball[i].push_back(static_cast<std::uint32_t>(j));
                ball[j].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }

    std::vector<bool> covered(n, false);
    std::size_t uncovered = n;
    std::vector<std::size_t> ub(n);
    for (std::size_t i = 0; i < n; ++i) ub[i] = ball[i].size();

    auto exact_row = [&](std::size_t i) {
        std::vector<std::size_t> list;
        for (std::uint32_t j : ball[i]) {
            if (!covered[j] && table.covers(i, j, kind, T, eps)) list.push_back(j);
        }
        return list;
    };

    // Lazy greedy max-cover. Every heap value upper-bounds the entry's live
    // coverage; an entry is accepted only when its exact count was computed
    // against the current covered set and still tops the heap, so the picks
    // match the naive greedy sweep with ties broken by candidate index.
    struct Entry {
        std::size_t value;
        std::size_t index;
        bool exact;
        std::size_t version;
    };
    auto lower_priority = [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.index != b.index) return a.index > b.index;
        return a.exact && !b.exact;  // refine cheap bounds before exact ones
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(
        lower_priority);
    for (std::size_t i = 0; i < n; ++i) heap.push({ub[i], i, false, 0});

    std::vector<std::size_t> picks;
    std::size_t version = 0;
    while (uncovered > 0) {
        if (heap.empty()) {
            throw std::logic_error("grid cover stalled; grid cannot span itself");
        }
        Entry e = heap.top();
        heap.pop();
        if (e.exact && e.version == version) {
            if (e.value == 0) {
                throw std::logic_error("grid cover stalled; grid cannot span itself");
            }
            picks.push_back(e.index);
            for (std::size_t j : exact_row(e.index)) {
                covered[j] = true;
                --uncovered;
                for (std::uint32_t i2 : ball[j]) {
                    if (ub[i2] > 0) --ub[i2];
                }
            }
            ++version;
            continue;
        }
        if (ub[e.index] < e.value) {
            heap.push({ub[e.index], e.index, false, version});
            continue;
        }
        heap.push({exact_row(e.index).size(), e.index, true, version});
    }
    return picks;
}

bool verify_spanning(const OrbitTable& table, StageMetric kind, double T, double eps,
                     const std::vector<std::size_t>& set) {
    for (std::size_t j = 0; j < table.size(); ++j) {
        bool hit = false;
        for (std::size_t i : set) {
            if (table.covers(i, j, kind, T, eps)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

const SlopeFit* PressureTable::fit_for(double eps, double delta) const {
    for (const SlopeFit& f : fits) {
        if (std::fabs(f.eps - eps) <= 1e-15 && std::fabs(f.delta - delta) <= 1e-15) {
            return &f;
        }
    }
    return nullptr;
}

namespace {

SlopeFit fit_tail_slope(EstimatorKind kind, double eps, double delta,
                        const std::vector<PressureRow>& cell_rows,
                        std::size_t grid_size, std::vector<std::string>& warnings) {
    SlopeFit fit;
    fit.kind = kind;
    fit.eps = eps;
    fit.delta = delta;

    std::vector<std::pair<double, double>> pts;  // (T, logZ), unsaturated only
    for (const PressureRow& r : cell_rows) {
        if (r.set_size < grid_size) pts.emplace_back(r.T, r.logZ);
    }
    fit.saturated_tail = pts.size() < cell_rows.size();
    if (pts.size() < 2) {
        std::ostringstream os;
        os << "slope fit at eps=" << eps << " delta=" << delta
           << " uses grid-saturated rows; refine the grid";
        warnings.push_back(os.str());
        pts.clear();
        for (const PressureRow& r : cell_rows) pts.emplace_back(r.T, r.logZ);
    }

    std::size_t tail = std::max<std::size_t>(2, (pts.size() + 1) / 2);
    tail = std::min(tail, pts.size());
    std::vector<std::pair<double, double>> window(pts.end() - static_cast<long>(tail),
                                                  pts.end());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : window) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double k = static_cast<double>(window.size());
    double denom = k * sxx - sx * sx;
    fit.slope = denom != 0.0 ? (k * sxy - sx * sy) / denom : 0.0;
    double intercept = (sy - fit.slope * sx) / k;
    double ss = 0.0;
    for (auto [x, y] : window) {
        double r = y - (fit.slope * x + intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / k);
    fit.points_used = static_cast<int>(window.size());
    return fit;
}

}  // namespace

PressureTable estimate_pressure(const ImpulsiveSystem& sys, const Potential& f,
                                EstimatorKind kind, const Schedule& schedule,
                                const EstimateOptions& options) {
    schedule.validate();
    const std::size_t grid_size = schedule.grid.points.size();
    const double min_eps = schedule.eps_list.back();
    if (is_spanning_kind(kind) && schedule.grid.mesh > min_eps / 4.0 + 1e-12) {
        throw std::invalid_argument(
            "grid mesh exceeds eps/4; spanning estimates would not be honest");
    }
    const StageMetric stage = stage_of(kind);
    const double dt = schedule.birkhoff_dt();
    const double T_max = schedule.T_list.back();

    PressureTable out;
    out.kind = kind;
    for (double delta : schedule.delta_list) {
        PseudoMetricParams params = schedule.params_for(delta);
        OrbitTable table(sys, schedule.grid, delta, params.m, params.t_grid_step, T_max);
        for (double eps : schedule.eps_list) {
            for (double T : schedule.T_list) {
                auto started = std::chrono::steady_clock::now();
                std::vector<std::size_t> chosen = build_separated(table, stage, T, eps);
                double logZ;
                std::size_t set_size;
                if (is_spanning_kind(kind)) {
                    std::vector<std::size_t> cover = build_spanning(table, stage, T, eps);
                    auto z_of = [&](const std::vector<std::size_t>& idx) {
                        std::vector<StatePoint> pts;
                        pts.reserve(idx.size());
                        for (std::size_t i : idx) pts.push_back(schedule.grid.points[i]);
                        return partition_function(sys, f, pts, T, dt);
                    };
                    // Both sets span the grid; report whichever attempt gets
                    // closer to the infimum.
                    double z_cover = z_of(cover);
                    double z_sep = z_of(chosen);
                    if (z_cover <= z_sep) {
                        logZ = z_cover;
                        set_size = cover.size();
                    } else {
                        logZ = z_sep;
                        set_size = chosen.size();
                    }
                } else {
                    std::vector<StatePoint> pts;
                    pts.reserve(chosen.size());
                    for (std::size_t i : chosen) pts.push_back(schedule.grid.points[i]);
                    logZ = partition_function(sys, f, pts, T, dt);
                    set_size = chosen.size();
                }
                double seconds = 0.0;
                if (options.record_timings) {
                    seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - started)
                                  .count();
                }
                out.rows.push_back({kind, T, eps, delta, logZ, set_size, seconds});
            }
        }
    }

    for (double delta : schedule.delta_list) {
        for (double eps : schedule.eps_list) {
            std::vector<PressureRow> cell;
            for (const PressureRow& r : out.rows) {
                if (r.eps == eps && r.delta == delta) cell.push_back(r);
            }
            out.fits.push_back(
                fit_tail_slope(kind, eps, delta, cell, grid_size, out.warnings));
        }
    }

    if (!is_spanning_kind(kind)) {
        // Shrinking eps (resp. delta) can only add separated points, so the
        // partition value must not drop beyond numerical tolerance.
        for (double delta : schedule.delta_list) {
            for (double T : schedule.T_list) {
                double prev = -std::numeric_limits<double>::infinity();
                for (double eps : schedule.eps_list) {
                    for (const PressureRow& r : out.rows) {
                        if (r.delta == delta && r.T == T && r.eps == eps) {
                            if (r.logZ < prev - 1e-9) {
                                std::ostringstream os;
                                os << "eps-monotonicity violated at T=" << T
                                   << " delta=" << delta << " eps=" << eps
                                   << "; grid too coarse";
                                out.warnings.push_back(os.str());
                            }
                            prev = std::max(prev, r.logZ);
                        }
                    }
                }
            }
        }
        for (double eps : schedule.eps_list) {
            for (double T : schedule.T_list) {
                double prev = -std::numeric_limits<double>::infinity();
                for (double delta : schedule.delta_list) {
                    for (const PressureRow& r : out.rows) {
                        if (r.delta == delta && r.T == T && r.eps == eps) {
                            if (r.logZ < prev - 1e-9) {
                                std::ostringstream os;
                                os << "delta-monotonicity violated at T=" << T
                                   << " eps=" << eps << " delta=" << delta
                                   << "; grid too coarse";
                                out.warnings.push_back(os.str());
                            }
                            prev = std::max(prev, r.logZ);
                        }
                    }
                }
            }
        }
    }

    out.headline_eps = schedule.eps_list.back();
    out.headline_delta = schedule.delta_list.back();
    if (const SlopeFit* fit = out.fit_for(out.headline_eps, out.headline_delta)) {
        out.headline = fit->slope;
    }
    return out;
}

double variational_oracle(const std::string& system_id, const Potential& f) {
    auto integral = [&](double lo, double hi) {
        // Composite Simpson on the circle chart.
        const int n = 4096;
        Space circle = Space::circle();
        double h = (hi - lo) / n;
        double acc = f.evaluate(circle, StatePoint(lo)) + f.evaluate(circle, StatePoint(hi - 1e-15));
        for (int k = 1; k < n; ++k) {
            acc += (k % 2 == 1 ? 4.0 : 2.0) * f.evaluate(circle, StatePoint(lo + k * h));
        }
        return acc * h / 3.0;
    };
    if (system_id == "rotation_circle") {
        // Zero entropy; Lebesgue on the circle is the maximizer.
        if (f.is_constant()) return f.constant_value();
        return integral(0.0, 1.0);
    }
    if (system_id == "impulsive_circle") {
        // Zero entropy; the unique invariant probability is the normalized
        // arc measure on the periodic loop [0, 1/2).
        if (f.is_constant()) return f.constant_value();
        return 2.0 * integral(0.0, 0.5);
    }
    if (system_id == "suspension_doubling") {
        if (!f.is_constant()) {
            throw std::invalid_argument(
                "suspension oracle is documented for constant potentials only");
        }
        return std::log(2.0) + f.constant_value();
    }
    throw std::invalid_argument("no documented oracle for system: " + system_id);
}

StatePoint move_into_admissible(const ImpulsiveSystem& sys, const StatePoint& x) {
    StatePoint p = sys.space().canonical(x);
    if (classify_region(sys, p) == Region::InXxi) return p;
    const double step = sys.event_tol() / 4.0;
    for (double t = step; t <= 4.0 * sys.xi(); t += step) {
        StatePoint q = psi(sys, t, p);
        if (classify_region(sys, q) == Region::InXxi) return q;
    }
    throw std::runtime_error("point failed to reach the admissible region");
}

}  // namespace impress
