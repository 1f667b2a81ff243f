#include "impress/impulsive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace impress {

namespace {

constexpr double kStrictHitFloor = 1e-9;  // enforces the strict infimum over t > 0
constexpr double kMatchTol = 1e-9;

double point_gap(const Space& s, const StatePoint& a, const StatePoint& b) {
    return s.distance(a, b);
}

// Ternary minimization of t -> d(phi_t(x), target) over [lo, hi]. The
// distance is unimodal on a bracket of width two scan steps as long as
// consecutive events are separated by more than the scan step, which the
// spacing floor guarantees for well-configured systems.
struct RefinedMin {
    double t;
    double value;
};

RefinedMin refine_dip(const Semiflow& flow, const StatePoint& x, const StatePoint& target,
                      double lo, double hi) {
    const Space& s = flow.space();
    auto h = [&](double t) { return point_gap(s, flow.evaluate(t, x), target); };
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (h(m1) <= h(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    double t = 0.5 * (lo + hi);
    return {t, h(t)};
}

StatePoint sample_point(const Space& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (s.kind()) {
        case SpaceKind::Circle: return StatePoint(u(rng));
        case SpaceKind::Interval:
            return StatePoint(s.interval_min() +
                              (s.interval_max() - s.interval_min()) * u(rng));
        case SpaceKind::Torus2: return {u(rng), u(rng)};
        case SpaceKind::SuspensionDoubling: return {u(rng), s.roof() * u(rng)};
    }
    return StatePoint(0.0);
}

// Strict membership used by the validators: distances resolved down to the
// capture radius, unlike the event_tol resolution of classify_region.
bool strictly_in_D(const ImpulsiveSystem& sys, const StatePoint& x) {
    for (const StatePoint& d : sys.jumps().points) {
        if (point_gap(sys.space(), x, d) <= sys.jumps().capture_radius) return true;
    }
    return false;
}

bool strictly_in_tube(const ImpulsiveSystem& sys, const StatePoint& x) {
    const Space& s = sys.space();
    const double xi = sys.xi();
    const double step = sys.event_tol();
    for (const StatePoint& d : sys.jumps().points) {
        double prev2 = point_gap(s, sys.flow().evaluate(1e-12, d), x);
        double prev1 = prev2;
        for (double t = step; t < xi + step; t += step) {
            double cur = point_gap(s, sys.flow().evaluate(std::min(t, xi - 1e-12), d), x);
            if (prev1 <= prev2 && prev1 <= cur) {
                double lo = std::max(1e-12, t - 2.0 * step);
                double hi = std::min(t, xi - 1e-12);
                RefinedMin m = refine_dip(sys.flow(), d, x, lo, hi);
                if (m.value <= sys.jumps().capture_radius && m.t > 1e-10 &&
                    m.t < xi - 1e-10) {
                    return true;
                }
            }
            prev2 = prev1;
            prev1 = cur;
            if (t >= xi) break;
        }
    }
    return false;
}

bool strictly_in_Xxi(const ImpulsiveSystem& sys, const StatePoint& x) {
    return !strictly_in_D(sys, x) && !strictly_in_tube(sys, x);
}

}  // namespace

StatePoint ImpulseMap::apply(const Space& space, const StatePoint& d) const {
    for (const auto& [from, to] : pairs) {
        if (space.distance(from, d) <= kMatchTol) return to;
    }
    throw std::domain_error("impulse map applied off the trigger set");
}

ImpulsiveSystem::ImpulsiveSystem(Semiflow flow, JumpSet jumps, ImpulseMap impulses,
                                 double xi, double event_tol)
    : flow_(std::move(flow)),
      jumps_(std::move(jumps)),
      impulses_(std::move(impulses)),
      xi_(xi),
      event_tol_(event_tol) {
    if (!(xi_ > 0.0)) throw std::invalid_argument("tube length xi must be positive");
    if (!(event_tol_ > 0.0) || event_tol_ > xi_ / 4.0 + 1e-15) {
        throw std::invalid_argument("event_tol must lie in (0, xi/4]");
    }
    if (!(jumps_.capture_radius > 0.0)) {
        throw std::invalid_argument("capture radius must be positive");
    }
    const Space& s = flow_.space();
    for (StatePoint& p : jumps_.points) p = s.canonical(p);
    for (auto& [from, to] : impulses_.pairs) {
        from = s.canonical(from);
        to = s.canonical(to);
    }
    for (const StatePoint& p : jumps_.points) {
        bool mapped = false;
        for (const auto& [from, to] : impulses_.pairs) {
            if (s.distance(from, p) <= kMatchTol) mapped = true;
        }
        if (!mapped) {
            throw std::invalid_argument("every trigger point needs an impulse image");
        }
    }
}

ImpulsiveSystem ImpulsiveSystem::continuous(Semiflow flow) {
    return ImpulsiveSystem(std::move(flow), JumpSet{{}, 1e-6}, ImpulseMap{}, 1.0, 0.25);
}

std::optional<HitResult> first_hit(const ImpulsiveSystem& sys, const StatePoint& x,
                                   double t_max) {
    if (!sys.has_impulses() || !(t_max > 0.0)) return std::nullopt;
    const Semiflow& flow = sys.flow();
    const Space& space = flow.space();
    const auto& targets = sys.jumps().points;
    const double capture = sys.jumps().capture_radius;
    const double step = sys.event_tol();

    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;

    const auto n_steps = static_cast<long long>(std::ceil(t_max / step));
    std::vector<double> h_prev2(targets.size()), h_prev1(targets.size());
    StatePoint p_prev2 = flow.evaluate(0.0, x);
    StatePoint p_prev1 = p_prev2;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        h_prev2[j] = point_gap(space, p_prev2, targets[j]);
        h_prev1[j] = h_prev2[j];
    }

    for (long long i = 1; i <= n_steps + 1; ++i) {
        double t_i = std::min(static_cast<double>(i) * step, t_max);
        StatePoint p_i = flow.evaluate(t_i, x);
        double disp = std::max(point_gap(space, p_prev1, p_i),
                               point_gap(space, p_prev2, p_prev1));
        double t_mid = std::min(static_cast<double>(i - 1) * step, t_max);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            double h_i = point_gap(space, p_i, targets[j]);
            // A dip of the sampled distance marks a possible passage; the
            // threshold adapts to the locally observed flow displacement so
            // passages between samples are still flagged.
            bool dip = h_prev1[j] <= h_prev2[j] + 1e-15 && h_prev1[j] <= h_i + 1e-15;
            double threshold = std::max(4.0 * capture, 2.0 * disp);
            if (dip && h_prev1[j] <= threshold) {
                double lo = std::max(0.0, t_mid - step);
                double hi = std::min(t_i, t_max);
                RefinedMin m = refine_dip(flow, x, targets[j], lo, hi);
                if (m.value <= capture && m.t > kStrictHitFloor && m.t < best_t) {
                    best_t = m.t;
                    best_j = j;
                }
            }
            h_prev2[j] = h_prev1[j];
            h_prev1[j] = h_i;
        }
        p_prev2 = p_prev1;
        p_prev1 = p_i;
        // Later dips can only produce later hits once a hit is confirmed.
        if (best_t < t_mid - step) break;
        if (t_i >= t_max) {
            // Terminal sample: a dip sitting on the boundary still counts.
            for (std::size_t j = 0; j < targets.size(); ++j) {
                if (h_prev1[j] <= std::max(4.0 * capture, 2.0 * disp)) {
                    RefinedMin m =
                        refine_dip(flow, x, targets[j], std::max(0.0, t_i - step), t_max);
                    if (m.value <= capture && m.t > kStrictHitFloor && m.t < best_t) {
                        best_t = m.t;
                        best_j = j;
                    }
                }
            }
            break;
        }
    }

    if (!std::isfinite(best_t) || best_t > t_max + 1e-12) return std::nullopt;
    return HitResult{std::min(best_t, t_max), best_j};
}

std::optional<double> first_hitting_time(const ImpulsiveSystem& sys, const StatePoint& x,
                                         double t_max) {
    auto hit = first_hit(sys, x, t_max);
    if (!hit) return std::nullopt;
    return hit->time;
}

TrajectoryRecord impulsive_trajectory(const ImpulsiveSystem& sys, const StatePoint& x0,
                                      double T) {
    if (T < 0.0 || !std::isfinite(T)) {
        throw std::invalid_argument("trajectory horizon must be finite and nonnegative");
    }
    const Space& space = sys.space();
    TrajectoryRecord rec;
    rec.x0 = space.canonical(x0);
    rec.horizon = T;
    rec.segments.push_back({0.0, rec.x0, 0.0});

    const double eta_floor = sys.xi() / 2.0;
    const auto guard =
        static_cast<std::size_t>(std::ceil(T / eta_floor)) + 8;

    double cursor = 0.0;
    while (true) {
        double remaining = T - cursor;
        std::optional<HitResult> hit =
            remaining > 0.0 ? first_hit(sys, rec.segments.back().start_point, remaining)
                            : std::nullopt;
        if (!hit) {
            rec.segments.back().duration = remaining;
            break;
        }
        double tau_abs = std::min(cursor + hit->time, T);
        rec.segments.back().duration = tau_abs - cursor;
        const StatePoint& d = sys.jumps().points[hit->jump_index];
        rec.impulse_times.push_back(tau_abs);
        rec.hit_points.push_back(d);
        if (rec.impulse_times.size() > guard) {
            std::ostringstream msg;
            msg << "impulse spacing violation: " << rec.impulse_times.size()
                << " impulses within horizon " << T << " (floor " << eta_floor << ")";
            throw spacing_violation(msg.str(), static_cast<int>(rec.impulse_times.size()),
                                    T);
        }
        StatePoint landing = sys.impulses().apply(space, d);
        rec.segments.push_back({tau_abs, landing, 0.0});
        cursor = tau_abs;
        if (cursor >= T) break;
    }
    return rec;
}

StatePoint TrajectoryRecord::state_at(const Semiflow& flow, double t) const {
    if (t < -1e-12 || t > horizon + 1e-12) {
        throw std::domain_error("time outside the recorded horizon");
    }
    t = std::clamp(t, 0.0, horizon);
    // Last segment whose start time is <= t; right continuity at impulses.
    // The slack absorbs the residual of the event refinement so that queries
    // at the mathematical jump time resolve to the post-jump segment.
    std::size_t lo = 0, hi = segments.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (segments[mid].start_time <= t + 1e-12) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const FlowSegment& seg = segments[lo];
    return flow.evaluate(std::max(0.0, t - seg.start_time), seg.start_point);
}

StatePoint TrajectoryRecord::segment_end(const Semiflow& flow, std::size_t k) const {
    if (k >= segments.size()) throw std::out_of_range("segment index");
    return flow.evaluate(segments[k].duration, segments[k].start_point);
}

StatePoint psi(const ImpulsiveSystem& sys, double t, const StatePoint& x) {
    TrajectoryRecord rec = impulsive_trajectory(sys, x, t);
    return rec.state_at(sys.flow(), t);
}

Region classify_region(const ImpulsiveSystem& sys, const StatePoint& x) {
    const Space& s = sys.space();
    const double tol = sys.event_tol();
    StatePoint p = s.canonical(x);
    for (const StatePoint& d : sys.jumps().points) {
        if (s.distance(p, d) <= tol) return Region::InD;
    }
    for (const StatePoint& d : sys.jumps().points) {
        for (double t = tol; t < sys.xi(); t += tol) {
            if (s.distance(p, sys.flow().evaluate(t, d)) <= tol) return Region::InDxi;
        }
    }
    return Region::InXxi;
}

std::optional<double> tau_star_xi(const ImpulsiveSystem& sys, const StatePoint& x,
                                  double horizon) {
    switch (classify_region(sys, x)) {
        case Region::InD: return 0.0;
        case Region::InDxi:
            throw std::domain_error("tau star is undefined on the open tube");
        case Region::InXxi: return first_hitting_time(sys, x, horizon);
    }
    return std::nullopt;
}

double measure_min_spacing(const ImpulsiveSystem& sys, int samples, double horizon,
                           std::uint64_t seed) {
    if (!sys.has_impulses()) return std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::vector<StatePoint> starts;
    for (const auto& [from, to] : sys.impulses().pairs) starts.push_back(to);
    for (int i = 0; i < samples; ++i) starts.push_back(sample_point(sys.space(), rng));
    double eta = std::numeric_limits<double>::infinity();
    for (const StatePoint& x : starts) {
        TrajectoryRecord rec = impulsive_trajectory(sys, x, horizon);
        for (std::size_t n = 1; n < rec.impulse_times.size(); ++n) {
            eta = std::min(eta, rec.impulse_times[n] - rec.impulse_times[n - 1]);
        }
    }
    return eta;
}

bool ValidationReport::passed() const {
    return std::none_of(results.begin(), results.end(), [](const ConditionResult& r) {
        return r.status == ConditionStatus::Fail;
    });
}

const ConditionResult* ValidationReport::find(const std::string& id) const {
    for (const ConditionResult& r : results) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

ValidationReport validate_conditions(const ImpulsiveSystem& sys, int samples,
                                     std::uint64_t seed) {
    ValidationReport rep;
    const Space& s = sys.space();
    const auto& D = sys.jumps().points;
    const double capture = sys.jumps().capture_radius;
    std::mt19937_64 rng(seed);

    std::vector<StatePoint> images;
    for (const StatePoint& d : D) images.push_back(sys.impulses().apply(s, d));

    // C1, exact on the finite trigger set.
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < D.size(); ++i) {
            for (std::size_t j = i + 1; j < D.size(); ++j) {
                double den = s.distance(D[i], D[j]);
                if (den <= capture) continue;
                worst = std::max(worst, s.distance(images[i], images[j]) / den);
            }
        }
        rep.results.push_back({"C1-lipschitz",
                               worst <= 1.0 + 1e-12 ? ConditionStatus::Pass
                                                    : ConditionStatus::Fail,
                               worst, "max ratio d(I x, I y) / d(x, y) over trigger pairs"});

        double margin = std::numeric_limits<double>::infinity();
        for (const StatePoint& img : images) {
            for (const StatePoint& d : D) margin = std::min(margin, s.distance(img, d));
        }
        rep.results.push_back({"C1-image-disjoint",
                               margin > capture ? ConditionStatus::Pass
                                                : ConditionStatus::Fail,
                               margin, "min distance from impulse images to the trigger set"});
    }

    // C4, sampled along the tubes of D and of I(D).
    auto tube_checks = [&](const std::vector<StatePoint>& A, const std::string& tag) {
        const double step = sys.event_tol() / 2.0;
        double self_margin = std::numeric_limits<double>::infinity();
        for (const StatePoint& a : A) {
            for (double t = step; t < sys.xi(); t += step) {
                StatePoint p = sys.flow().evaluate(t, a);
                for (const StatePoint& b : A) {
                    self_margin = std::min(self_margin, s.distance(p, b));
                }
            }
        }
        rep.results.push_back({"C4-tube-clear-" + tag,
                               self_margin > capture ? ConditionStatus::Pass
                                                     : ConditionStatus::Fail,
                               self_margin, "min distance from open tube back to its base set"});

        double cross = std::numeric_limits<double>::infinity();
        double cval = 1.0;
        for (std::size_t i = 0; i < A.size(); ++i) {
            for (std::size_t j = i + 1; j < A.size(); ++j) {
                for (double t = 0.0; t < sys.xi(); t += step) {
                    StatePoint pi = sys.flow().evaluate(t, A[i]);
                    StatePoint pj = sys.flow().evaluate(t, A[j]);
                    cross = std::min(cross, s.distance(pi, pj));
                }
                for (double t = 0.0; t < sys.xi(); t += step) {
                    for (double u = t + step; u < sys.xi(); u += step) {
                        double num = s.distance(sys.flow().evaluate(t, A[i]),
                                                sys.flow().evaluate(t, A[j]));
                        double den = s.distance(sys.flow().evaluate(u, A[i]),
                                                sys.flow().evaluate(u, A[j]));
                        if (den > capture) cval = std::max(cval, num / den);
                    }
                }
            }
        }
        if (A.size() > 1) {
            rep.results.push_back({"C4-tube-disjoint-" + tag,
                                   cross > capture ? ConditionStatus::Pass
                                                   : ConditionStatus::Fail,
                                   cross, "min distance between distinct forward tubes"});
        }
        rep.results.push_back({"C4-constant-" + tag,
                               cval < 1e6 ? ConditionStatus::Pass : ConditionStatus::Fail,
                               cval, "observed half-tube comparison constant"});
    };
    if (!D.empty()) {
        tube_checks(D, "D");
        tube_checks(images, "ID");
    }

    // Sampled diagnostics; they can flag problems but not prove the
    // topological conditions, so they never report better than Warn.
    {
        int consistent = 0;
        int total = 0;
        for (const StatePoint& d : D) {
            for (double t = sys.event_tol(); t < sys.xi(); t += sys.event_tol()) {
                ++total;
                Region r = classify_region(sys, sys.flow().evaluate(t, d));
                if (r != Region::InXxi) ++consistent;
            }
        }
        double frac = total == 0 ? 1.0 : static_cast<double>(consistent) / total;
        rep.results.push_back({"C3-regularity", ConditionStatus::Warn, frac,
                               "sampled tube membership consistency (sampled only)"});
    }

    {
        double recur = std::numeric_limits<double>::infinity();
        for (const StatePoint& img : images) {
            TrajectoryRecord rec = impulsive_trajectory(sys, img, std::max(5.0, 20.0 * sys.xi()));
            for (double t = sys.xi(); t < rec.horizon; t += sys.event_tol()) {
                recur = std::min(recur, s.distance(rec.state_at(sys.flow(), t), img));
            }
        }
        rep.results.push_back({"C2-nonwandering", ConditionStatus::Warn, recur,
                               "closest sampled return to an impulse image (sampled only)"});
    }

    {
        // Modulus of continuity of the restricted hitting time, sampled at
        // shrinking perturbation scales on the admissible region.
        double modulus = 0.0;
        const double horizon = 50.0;
        const double scale = 1e-4;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        int used = 0;
        for (int i = 0; i < samples && used < 50; ++i) {
            StatePoint x = sample_point(s, rng);
            if (!strictly_in_Xxi(sys, x)) continue;
            StatePoint y = x;
            y.c[0] += scale * u(rng);
            try {
                y = s.canonical(y);
            } catch (const std::domain_error&) {
                continue;
            }
            if (!strictly_in_Xxi(sys, y)) continue;
            auto tx = first_hitting_time(sys, x, horizon);
            auto ty = first_hitting_time(sys, y, horizon);
            if (!tx || !ty) continue;
            if (std::fabs(*tx - *ty) < horizon / 2.0) {
                modulus = std::max(modulus, std::fabs(*tx - *ty));
                ++used;
            }
        }
        rep.results.push_back({"C5-tau-continuity", ConditionStatus::Warn, modulus,
                               "max |tau(x) - tau(y)| at perturbation scale 1e-4 (sampled only)"});
    }

    if (!D.empty()) {
        int violations = 0;
        int used = 0;
        std::uniform_real_distribution<double> ut(0.0, 5.0);
        for (int i = 0; i < samples && used < 100; ++i) {
            StatePoint x = sample_point(s, rng);
            if (!strictly_in_Xxi(sys, x)) continue;
            ++used;
            StatePoint y = psi(sys, ut(rng), x);
            if (!strictly_in_Xxi(sys, y)) ++violations;
        }
        rep.results.push_back({"invariance-Xxi",
                               violations == 0 ? ConditionStatus::Pass
                                               : ConditionStatus::Fail,
                               static_cast<double>(violations),
                               "sampled forward invariance of the admissible region"});

        double eta = measure_min_spacing(sys, std::min(samples, 64), 10.0, seed + 1);
        ConditionStatus st = ConditionStatus::Pass;
        if (eta < sys.xi()) st = ConditionStatus::Fail;
        rep.results.push_back({"spacing-eta", st, eta,
                               "min observed gap between consecutive impulses"});
    }

    return rep;
}

}  // namespace impress
