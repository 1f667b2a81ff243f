#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "impress/flows.hpp"
#include "impress/geometry.hpp"

namespace impress {

// Finite set of impulse trigger points. Points closer than capture_radius
// are treated as equal during event detection, so the radius has to stay
// well below the pairwise distances of the configured points.
struct JumpSet {
    std::vector<StatePoint> points;
    double capture_radius = 1e-6;

    [[nodiscard]] bool empty() const { return points.empty(); }
};

// Map applied when the orbit reaches a trigger point. Defined only on the
// configured points; lookups match within a strict tolerance because hit
// states are snapped to the trigger point they were detected at.
struct ImpulseMap {
    std::vector<std::pair<StatePoint, StatePoint>> pairs;

    [[nodiscard]] StatePoint apply(const Space& space, const StatePoint& d) const;
};

// Thrown when a trajectory accumulates impulses faster than the configured
// spacing floor allows; indicates a misconfigured system rather than a bug.
class spacing_violation : public std::runtime_error {
public:
    spacing_violation(std::string what, int impulses, double horizon)
        : std::runtime_error(std::move(what)), impulses_(impulses), horizon_(horizon) {}

    [[nodiscard]] int impulses() const { return impulses_; }
    [[nodiscard]] double horizon() const { return horizon_; }

private:
    int impulses_;
    double horizon_;
};

// Semiflow with impulses: flow until the orbit reaches a trigger point,
// apply the impulse map, continue from the image. An empty trigger set
// degenerates to the plain continuous flow, which keeps the estimation
// layers uniform across continuous and impulsive systems.
class ImpulsiveSystem {
public:
    ImpulsiveSystem(Semiflow flow, JumpSet jumps, ImpulseMap impulses, double xi,
                    double event_tol);
    static ImpulsiveSystem continuous(Semiflow flow);

    [[nodiscard]] const Semiflow& flow() const { return flow_; }
    [[nodiscard]] const Space& space() const { return flow_.space(); }
    [[nodiscard]] const JumpSet& jumps() const { return jumps_; }
    [[nodiscard]] const ImpulseMap& impulses() const { return impulses_; }
    [[nodiscard]] double xi() const { return xi_; }
    [[nodiscard]] double event_tol() const { return event_tol_; }
    [[nodiscard]] bool has_impulses() const { return !jumps_.empty(); }

private:
    Semiflow flow_;
    JumpSet jumps_;
    ImpulseMap impulses_;
    double xi_;
    double event_tol_;
};

struct FlowSegment {
    double start_time = 0.0;
    StatePoint start_point;
    double duration = 0.0;
};

// Piecewise description of an impulsive orbit over [0, horizon]. Segment k
// flows continuously from its start point; impulse k happens at the end of
// segment k, jumping from hit_points[k] to segments[k+1].start_point.
struct TrajectoryRecord {
    StatePoint x0;
    double horizon = 0.0;
    std::vector<FlowSegment> segments;
    std::vector<double> impulse_times;
    std::vector<StatePoint> hit_points;

    // State at time t, right-continuous across impulses. t in [0, horizon].
    [[nodiscard]] StatePoint state_at(const Semiflow& flow, double t) const;
    // Endpoint of segment k just before the impulse (the trigger point).
    [[nodiscard]] StatePoint segment_end(const Semiflow& flow, std::size_t k) const;
};

// Least t > 0 with the orbit of the continuous flow at a trigger point,
// searched over (0, t_max]. Coarse scan at step event_tol, then ternary
// refinement of every candidate dip of the distance to the trigger set.
// Returns the hit time and the index of the trigger point that was hit.
struct HitResult {
    double time;
    std::size_t jump_index;
};
[[nodiscard]] std::optional<HitResult> first_hit(const ImpulsiveSystem& sys,
                                                 const StatePoint& x, double t_max);
[[nodiscard]] std::optional<double> first_hitting_time(const ImpulsiveSystem& sys,
                                                       const StatePoint& x, double t_max);

[[nodiscard]] TrajectoryRecord impulsive_trajectory(const ImpulsiveSystem& sys,
                                                    const StatePoint& x0, double T);

// psi(t, x): the impulsive semiflow itself.
[[nodiscard]] StatePoint psi(const ImpulsiveSystem& sys, double t, const StatePoint& x);

enum class Region { InD, InDxi, InXxi };

// Finite-resolution membership: distances within event_tol count as "on"
// the trigger set or its forward tube of length xi.
[[nodiscard]] Region classify_region(const ImpulsiveSystem& sys, const StatePoint& x);

// tau restricted to the admissible region: hitting time on X_xi, zero on D.
// Undefined (throws) on the open tube D_xi.
[[nodiscard]] std::optional<double> tau_star_xi(const ImpulsiveSystem& sys,
                                                const StatePoint& x, double horizon);

// Minimum observed gap between consecutive impulses over sampled orbits.
// +infinity when no orbit shows two impulses within the horizon.
[[nodiscard]] double measure_min_spacing(const ImpulsiveSystem& sys, int samples,
                                         double horizon, std::uint64_t seed);

enum class ConditionStatus { Pass, Warn, Fail };

struct ConditionResult {
    std::string id;
    ConditionStatus status;
    double measured;
    std::string detail;
};

struct ValidationReport {
    std::vector<ConditionResult> results;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] const ConditionResult* find(const std::string& id) const;
};

// Checks the structural requirements on the impulse data: exact Lipschitz
// and image-disjointness checks on the finite trigger set, sampled half-tube
// and invariance checks, and sampled continuity diagnostics that can warn
// but cannot prove the topological conditions.
[[nodiscard]] ValidationReport validate_conditions(const ImpulsiveSystem& sys,
                                                   int samples = 200,
                                                   std::uint64_t seed = 1);

}  // namespace impress
