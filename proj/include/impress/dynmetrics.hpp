#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "impress/impulsive.hpp"

namespace impress {

// Discretization of the time-smoothed pseudometrics.
//
//   hat:  inf over one shift  s      in [0, delta)   of d(psi_s x, psi_s y)
//   bar:  inf over two shifts s1, s2 in [0, delta)^2 of d(psi_s1 x, psi_s2 y)
//
// The half-open interval is sampled on the grid {k*delta/m : 0 <= k < m}; the
// endpoint delta is deliberately excluded. The grid minimum over-estimates
// the true infimum and is monotone nonincreasing under grid refinement.
// For discontinuous semiflows the sampled values also depend on where the
// grid falls relative to impulse times; the bias is one-sided (upward).
struct PseudoMetricParams {
    double delta = 0.1;
    int m = 32;
    double t_grid_step = 0.025;

    static PseudoMetricParams with_delta(double delta, int m = 32) {
        PseudoMetricParams p;
        p.delta = delta;
        p.m = m;
        p.t_grid_step = delta / 4.0;
        p.validate();
        return p;
    }

    void validate() const;
};

enum class StageMetric { Classical, Hat, Bar };

// Pseudometrics evaluated at the initial time (no dynamical sup).
double d_hat(const ImpulsiveSystem& sys, const PseudoMetricParams& params,
             const StatePoint& x, const StatePoint& y);
double d_bar(const ImpulsiveSystem& sys, const PseudoMetricParams& params,
             const StatePoint& x, const StatePoint& y);

// Dynamical orbit distance: max over t in {0, t_grid_step, ...} united with
// {T} of the stage metric applied at (psi_t x, psi_t y). The same number
// decides spanning (< eps) and separation (>= eps) at this resolution.
double dyn_dist(const ImpulsiveSystem& sys, StageMetric kind,
                const PseudoMetricParams& params, double T, const StatePoint& x,
                const StatePoint& y);

// Finite sample of the identification x ~ I(x) used by the quotient metric.
// Pairs are stored symmetric and reflexive, and are closed under the rule
// that two trigger points with a common image are themselves identified.
struct EquivalenceSample {
    std::vector<StatePoint> base_points;
    std::vector<std::pair<StatePoint, StatePoint>> relation_pairs;

    static EquivalenceSample from_system(const ImpulsiveSystem& sys);
};

// Chain pseudometric of the quotient: shortest path in the graph whose nodes
// are base_points plus {x, y}, with zero-weight edges on identified pairs and
// all other edges weighted by the space metric. This upper-bounds the true
// chain infimum and never exceeds d(x, y).
double quotient_distance(const EquivalenceSample& sample, const Space& space,
                         const StatePoint& x, const StatePoint& y);

// Flows x for time t and returns the canonical class representative of the
// result (impulse images stand in for trigger points). Requires x in the
// admissible region; throws std::domain_error otherwise.
StatePoint project_and_flow_quotient(const ImpulsiveSystem& sys,
                                     const EquivalenceSample& sample, double t,
                                     const StatePoint& x);

}  // namespace impress
