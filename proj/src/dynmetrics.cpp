#include "impress/dynmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace impress {

namespace {

constexpr double kMatchTol = 1e-12;

// Stage samples psi_{t+s}(x) for s on the shift grid, via one shared record.
std::vector<StatePoint> stage_samples(const ImpulsiveSystem& sys,
                                      const TrajectoryRecord& rec, double t,
                                      const PseudoMetricParams& p) {
    std::vector<StatePoint> out;
    out.reserve(static_cast<std::size_t>(p.m));
    for (int k = 0; k < p.m; ++k) {
        out.push_back(rec.state_at(sys.flow(), t + k * p.delta / p.m));
    }
    return out;
}

double stage_value(const ImpulsiveSystem& sys, StageMetric kind,
                   const PseudoMetricParams& p, const TrajectoryRecord& rx,
                   const TrajectoryRecord& ry, double t) {
    const Space& s = sys.space();
    if (kind == StageMetric::Classical) {
        return s.distance(rx.state_at(sys.flow(), t), ry.state_at(sys.flow(), t));
    }
    std::vector<StatePoint> ax = stage_samples(sys, rx, t, p);
    std::vector<StatePoint> ay = stage_samples(sys, ry, t, p);
    double best = std::numeric_limits<double>::infinity();
    if (kind == StageMetric::Hat) {
        for (int k = 0; k < p.m; ++k) best = std::min(best, s.distance(ax[k], ay[k]));
    } else {
        for (int k1 = 0; k1 < p.m; ++k1) {
            for (int k2 = 0; k2 < p.m; ++k2) {
                best = std::min(best, s.distance(ax[k1], ay[k2]));
            }
        }
    }
    return best;
}

}  // namespace

void PseudoMetricParams::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (m < 2) throw std::invalid_argument("shift grid needs at least 2 samples");
    if (!(t_grid_step > 0.0) || t_grid_step > delta / 2.0 + 1e-15) {
        throw std::invalid_argument("t_grid_step must lie in (0, delta/2]");
    }
}

double d_hat(const ImpulsiveSystem& sys, const PseudoMetricParams& params,
             const StatePoint& x, const StatePoint& y) {
    params.validate();
    TrajectoryRecord rx = impulsive_trajectory(sys, x, params.delta);
    TrajectoryRecord ry = impulsive_trajectory(sys, y, params.delta);
    return stage_value(sys, StageMetric::Hat, params, rx, ry, 0.0);
}

double d_bar(const ImpulsiveSystem& sys, const PseudoMetricParams& params,
             const StatePoint& x, const StatePoint& y) {
    params.validate();
    TrajectoryRecord rx = impulsive_trajectory(sys, x, params.delta);
    TrajectoryRecord ry = impulsive_trajectory(sys, y, params.delta);
    return stage_value(sys, StageMetric::Bar, params, rx, ry, 0.0);
}

double dyn_dist(const ImpulsiveSystem& sys, StageMetric kind,
                const PseudoMetricParams& params, double T, const StatePoint& x,
                const StatePoint& y) {
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
    double horizon = T + (kind == StageMetric::Classical ? 0.0 : params.delta);
    TrajectoryRecord rx = impulsive_trajectory(sys, x, horizon);
    TrajectoryRecord ry = impulsive_trajectory(sys, y, horizon);
    double worst = 0.0;
    for (double t = 0.0; t < T - 1e-12; t += params.t_grid_step) {
        worst = std::max(worst, stage_value(sys, kind, params, rx, ry, t));
    }
    worst = std::max(worst, stage_value(sys, kind, params, rx, ry, T));
    return worst;
}

EquivalenceSample EquivalenceSample::from_system(const ImpulsiveSystem& sys) {
    EquivalenceSample sample;
    const Space& s = sys.space();
    auto add_point = [&](const StatePoint& p) -> std::size_t {
        for (std::size_t i = 0; i < sample.base_points.size(); ++i) {
            if (s.distance(sample.base_points[i], p) <= kMatchTol) return i;
        }
        sample.base_points.push_back(p);
        return sample.base_points.size() - 1;
    };
    auto link = [&](const StatePoint& a, const StatePoint& b) {
        sample.relation_pairs.emplace_back(a, b);
        sample.relation_pairs.emplace_back(b, a);
    };
    std::vector<std::pair<StatePoint, StatePoint>> edges;
    for (const StatePoint& d : sys.jumps().points) {
        StatePoint img = sys.impulses().apply(s, d);
        add_point(d);
        add_point(img);
        edges.emplace_back(d, img);
    }
    for (const auto& [d, img] : edges) link(d, img);
    // Trigger points sharing an image are identified with each other too.
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            if (s.distance(edges[i].second, edges[j].second) <= kMatchTol) {
                link(edges[i].first, edges[j].first);
            }
        }
    }
    for (const StatePoint& p : sample.base_points) {
        sample.relation_pairs.emplace_back(p, p);
    }
    return sample;
}

double quotient_distance(const EquivalenceSample& sample, const Space& space,
                         const StatePoint& x, const StatePoint& y) {
    std::vector<StatePoint> nodes = sample.base_points;
    nodes.push_back(space.canonical(x));
    nodes.push_back(space.canonical(y));
    const std::size_t n = nodes.size();
    const std::size_t src = n - 2;
    const std::size_t dst = n - 1;

    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double d = space.distance(nodes[i], nodes[j]);
            w[i][j] = d;
            w[j][i] = d;
        }
    }
    for (const auto& [a, b] : sample.relation_pairs) {
        std::size_t ia = n, ib = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (ia == n && space.distance(nodes[i], a) <= kMatchTol) ia = i;
            if (ib == n && space.distance(nodes[i], b) <= kMatchTol) ib = i;
        }
        if (ia < n && ib < n) {
            w[ia][ib] = 0.0;
            w[ib][ia] = 0.0;
        }
    }

    // Dijkstra on the dense graph; node counts here are tiny.
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<bool> done(n, false);
    dist[src] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!done[i] && (best == n || dist[i] < dist[best])) best = i;
        }
        if (best == n || !std::isfinite(dist[best])) break;
        done[best] = true;
        if (best == dst) break;
        for (std::size_t j = 0; j < n; ++j) {
            dist[j] = std::min(dist[j], dist[best] + w[best][j]);
        }
    }
    return dist[dst];
}

StatePoint project_and_flow_quotient(const ImpulsiveSystem& sys,
                                     const EquivalenceSample& sample, double t,
                                     const StatePoint& x) {
    (void)sample;
    if (classify_region(sys, x) != Region::InXxi) {
        throw std::domain_error("projection requires a point in the admissible region");
    }
    StatePoint p = psi(sys, t, x);
    // If the flow parked exactly on a trigger point (horizon boundary), its
    // class representative is the impulse image.
    for (const StatePoint& d : sys.jumps().points) {
        if (sys.space().distance(p, d) <= sys.jumps().capture_radius) {
            return sys.impulses().apply(sys.space(), d);
        }
    }
    return p;
}

}  // namespace impress
