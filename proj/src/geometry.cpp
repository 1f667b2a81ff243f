#include "impress/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace impress {

namespace {

constexpr double kChartSlack = 1e-12;

double wrap_unit(double v) {
    double r = std::fmod(v, 1.0);
    if (r < 0.0) r += 1.0;
    if (r >= 1.0) r -= 1.0;  // guards fmod landing exactly on 1.0
    return r;
}

double circle_arc(double x, double y) {
    double d = std::fabs(wrap_unit(x) - wrap_unit(y));
    return std::min(d, 1.0 - d);
}

// One leg of a path through the suspension identification:
// from (b, h) straight to the roof point (x, roof), plus from the
// identified floor point (2x, 0) straight to (b2, h2).
struct RoofLeg {
    double b1, dh1;  // base and vertical gap of the ascending leg
    double b2, h2;   // target of the descending leg

    double operator()(double x) const {
        double up = std::hypot(circle_arc(b1, x), dh1);
        double down = std::hypot(circle_arc(wrap_unit(2.0 * x), b2), h2);
        return up + down;
    }
};

// The leg cost is convex between breakpoints of the two arc terms, so a
// ternary search per segment finds the global minimum to machine accuracy.
double minimize_roof_leg(const RoofLeg& leg) {
    double cuts[6] = {wrap_unit(leg.b1),       wrap_unit(leg.b1 + 0.5),
                      wrap_unit(leg.b2 / 2.0), wrap_unit(leg.b2 / 2.0 + 0.25),
                      wrap_unit(leg.b2 / 2.0 + 0.5),
                      wrap_unit(leg.b2 / 2.0 + 0.75)};
    std::sort(std::begin(cuts), std::end(cuts));

    double best = 1e300;
    for (int seg = 0; seg < 6; ++seg) {
        double lo = cuts[seg];
        double hi = (seg + 1 < 6) ? cuts[seg + 1] : cuts[0] + 1.0;
        best = std::min(best, std::min(leg(lo), leg(hi)));
        for (int it = 0; it < 90 && hi - lo > 1e-13; ++it) {
            double m1 = lo + (hi - lo) / 3.0;
            double m2 = hi - (hi - lo) / 3.0;
            if (leg(m1) <= leg(m2)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = std::min(best, leg(0.5 * (lo + hi)));
    }
    return best;
}

}  // namespace

std::string to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::Circle: return "circle";
        case SpaceKind::Interval: return "interval";
        case SpaceKind::Torus2: return "torus2";
        case SpaceKind::SuspensionDoubling: return "suspension_doubling";
    }
    return "unknown";
}

Space Space::circle() { return Space(SpaceKind::Circle, 0.0, 1.0, 0.0); }

Space Space::interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("interval requires a < b");
    return Space(SpaceKind::Interval, a, b, 0.0);
}

Space Space::torus() { return Space(SpaceKind::Torus2, 0.0, 1.0, 0.0); }

Space Space::suspension_doubling(double roof) {
    if (!(roof > 0.0)) throw std::invalid_argument("suspension roof must be positive");
    return Space(SpaceKind::SuspensionDoubling, 0.0, 1.0, roof);
}

int Space::dimension() const {
    return (kind_ == SpaceKind::Circle || kind_ == SpaceKind::Interval) ? 1 : 2;
}

StatePoint Space::canonical(const StatePoint& p) const {
    switch (kind_) {
        case SpaceKind::Circle:
            return StatePoint(wrap_unit(p.x()));
        case SpaceKind::Interval: {
            double x = p.x();
            if (x < a_ - kChartSlack || x > b_ + kChartSlack) {
                throw std::domain_error("point outside interval chart");
            }
            return StatePoint(std::clamp(x, a_, b_));
        }
        case SpaceKind::Torus2:
            return {wrap_unit(p.x()), wrap_unit(p.y())};
        case SpaceKind::SuspensionDoubling: {
            double h = p.y();
            if (h < -kChartSlack || h > roof_ + kChartSlack) {
                throw std::domain_error("suspension height outside [0, roof]");
            }
            h = std::clamp(h, 0.0, roof_);
            double base = wrap_unit(p.x());
            if (h == roof_) {  // identified with the doubled floor point
                return {wrap_unit(2.0 * base), 0.0};
            }
            return {base, h};
        }
    }
    return p;
}

bool Space::contains(const StatePoint& p) const {
    switch (kind_) {
        case SpaceKind::Circle:
            return p.x() >= 0.0 && p.x() < 1.0;
        case SpaceKind::Interval:
            return p.x() >= a_ - kChartSlack && p.x() <= b_ + kChartSlack;
        case SpaceKind::Torus2:
            return p.x() >= 0.0 && p.x() < 1.0 && p.y() >= 0.0 && p.y() < 1.0;
        case SpaceKind::SuspensionDoubling:
            return p.x() >= 0.0 && p.x() < 1.0 && p.y() >= 0.0 && p.y() < roof_;
    }
    return false;
}

double Space::distance(const StatePoint& p, const StatePoint& q) const {
    switch (kind_) {
        case SpaceKind::Circle:
            return circle_arc(p.x(), q.x());
        case SpaceKind::Interval:
            return std::fabs(p.x() - q.x());
        case SpaceKind::Torus2: {
            double dx = circle_arc(p.x(), q.x());
            double dy = circle_arc(p.y(), q.y());
            return std::hypot(dx, dy);
        }
        case SpaceKind::SuspensionDoubling: {
            double direct = std::hypot(circle_arc(p.x(), q.x()), p.y() - q.y());
            // A pass through the identification costs at least the two
            // vertical gaps; skip the minimization when it cannot win.
            double fwd_floor = (roof_ - p.y()) + q.y();
            if (fwd_floor < direct) {
                RoofLeg fwd{p.x(), roof_ - p.y(), q.x(), q.y()};
                direct = std::min(direct, minimize_roof_leg(fwd));
            }
            double rev_floor = (roof_ - q.y()) + p.y();
            if (rev_floor < direct) {
                RoofLeg rev{q.x(), roof_ - q.y(), p.x(), p.y()};
                direct = std::min(direct, minimize_roof_leg(rev));
            }
            return direct;
        }
    }
    return 0.0;
}

double Space::diameter() const {
    switch (kind_) {
        case SpaceKind::Circle: return 0.5;
        case SpaceKind::Interval: return b_ - a_;
        case SpaceKind::Torus2: return std::sqrt(0.5);
        case SpaceKind::SuspensionDoubling:
            return std::hypot(0.5, roof_);  // upper bound, identification only shrinks
    }
    return 0.0;
}

CandidateGrid regular_grid(const Space& space, int n_per_dim) {
    if (n_per_dim <= 0) throw std::invalid_argument("grid size must be positive");
    const int n = n_per_dim;
    CandidateGrid grid{space, {}, 0.0};
    switch (space.kind()) {
        case SpaceKind::Circle: {
            grid.points.reserve(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                grid.points.emplace_back(static_cast<double>(k) / n);
            }
            grid.mesh = 0.5 / n;
            break;
        }
        case SpaceKind::Interval: {
            double a = space.interval_min();
            double b = space.interval_max();
            if (n == 1) {
                grid.points.emplace_back(0.5 * (a + b));
                grid.mesh = 0.5 * (b - a);
            } else {
                for (int k = 0; k < n; ++k) {
                    grid.points.emplace_back(a + (b - a) * k / (n - 1.0));
                }
                grid.mesh = 0.5 * (b - a) / (n - 1.0);
            }
            break;
        }
        case SpaceKind::Torus2: {
            grid.points.reserve(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    grid.points.emplace_back(static_cast<double>(i) / n,
                                             static_cast<double>(j) / n);
                }
            }
            grid.mesh = std::sqrt(2.0) * 0.5 / n;
            break;
        }
        case SpaceKind::SuspensionDoubling: {
            double r = space.roof();
            int nh = std::max(1, static_cast<int>(std::ceil(n * r)));
            grid.points.reserve(static_cast<std::size_t>(n) * nh);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < nh; ++j) {
                    grid.points.emplace_back(static_cast<double>(i) / n, r * j / nh);
                }
            }
            grid.mesh = std::hypot(0.5 / n, 0.5 * r / nh);
            break;
        }
    }
    return grid;
}

CandidateGrid suspension_base_grid(const Space& space, int n) {
    if (space.kind() != SpaceKind::SuspensionDoubling) {
        throw std::invalid_argument("base grid needs a suspension space");
    }
    if (n <= 0) throw std::invalid_argument("grid size must be positive");
    CandidateGrid grid{space, {}, 0.0};
    grid.points.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        grid.points.emplace_back(static_cast<double>(k) / n, 0.0);
    }
    grid.mesh = 0.5 * space.roof() + 0.5 / n;
    return grid;
}

}  // namespace impress
