#include "impress/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace impress {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double interp_linear(const std::vector<double>& xs, const std::vector<double>& vs,
                     double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return vs.front();
    if (it == xs.end()) return vs.back();
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return vs[lo] + w * (vs[hi] - vs[lo]);
}

}  // namespace

Potential Potential::constant(double c) {
    Potential p;
    p.kind_ = Kind::Constant;
    p.c_ = c;
    return p;
}

Potential Potential::fourier_circle(std::vector<double> sin_coeffs,
                                    std::vector<double> cos_coeffs,
                                    double constant_term) {
    Potential p;
    p.kind_ = Kind::FourierCircle;
    p.c_ = constant_term;
    p.sin_coeffs_ = std::move(sin_coeffs);
    p.cos_coeffs_ = std::move(cos_coeffs);
    return p;
}

Potential Potential::tabulated(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2) throw std::invalid_argument("tabulated potential needs >= 2 nodes");
    if (nodes.size() != values.size()) {
        throw std::invalid_argument("node and value counts differ");
    }
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
        throw std::invalid_argument("nodes must be strictly increasing");
    }
    Potential p;
    p.kind_ = Kind::Tabulated;
    p.nodes_ = std::move(nodes);
    p.values_ = std::move(values);
    return p;
}

double Potential::evaluate(const Space& space, const StatePoint& x) const {
    switch (kind_) {
        case Kind::Constant: return c_;
        case Kind::FourierCircle: {
            if (space.kind() != SpaceKind::Circle) {
                throw std::domain_error("fourier potential is defined on the circle");
            }
            double v = c_;
            double arg = kTwoPi * space.canonical(x).x();
            for (std::size_t k = 0; k < sin_coeffs_.size(); ++k) {
                v += sin_coeffs_[k] * std::sin((k + 1) * arg);
            }
            for (std::size_t k = 0; k < cos_coeffs_.size(); ++k) {
                v += cos_coeffs_[k] * std::cos((k + 1) * arg);
            }
            return v;
        }
        case Kind::Tabulated: {
            double t = space.canonical(x).x();
            if (space.kind() == SpaceKind::Circle) {
                // Close the table periodically with the wrap-around segment.
                if (t < nodes_.front() || t >= nodes_.back()) {
                    double span = nodes_.front() + 1.0 - nodes_.back();
                    double off = t >= nodes_.back() ? t - nodes_.back()
                                                    : t + 1.0 - nodes_.back();
                    double w = off / span;
                    return values_.back() + w * (values_.front() - values_.back());
                }
            }
            return interp_linear(nodes_, values_, t);
        }
    }
    return c_;
}

double Potential::sup_norm_bound() const {
    switch (kind_) {
        case Kind::Constant: return std::fabs(c_);
        case Kind::FourierCircle: {
            double b = std::fabs(c_);
            for (double a : sin_coeffs_) b += std::fabs(a);
            for (double a : cos_coeffs_) b += std::fabs(a);
            return b;
        }
        case Kind::Tabulated: {
            double b = 0.0;
            for (double v : values_) b = std::max(b, std::fabs(v));
            return b;
        }
    }
    return std::fabs(c_);
}

double Potential::constant_value() const {
    if (kind_ != Kind::Constant) {
        throw std::logic_error("potential is not a constant");
    }
    return c_;
}

std::string Potential::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Constant: os << "constant(" << c_ << ")"; break;
        case Kind::FourierCircle:
            os << "fourier(c=" << c_ << ", " << sin_coeffs_.size() << " sin, "
               << cos_coeffs_.size() << " cos)";
            break;
        case Kind::Tabulated: os << "tabulated(" << nodes_.size() << " nodes)"; break;
    }
    return os.str();
}

Condition1Report check_condition1(const Potential& f, const ImpulsiveSystem& sys) {
    Condition1Report rep;
    const Space& s = sys.space();
    for (const StatePoint& d : sys.jumps().points) {
        StatePoint img = sys.impulses().apply(s, d);
        double gap = std::fabs(f.evaluate(s, d) - f.evaluate(s, img));
        if (gap > rep.worst_gap) {
            rep.worst_gap = gap;
            rep.worst_point = d;
        }
    }
    rep.pass = rep.worst_gap <= 1e-12;
    return rep;
}

Condition2Report probe_condition2(const Potential& f, const ImpulsiveSystem& sys,
                                  double eps, int trials, double horizon,
                                  std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    Condition2Report rep;
    rep.eps = eps;
    rep.trials = trials;
    rep.horizon = horizon;
    for (int q = 1; q <= 4; ++q) rep.checkpoint_times.push_back(horizon * q / 4.0);
    rep.gap_by_checkpoint.assign(4, 0.0);

    const Space& s = sys.space();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> uy(-0.5, 0.5);

    auto near_triggers = [&](const StatePoint& p) {
        for (const StatePoint& d : sys.jumps().points) {
            if (s.distance(p, d) <= eps) return true;
        }
        return false;
    };

    const double ds = std::min(eps / 4.0, 0.005);
    const auto n_steps = static_cast<long long>(std::ceil(horizon / ds));

    for (int trial = 0; trial < trials; ++trial) {
        // A base point and a perturbed partner within eps/2.
        StatePoint x(0.0);
        switch (s.kind()) {
            case SpaceKind::Circle: x = StatePoint(u01(rng)); break;
            case SpaceKind::Interval:
                x = StatePoint(s.interval_min() +
                               (s.interval_max() - s.interval_min()) * u01(rng));
                break;
            case SpaceKind::Torus2: x = {u01(rng), u01(rng)}; break;
            case SpaceKind::SuspensionDoubling: x = {u01(rng), s.roof() * u01(rng)}; break;
        }
        StatePoint y = x;
        y.c[0] += eps * uy(rng);
        try {
            y = s.canonical(y);
        } catch (const std::domain_error&) {
            continue;
        }

        TrajectoryRecord rx = impulsive_trajectory(sys, x, horizon);
        TrajectoryRecord ry = impulsive_trajectory(sys, y, horizon);

        double fx_prev = f.evaluate(s, rx.state_at(sys.flow(), 0.0));
        double fy_prev = f.evaluate(s, ry.state_at(sys.flow(), 0.0));
        double ix = 0.0, iy = 0.0;
        std::size_t next_cp = 0;
        bool intact = true;
        for (long long i = 1; i <= n_steps && intact; ++i) {
            double t = std::min(i * ds, horizon);
            double dt = t - std::min((i - 1) * ds, horizon);
            StatePoint px = rx.state_at(sys.flow(), t);
            StatePoint py = ry.state_at(sys.flow(), t);
            double fx = f.evaluate(s, px);
            double fy = f.evaluate(s, py);
            ix += 0.5 * dt * (fx_prev + fx);
            iy += 0.5 * dt * (fy_prev + fy);
            fx_prev = fx;
            fy_prev = fy;
            // The closeness requirement is waived while either orbit sits in
            // the eps-ball around the trigger set (the jump mismatch window).
            if (s.distance(px, py) > eps && !near_triggers(px) && !near_triggers(py)) {
                intact = false;
            }
            while (next_cp < rep.checkpoint_times.size() &&
                   t >= rep.checkpoint_times[next_cp] - 1e-12) {
                rep.gap_by_checkpoint[next_cp] =
                    std::max(rep.gap_by_checkpoint[next_cp], std::fabs(ix - iy));
                ++next_cp;
            }
        }
    }

    for (double g : rep.gap_by_checkpoint) rep.max_gap = std::max(rep.max_gap, g);
    // Flag when late-window gaps clearly outgrow the early window.
    rep.growth_flag =
        rep.gap_by_checkpoint[3] > 2.0 * rep.gap_by_checkpoint[0] + 0.1 * f.sup_norm_bound();
    return rep;
}

}  // namespace impress
