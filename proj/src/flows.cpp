#include "impress/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace impress {

namespace {

double wrap_unit(double v) {
    double r = std::fmod(v, 1.0);
    if (r < 0.0) r += 1.0;
    if (r >= 1.0) r -= 1.0;
    return r;
}

void require_time(double t) {
    if (t < 0.0 || !std::isfinite(t)) {
        throw std::invalid_argument("semiflow time must be finite and nonnegative");
    }
}

}  // namespace

std::string to_string(FlowKind k) {
    switch (k) {
        case FlowKind::RotationCircle: return "rotation_circle";
        case FlowKind::TranslationInterval: return "translation_interval";
        case FlowKind::SuspensionDoubling: return "suspension_doubling";
        case FlowKind::OdeField: return "ode_field";
    }
    return "unknown";
}

Semiflow Semiflow::rotation_circle(double speed) {
    if (speed == 0.0) throw std::invalid_argument("rotation speed must be nonzero");
    Semiflow f(FlowKind::RotationCircle, Space::circle());
    f.speed_ = speed;
    return f;
}

Semiflow Semiflow::translation_interval(const Space& space, double speed) {
    if (space.kind() != SpaceKind::Interval) {
        throw std::invalid_argument("translation flow needs an interval space");
    }
    if (speed == 0.0) throw std::invalid_argument("translation speed must be nonzero");
    Semiflow f(FlowKind::TranslationInterval, space);
    f.speed_ = speed;
    return f;
}

Semiflow Semiflow::suspension_doubling(double roof) {
    Semiflow f(FlowKind::SuspensionDoubling, Space::suspension_doubling(roof));
    return f;
}

Semiflow Semiflow::ode_field(const Space& space, VectorField field, double step) {
    if (!field) throw std::invalid_argument("ode flow needs a vector field");
    if (!(step > 0.0)) throw std::invalid_argument("ode step must be positive");
    Semiflow f(FlowKind::OdeField, space);
    f.field_ = std::move(field);
    f.step_ = step;
    return f;
}

StatePoint Semiflow::evaluate(double t, const StatePoint& x) const {
    require_time(t);
    switch (kind_) {
        case FlowKind::RotationCircle:
            return StatePoint(wrap_unit(x.x() + speed_ * t));
        case FlowKind::TranslationInterval: {
            double v = x.x() + speed_ * t;
            return StatePoint(std::clamp(v, space_.interval_min(), space_.interval_max()));
        }
        case FlowKind::SuspensionDoubling: {
            const double r = space_.roof();
            double h = x.y() + t;
            auto crossings = static_cast<long long>(std::floor(h / r));
            double base = wrap_unit(x.x());
            for (long long i = 0; i < crossings; ++i) base = wrap_unit(2.0 * base);
            return {base, h - static_cast<double>(crossings) * r};
        }
        case FlowKind::OdeField: {
            StatePoint p = space_.canonical(x);
            auto n = static_cast<long long>(std::floor(t / step_ + 1e-12));
            double tail = t - static_cast<double>(n) * step_;
            auto rk4 = [this](StatePoint s, double h) {
                auto eval = [this](const StatePoint& q) { return field_(q); };
                std::array<double, 2> k1 = eval(s);
                StatePoint s2(s.c[0] + 0.5 * h * k1[0], s.c[1] + 0.5 * h * k1[1]);
                std::array<double, 2> k2 = eval(s2);
                StatePoint s3(s.c[0] + 0.5 * h * k2[0], s.c[1] + 0.5 * h * k2[1]);
                std::array<double, 2> k3 = eval(s3);
                StatePoint s4(s.c[0] + h * k3[0], s.c[1] + h * k3[1]);
                std::array<double, 2> k4 = eval(s4);
                s.c[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                s.c[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
                return s;
            };
            for (long long i = 0; i < n; ++i) p = space_.canonical(rk4(p, step_));
            if (tail > 1e-15) p = space_.canonical(rk4(p, tail));
            return p;
        }
    }
    return x;
}

std::vector<std::pair<double, StatePoint>> Semiflow::sample_orbit(const StatePoint& x,
                                                                  double T,
                                                                  double dt) const {
    require_time(T);
    if (!(dt > 0.0)) throw std::invalid_argument("sample step must be positive");
    std::vector<std::pair<double, StatePoint>> out;
    out.reserve(static_cast<std::size_t>(T / dt) + 2);
    double t = 0.0;
    for (long long k = 0; t < T - 1e-12; ++k, t = k * dt) {
        out.emplace_back(t, evaluate(t, x));
    }
    out.emplace_back(T, evaluate(T, x));
    return out;
}

}  // namespace impress
