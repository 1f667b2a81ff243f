#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "impress/geometry.hpp"

namespace impress {

enum class FlowKind { RotationCircle, TranslationInterval, SuspensionDoubling, OdeField };

[[nodiscard]] std::string to_string(FlowKind k);

using VectorField = std::function<std::array<double, 2>(const StatePoint&)>;

// Continuous semiflow phi_t on one of the model spaces. evaluate is exact
// (closed form) for all kinds except OdeField, which integrates the field
// with fixed-step RK4 and therefore satisfies the semigroup law only up
// to the integration error.
class Semiflow {
public:
    static Semiflow rotation_circle(double speed);
    // Translation at constant speed, absorbing at the boundary it runs into.
    static Semiflow translation_interval(const Space& space, double speed);
    static Semiflow suspension_doubling(double roof);
    static Semiflow ode_field(const Space& space, VectorField field, double step);

    [[nodiscard]] FlowKind kind() const { return kind_; }
    [[nodiscard]] const Space& space() const { return space_; }
    [[nodiscard]] double speed() const { return speed_; }
    [[nodiscard]] double ode_step() const { return step_; }

    [[nodiscard]] StatePoint evaluate(double t, const StatePoint& x) const;
    [[nodiscard]] std::vector<std::pair<double, StatePoint>> sample_orbit(
        const StatePoint& x, double T, double dt) const;

private:
    Semiflow(FlowKind kind, Space space) : kind_(kind), space_(std::move(space)) {}

    FlowKind kind_;
    Space space_;
    double speed_ = 1.0;
    double step_ = 0.01;
    VectorField field_;
};

}  // namespace impress
