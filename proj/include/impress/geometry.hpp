#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace impress {

// Point in chart coordinates. One or two coordinates are meaningful
// depending on the space; unused slots stay zero.
struct StatePoint {
    std::array<double, 2> c{0.0, 0.0};

    StatePoint() = default;
    explicit StatePoint(double x) : c{x, 0.0} {}
    StatePoint(double x, double y) : c{x, y} {}

    [[nodiscard]] double x() const { return c[0]; }
    [[nodiscard]] double y() const { return c[1]; }
};

enum class SpaceKind { Circle, Interval, Torus2, SuspensionDoubling };

[[nodiscard]] std::string to_string(SpaceKind k);

// Compact metric space underlying a semiflow. Circle and Torus2 use
// unit-circumference coordinates stored reduced mod 1. SuspensionDoubling
// is the unit circle suspended under a constant roof r with the
// identification (x, r) ~ (2x mod 1, 0); its metric is the product
// distance shortened by at most one pass through the identification,
// which is exact as long as the roof is not small compared to the
// base diameter (one extra pass costs at least r).
class Space {
public:
    static Space circle();
    static Space interval(double a, double b);
    static Space torus();
    static Space suspension_doubling(double roof);

    [[nodiscard]] SpaceKind kind() const { return kind_; }
    [[nodiscard]] int dimension() const;
    [[nodiscard]] double interval_min() const { return a_; }
    [[nodiscard]] double interval_max() const { return b_; }
    [[nodiscard]] double roof() const { return roof_; }

    // Reduces periodic coordinates mod 1 and validates chart ranges.
    [[nodiscard]] StatePoint canonical(const StatePoint& p) const;
    [[nodiscard]] bool contains(const StatePoint& p) const;
    [[nodiscard]] double distance(const StatePoint& p, const StatePoint& q) const;
    [[nodiscard]] double diameter() const;

    bool operator==(const Space& other) const = default;

private:
    Space(SpaceKind k, double a, double b, double roof)
        : kind_(k), a_(a), b_(b), roof_(roof) {}

    SpaceKind kind_;
    double a_;
    double b_;
    double roof_;
};

// Finite stand-in for the whole space when building spanning and
// separated sets. mesh bounds the distance from any point of the
// space to the grid.
struct CandidateGrid {
    Space space;
    std::vector<StatePoint> points;
    double mesh = 0.0;
};

// n_per_dim points per chart dimension, uniform in each coordinate.
[[nodiscard]] CandidateGrid regular_grid(const Space& space, int n_per_dim);

// Grid on the height-zero fiber of a suspension space. The mesh is the
// honest covering radius of the fiber grid inside the full space, so it
// is of the order roof/2; spanning-set construction should not use it.
[[nodiscard]] CandidateGrid suspension_base_grid(const Space& space, int n);

}  // namespace impress
