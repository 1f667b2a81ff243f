#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "impress/dynmetrics.hpp"
#include "impress/flows.hpp"

using namespace impress;

namespace {

ImpulsiveSystem circle_system() {
    Space circle = Space::circle();
    JumpSet jumps{{StatePoint(0.5)}, 1e-6};
    ImpulseMap impulses{{{StatePoint(0.5), StatePoint(0.0)}}};
    return ImpulsiveSystem(Semiflow::rotation_circle(1.0), jumps, impulses, 0.1, 0.01);
}

ImpulsiveSystem plain_rotation() {
    return ImpulsiveSystem::continuous(Semiflow::rotation_circle(1.0));
}

ImpulsiveSystem plain_suspension() {
    return ImpulsiveSystem::continuous(Semiflow::suspension_doubling(1.0));
}

// Brute-force stage minima straight from psi, independent of the cached
// trajectory lookups inside the library implementation.
double hat_brute(const ImpulsiveSystem& sys, double delta, int m, const StatePoint& x,
                 const StatePoint& y) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
        double s = k * delta / m;
        best = std::min(best, sys.space().distance(psi(sys, s, x), psi(sys, s, y)));
    }
    return best;
}

double bar_brute(const ImpulsiveSystem& sys, double delta, int m, const StatePoint& x,
                 const StatePoint& y) {
    double best = std::numeric_limits<double>::infinity();
    for (int k1 = 0; k1 < m; ++k1) {
        for (int k2 = 0; k2 < m; ++k2) {
            best = std::min(best, sys.space().distance(psi(sys, k1 * delta / m, x),
                                                       psi(sys, k2 * delta / m, y)));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(PseudoMetricParams::with_delta(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PseudoMetricParams::with_delta(0.2, 1), std::invalid_argument);
    PseudoMetricParams bad = PseudoMetricParams::with_delta(0.2);
    bad.t_grid_step = 0.11;  // above delta/2
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    PseudoMetricParams ok = PseudoMetricParams::with_delta(0.2);
    CHECK(ok.m == 32);
    CHECK(ok.t_grid_step == doctest::Approx(0.05));
}

TEST_CASE("pseudometrics vanish on the diagonal") {
    auto sys = circle_system();
    auto params = PseudoMetricParams::with_delta(0.2, 16);
    for (double v : {0.0, 0.13, 0.49, 0.77}) {
        StatePoint x(v);
        CHECK(d_hat(sys, params, x, x) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(d_bar(sys, params, x, x) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(dyn_dist(sys, StageMetric::Bar, params, 1.0, x, x) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation is an isometry for the hat pseudometric") {
    auto sys = plain_rotation();
    auto params = PseudoMetricParams::with_delta(0.2, 32);
    CHECK(d_hat(sys, params, StatePoint(0.1), StatePoint(0.3)) ==
          doctest::Approx(0.2).epsilon(1e-12));
    // The dynamical distance also stays put for every horizon.
    for (double T : {0.7, 3.0, 12.0}) {
        CHECK(dyn_dist(sys, StageMetric::Classical, params, T, StatePoint(0.1),
                       StatePoint(0.3)) == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("hat pseudometric heals the jump discontinuity on the circle") {
    auto sys = circle_system();
    auto params = PseudoMetricParams::with_delta(0.2, 64);
    // x = 0.45 jumps to 0 at s = 0.05 while y = 0.95 wraps through 1.0 = 0 at
    // the same moment, so a single common shift nearly cancels the distance.
    double v = d_hat(sys, params, StatePoint(0.45), StatePoint(0.95));
    double plain = sys.space().distance(StatePoint(0.45), StatePoint(0.95));
    CHECK(v <= plain + 1e-12);
    CHECK(v <= 0.01);
    // Fine-grid brute force agrees and refinement never increases the value.
    double fine = hat_brute(sys, 0.2, 4096, StatePoint(0.45), StatePoint(0.95));
    CHECK(fine <= v + 1e-12);
    CHECK(v == doctest::Approx(hat_brute(sys, 0.2, 64, StatePoint(0.45), StatePoint(0.95)))
                   .epsilon(1e-10));
}

TEST_CASE("bar pseudometric heals the jump with independent shifts") {
    auto sys = circle_system();
    auto params = PseudoMetricParams::with_delta(0.05, 64);
    StatePoint x(0.499);  // about to trigger the jump
    StatePoint y(0.001);  // just landed on the other side
    double plain = sys.space().distance(x, y);
    CHECK(plain == doctest::Approx(0.498));
    double v = d_bar(sys, params, x, y);
    CHECK(v <= 0.01);
    CHECK(v == doctest::Approx(bar_brute(sys, 0.05, 64, x, y)).epsilon(1e-10));
}

TEST_CASE("ordering chain bar <= hat <= classical on random pairs") {
    auto sys = circle_system();
    auto params = PseudoMetricParams::with_delta(0.1, 16);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        StatePoint x(u(rng)), y(u(rng));
        double db = d_bar(sys, params, x, y);
        double dh = d_hat(sys, params, x, y);
        double dc = sys.space().distance(x, y);
        CHECK(db <= dh + 1e-12);
        CHECK(dh <= dc + 1e-12);
    }
    for (int i = 0; i < 40; ++i) {
        StatePoint x(u(rng)), y(u(rng));
        double bb = dyn_dist(sys, StageMetric::Bar, params, 2.0, x, y);
        double hh = dyn_dist(sys, StageMetric::Hat, params, 2.0, x, y);
        double cc = dyn_dist(sys, StageMetric::Classical, params, 2.0, x, y);
        CHECK(bb <= hh + 1e-12);
        CHECK(hh <= cc + 1e-12);
    }
}

TEST_CASE("nested grids give monotone refinement") {
    auto sys = circle_system();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        StatePoint x(u(rng)), y(u(rng));
        // Doubling m on the same delta refines the grid in place.
        double coarse = d_hat(sys, PseudoMetricParams::with_delta(0.1, 8), x, y);
        double fine = d_hat(sys, PseudoMetricParams::with_delta(0.1, 16), x, y);
        CHECK(fine <= coarse + 1e-12);
        // Doubling delta and m together extends the grid, so the minimum
        // over the longer window cannot increase.
        double longer = d_hat(sys, PseudoMetricParams::with_delta(0.2, 16), x, y);
        CHECK(longer <= coarse + 1e-12);
        double coarse_bar = d_bar(sys, PseudoMetricParams::with_delta(0.1, 8), x, y);
        double fine_bar = d_bar(sys, PseudoMetricParams::with_delta(0.1, 16), x, y);
        CHECK(fine_bar <= coarse_bar + 1e-12);
    }
}

TEST_CASE("doubling suspension expands at the symbolic rate") {
    auto sys = plain_suspension();
    auto params = PseudoMetricParams::with_delta(0.2, 8);
    StatePoint x{0.1, 0.0};
    StatePoint y{0.1 + std::pow(2.0, -6.0), 0.0};
    // Base offsets double at each integer crossing: 2^-6 -> 2^-3 after T=3.
    double v = dyn_dist(sys, StageMetric::Classical, params, 3.0, x, y);
    CHECK(v == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(v >= 8.0 * std::pow(2.0, -6.0) - 1e-9);
    CHECK(dyn_dist(sys, StageMetric::Classical, params, 1.0, x, y) ==
          doctest::Approx(0.03125).epsilon(1e-9));
}

TEST_CASE("equivalence sample from the circle system") {
    auto sys = circle_system();
    auto sample = EquivalenceSample::from_system(sys);
    REQUIRE(sample.base_points.size() == 2);  // the trigger point and its image
    bool has_link = false;
    for (const auto& [a, b] : sample.relation_pairs) {
        if (sys.space().distance(a, StatePoint(0.5)) < 1e-12 &&
            sys.space().distance(b, StatePoint(0.0)) < 1e-12) {
            has_link = true;
        }
    }
    CHECK(has_link);
    // A continuous flow identifies nothing.
    auto empty = EquivalenceSample::from_system(plain_rotation());
    CHECK(empty.base_points.empty());
}

TEST_CASE("quotient distance collapses identified points and bounds d") {
    auto sys = circle_system();
    auto sample = EquivalenceSample::from_system(sys);
    const Space& s = sys.space();
    CHECK(quotient_distance(sample, s, StatePoint(0.5), StatePoint(0.0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // Chain through the identification: 0.49 -> 0.5 ~ 0 -> 0.01.
    double healed = quotient_distance(sample, s, StatePoint(0.49), StatePoint(0.01));
    CHECK(healed <= 0.02 + 1e-12);
    CHECK(healed == doctest::Approx(0.02).epsilon(1e-9));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        StatePoint x(u(rng)), y(u(rng));
        CHECK(quotient_distance(sample, s, x, y) <= s.distance(x, y) + 1e-12);
    }
}

TEST_CASE("quotient distance is a pseudometric on samples") {
    auto sys = circle_system();
    auto sample = EquivalenceSample::from_system(sys);
    const Space& s = sys.space();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        StatePoint a(u(rng)), b(u(rng)), c(u(rng));
        double ab = quotient_distance(sample, s, a, b);
        double ba = quotient_distance(sample, s, b, a);
        double bc = quotient_distance(sample, s, b, c);
        double ac = quotient_distance(sample, s, a, c);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("quotient distance without identifications degenerates to d") {
    auto sys = plain_rotation();
    auto sample = EquivalenceSample::from_system(sys);
    const Space& s = sys.space();
    CHECK(quotient_distance(sample, s, StatePoint(0.1), StatePoint(0.4)) ==
          doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("projection commutes with the flow on the circle") {
    auto sys = circle_system();
    auto sample = EquivalenceSample::from_system(sys);
    // t = 0 returns the point itself.
    StatePoint p0 = project_and_flow_quotient(sys, sample, 0.0, StatePoint(0.3));
    CHECK(sys.space().distance(p0, StatePoint(0.3)) <= 1e-12);
    // Flowing 0.3 for 0.2 lands on the trigger point, whose representative is
    // the impulse image 0.
    StatePoint p = project_and_flow_quotient(sys, sample, 0.2, StatePoint(0.3));
    CHECK(sys.space().distance(p, StatePoint(0.0)) <= 1e-9);
    // Inadmissible starting points are rejected.
    CHECK_THROWS_AS(project_and_flow_quotient(sys, sample, 0.1, StatePoint(0.5)),
                    std::domain_error);
    CHECK_THROWS_AS(project_and_flow_quotient(sys, sample, 0.1, StatePoint(0.55)),
                    std::domain_error);
    // Semiconjugacy on samples: the projected flow matches the representative
    // of psi in the quotient pseudometric.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int used = 0;
    for (int i = 0; i < 200 && used < 60; ++i) {
        StatePoint x(u(rng));
        if (classify_region(sys, x) != Region::InXxi) continue;
        ++used;
        double t = 2.0 * u(rng);
        StatePoint lhs = project_and_flow_quotient(sys, sample, t, x);
        StatePoint rhs = psi(sys, t, x);
        CHECK(quotient_distance(sample, sys.space(), lhs, rhs) <= 1e-9);
    }
    CHECK(used >= 50);
}
