#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "impress/example_systems.hpp"
#include "impress/pressure.hpp"

using namespace impress;

namespace {

constexpr double kPi = std::numbers::pi;

Schedule small_circle_schedule() {
    return Schedule{
        .T_list = {2.0, 4.0},
        .eps_list = {0.2, 0.1},
        .delta_list = {0.2},
        .grid = regular_grid(Space::circle(), 60),
        .m = 4,
        .t_step_factor = 0.5,
    };
}

// Symbolic greedy separated-set construction for the doubling suspension on
// the fiber grid {k/n}: offsets double at each unit crossing, so stage
// distances are exactly min(off, n-off)/n with off = 2^k * (i-j) mod n.
std::vector<std::size_t> symbolic_suspension_separated(int n, double T, double eps) {
    int k_max = static_cast<int>(std::floor(T + 1e-12));
    auto dyn = [&](long long a, long long b) {
        long long off = ((a - b) % n + n) % n;
        double worst = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            long long folded = std::min(off, n - off);
            worst = std::max(worst, static_cast<double>(folded) / n);
            off = (2 * off) % n;
        }
        return worst;
    };
    std::vector<std::size_t> accepted;
    for (int i = 0; i < n; ++i) {
        bool ok = true;
        for (std::size_t j : accepted) {
            if (dyn(i, static_cast<long long>(j)) < eps) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(static_cast<std::size_t>(i));
    }
    return accepted;
}

}  // namespace

TEST_CASE("estimator kind helpers") {
    CHECK(is_spanning_kind(EstimatorKind::ClassicalR));
    CHECK(is_spanning_kind(EstimatorKind::BarR));
    CHECK_FALSE(is_spanning_kind(EstimatorKind::HatS));
    CHECK(stage_of(EstimatorKind::HatR) == StageMetric::Hat);
    CHECK(stage_of(EstimatorKind::BarS) == StageMetric::Bar);
    CHECK(stage_of(EstimatorKind::ClassicalS) == StageMetric::Classical);
    for (EstimatorKind k : all_estimator_kinds()) {
        CHECK(estimator_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(estimator_kind_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("schedule validation") {
    Schedule s = small_circle_schedule();
    CHECK_NOTHROW(s.validate());
    CHECK(s.birkhoff_dt() == doctest::Approx(0.01));
    Schedule bad = s;
    bad.T_list = {4.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.eps_list = {0.1, 0.2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.delta_list = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.m = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    Schedule fine = s;
    fine.delta_list = {0.1, 0.05};
    CHECK(fine.birkhoff_dt() == doctest::Approx(0.05 / 8.0));
}

TEST_CASE("birkhoff integral oracles") {
    auto circle = make_example("impulsive_circle");
    Potential c = Potential::constant(0.7);
    CHECK(birkhoff_integral(circle, c, StatePoint(0.2), 3.3, 0.01) ==
          doctest::Approx(0.7 * 3.3).epsilon(1e-12));

    auto rot = make_example("rotation_circle");
    Potential sine = Potential::fourier_circle({1.0});
    // Full-period integral of sin vanishes.
    CHECK(std::fabs(birkhoff_integral(rot, sine, StatePoint(0.0), 1.0, 1e-3)) < 1e-8);
    // The impulsive loop restarts at 0 every 0.5, so [0, 0.5] integrates the
    // positive half-wave: integral of sin(2 pi s) over [0, 0.5] = 1/pi.
    CHECK(birkhoff_integral(circle, sine, StatePoint(0.0), 0.5, 5e-4) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-6));
    CHECK_THROWS_AS(birkhoff_integral(circle, c, StatePoint(0.2), -1.0, 0.01),
                    std::invalid_argument);
}

TEST_CASE("log-sum-exp and partition function") {
    CHECK(log_sum_exp({0.0, std::log(3.0)}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(log_sum_exp({700.0, 700.0}) == doctest::Approx(700.0 + std::log(2.0)));
    CHECK_THROWS_AS(log_sum_exp({}), std::invalid_argument);

    auto circle = make_example("impulsive_circle");
    std::vector<StatePoint> pts = {StatePoint(0.1), StatePoint(0.2), StatePoint(0.3),
                                   StatePoint(0.4)};
    double z0 = partition_function(circle, Potential::constant(0.0), pts, 2.0, 0.01);
    CHECK(z0 == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    double zc = partition_function(circle, Potential::constant(0.8), pts, 2.0, 0.01);
    CHECK(zc - z0 == doctest::Approx(0.8 * 2.0).epsilon(1e-10));
}

TEST_CASE("separated and spanning sets on the rotation") {
    auto rot = make_example("rotation_circle");
    CandidateGrid grid = regular_grid(Space::circle(), 100);
    OrbitTable table(rot, grid, 0.2, 4, 0.1, 4.0);
    // Greedy packing at radius 0.3 fits exactly three points on the circle.
    auto sep = build_separated(table, StageMetric::Classical, 4.0, 0.3);
    CHECK(sep.size() == 3);
    // Any radius beyond the diameter collapses to a single point.
    auto one = build_separated(table, StageMetric::Classical, 4.0, 0.7);
    CHECK(one.size() == 1);
    CHECK(build_spanning(table, StageMetric::Classical, 4.0, 0.7).size() == 1);
    // Two arcs of radius 0.3 cover the circle.
    auto cover = build_spanning(table, StageMetric::Classical, 4.0, 0.3);
    CHECK(cover.size() == 2);
    CHECK(verify_spanning(table, StageMetric::Classical, 4.0, 0.3, cover));
    // A maximal separated set is itself spanning.
    CHECK(verify_spanning(table, StageMetric::Classical, 4.0, 0.3, sep));
}

TEST_CASE("suspension separated sets match the symbolic oracle") {
    auto sus = make_example("suspension_doubling");
    const int n = 256;
    CandidateGrid grid = suspension_base_grid(sus.space(), n);
    OrbitTable table(sus, grid, 0.2, 8, 0.1, 4.0);
    std::vector<std::size_t> sizes;
    for (double T : {2.0, 3.0, 4.0}) {
        auto lib = build_separated(table, StageMetric::Classical, T, 0.05);
        auto sym = symbolic_suspension_separated(n, T, 0.05);
        CHECK(lib == sym);
        sizes.push_back(lib.size());
    }
    // Counts double with each extra time unit until the grid saturates.
    CHECK(sizes[1] == 2 * sizes[0]);
    CHECK(sizes[2] == 2 * sizes[1]);
}

TEST_CASE("cached orbit table agrees with the direct metric path") {
    auto circle = make_example("impulsive_circle");
    CandidateGrid grid = regular_grid(Space::circle(), 40);
    const double delta = 0.2;
    const int m = 8;
    OrbitTable table(circle, grid, delta, m, 0.1, 2.0);
    PseudoMetricParams params;
    params.delta = delta;
    params.m = m;
    params.t_grid_step = 0.1;
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, grid.points.size() - 1);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t i = pick(rng), j = pick(rng);
        for (StageMetric kind :
             {StageMetric::Classical, StageMetric::Hat, StageMetric::Bar}) {
            double fast = table.dyn_between(i, j, kind, 2.0);
            double slow =
                dyn_dist(circle, kind, params, 2.0, grid.points[i], grid.points[j]);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
            // The boolean fast paths agree with the exact value.
            CHECK(table.separated_at(i, j, kind, 2.0, 0.12) == (fast >= 0.12));
            CHECK(table.covers(i, j, kind, 2.0, 0.12) == (fast < 0.12));
        }
    }
}

TEST_CASE("bar-separated sets are hat-separated") {
    auto circle = make_example("impulsive_circle");
    CandidateGrid grid = regular_grid(Space::circle(), 80);
    OrbitTable table(circle, grid, 0.1, 8, 0.05, 2.0);
    auto sep = build_separated(table, StageMetric::Bar, 2.0, 0.05);
    REQUIRE(sep.size() >= 2);
    for (std::size_t a = 0; a < sep.size(); ++a) {
        for (std::size_t b = a + 1; b < sep.size(); ++b) {
            CHECK(table.separated_at(sep[a], sep[b], StageMetric::Hat, 2.0, 0.05));
        }
    }
}

TEST_CASE("pressure estimate on the rotation is flat") {
    auto rot = make_example("rotation_circle");
    Schedule s = small_circle_schedule();
    for (EstimatorKind kind : all_estimator_kinds()) {
        PressureTable t = estimate_pressure(rot, Potential::constant(0.0), kind, s);
        CHECK(std::fabs(t.headline) <= 0.02);
        CHECK(t.warnings.empty());
        CHECK(t.rows.size() == s.T_list.size() * s.eps_list.size() * s.delta_list.size());
        for (const PressureRow& row : t.rows) {
            CHECK(row.seconds == 0.0);
            CHECK(row.set_size >= 1);
            CHECK(std::isfinite(row.logZ));
        }
    }
}

TEST_CASE("constant shift moves every cell by exactly c times T") {
    for (const std::string& id : {"rotation_circle", "impulsive_circle"}) {
        auto sys = make_example(id);
        Schedule s = small_circle_schedule();
        PressureTable zero =
            estimate_pressure(sys, Potential::constant(0.0), EstimatorKind::BarS, s);
        PressureTable shifted =
            estimate_pressure(sys, Potential::constant(0.9), EstimatorKind::BarS, s);
        REQUIRE(zero.rows.size() == shifted.rows.size());
        for (std::size_t i = 0; i < zero.rows.size(); ++i) {
            CHECK(shifted.rows[i].set_size == zero.rows[i].set_size);
            CHECK(shifted.rows[i].logZ - zero.rows[i].logZ ==
                  doctest::Approx(0.9 * zero.rows[i].T).epsilon(1e-9));
        }
        CHECK(shifted.headline - zero.headline == doctest::Approx(0.9).epsilon(1e-7));
    }
}

TEST_CASE("pressure tables are deterministic") {
    auto circle = make_example("impulsive_circle");
    Schedule s = small_circle_schedule();
    Potential sine = Potential::fourier_circle({1.0});
    PressureTable a = estimate_pressure(circle, sine, EstimatorKind::HatS, s);
    PressureTable b = estimate_pressure(circle, sine, EstimatorKind::HatS, s);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].logZ == b.rows[i].logZ);
        CHECK(a.rows[i].set_size == b.rows[i].set_size);
    }
    CHECK(a.headline == b.headline);
}

TEST_CASE("separated-set partition values grow as eps shrinks") {
    auto circle = make_example("impulsive_circle");
    Schedule s = small_circle_schedule();
    s.eps_list = {0.2, 0.1, 0.05};
    PressureTable t =
        estimate_pressure(circle, Potential::constant(0.0), EstimatorKind::ClassicalS, s);
    CHECK(t.warnings.empty());  // monotonicity in eps holds on this lattice
    for (double T : s.T_list) {
        double prev = -1e300;
        // eps_list is decreasing, so logZ must be nondecreasing along it.
        for (double eps : s.eps_list) {
            for (const PressureRow& row : t.rows) {
                if (row.T == T && row.eps == eps) {
                    CHECK(row.logZ >= prev - 1e-9);
                    prev = row.logZ;
                }
            }
        }
    }
}

TEST_CASE("spanning estimators reject too-coarse grids") {
    auto rot = make_example("rotation_circle");
    Schedule s = small_circle_schedule();
    s.grid = regular_grid(Space::circle(), 10);  // mesh 0.05 > 0.1/4
    CHECK_THROWS_AS(
        estimate_pressure(rot, Potential::constant(0.0), EstimatorKind::ClassicalR, s),
        std::invalid_argument);
       // Separated estimators accept the same grid.
    CHECK_NOTHROW(
        estimate_pressure(rot, Potential::constant(0.0), EstimatorKind::ClassicalS, s));
}

TEST_CASE("variational oracle closed forms") {
    CHECK(variational_oracle("impulsive_circle", Potential::constant(0.4)) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(variational_oracle("impulsive_circle", Potential::fourier_circle({1.0})) ==
          doctest::Approx(2.0 / kPi).epsilon(1e-10));
    CHECK(variational_oracle("rotation_circle", Potential::fourier_circle({1.0})) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(variational_oracle("rotation_circle", Potential::constant(1.3)) ==
          doctest::Approx(1.3).epsilon(1e-12));
    CHECK(variational_oracle("suspension_doubling", Potential::constant(0.0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(variational_oracle("suspension_doubling", Potential::constant(0.25)) ==
          doctest::Approx(std::log(2.0) + 0.25).epsilon(1e-12));
    CHECK_THROWS_AS(variational_oracle("translation_interval", Potential::constant(0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        variational_oracle("suspension_doubling", Potential::fourier_circle({1.0})),
        std::invalid_argument);
}

TEST_CASE("moving a point into the admissible region") {
    auto circle = make_example("impulsive_circle");
    // Already admissible: unchanged.
    StatePoint a = move_into_admissible(circle, StatePoint(0.3));
    CHECK(circle.space().distance(a, StatePoint(0.3)) <= 1e-12);
    // From the trigger point the orbit must clear the whole tube.
    StatePoint b = move_into_admissible(circle, StatePoint(0.5));
    CHECK(classify_region(circle, b) == Region::InXxi);
    CHECK(circle.space().distance(b, StatePoint(0.6)) <= 0.03);
    // From inside the tube only the remainder is traversed.
    StatePoint c = move_into_admissible(circle, StatePoint(0.55));
    CHECK(classify_region(circle, c) == Region::InXxi);
    CHECK(circle.space().distance(c, StatePoint(0.6)) <= 0.03);
}
