#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aircomp/channel.hpp"
#include "aircomp/scenario.hpp"

using namespace aircomp;

namespace {

Scenario two_sensor_scenario() {
    Scenario s;
    s.sensors.positions = {{0.0, 0.0}, {500.0, 0.0}};
    s.sensors.peak_power_w = {1e-3, 1e-3};
    s.sensors.avg_power_w = {5e-4, 5e-4};
    s.uav.altitude_m = 100.0;
    s.uav.v_max_mps = 30.0;
    s.uav.start = {0.0, 0.0};
    s.channel.beta0 = 1e-4;
    s.channel.alpha = 2.0;
    s.channel.sigma2_w = 1e-11;
    s.mission = make_mission(2.0, 1.0);
    return s;
}

}  // namespace

TEST_CASE("distance formula") {
    CHECK(distance({10.0, -3.0}, {10.0, -3.0}, 100.0) == 100.0);
    // hand evaluation: sqrt(100^2 + 500^2)
    CHECK(distance({300.0, 400.0}, {0.0, 0.0}, 100.0) == doctest::Approx(509.90195135927845).epsilon(1e-12));
    for (int i = 0; i < 10; ++i) {
        const Vec2 q{13.0 * i, -7.0 + i};
        const Vec2 w{2.0 * i * i, 31.0};
        CHECK(distance(q, w, 55.0) == distance(w, q, 55.0));
        CHECK(distance(q, w, 55.0) >= 55.0);
    }
}

TEST_CASE("gain values") {
    Scenario s = two_sensor_scenario();
    SUBCASE("overhead, alpha 2") {
        CHECK(gain({0.0, 0.0}, {0.0, 0.0}, s) == doctest::Approx(1e-8).epsilon(1e-12));
    }
    SUBCASE("500 m offset") {
        // 1e-4 / (100^2 + 500^2)
        CHECK(gain({500.0, 0.0}, {0.0, 0.0}, s) == doctest::Approx(1e-4 / 260000.0).epsilon(1e-12));
        CHECK(gain({500.0, 0.0}, {0.0, 0.0}, s) == doctest::Approx(3.8462e-10).epsilon(1e-4));
    }
    SUBCASE("alpha 4 overhead") {
        s.channel.alpha = 4.0;
        CHECK(gain({0.0, 0.0}, {0.0, 0.0}, s) == doctest::Approx(1e-12).epsilon(1e-12));
    }
}

TEST_CASE("gain monotonicity and upper bound") {
    Scenario s = two_sensor_scenario();
    for (double alpha : {2.0, 2.7, 4.0}) {
        s.channel.alpha = alpha;
        const double cap = s.channel.beta0 / std::pow(s.uav.altitude_m, alpha);
        double prev = gain({0.0, 0.0}, {0.0, 0.0}, s);
        CHECK(prev == doctest::Approx(cap).epsilon(1e-12));
        for (double off = 5.0; off < 2000.0; off *= 1.7) {
            const double g = gain({off, 0.0}, {0.0, 0.0}, s);
            CHECK(g < prev);
            CHECK(g <= cap);
            prev = g;
        }
    }
}

TEST_CASE("gains matrix uses the end-of-step waypoint") {
    const Scenario s = two_sensor_scenario();
    Trajectory t;
    t.q = {{0.0, 0.0}, {500.0, 0.0}, {0.0, 0.0}};  // infeasible speed-wise, fine for gain math
    const Matrix g = gains(t, s);
    REQUIRE(g.rows == 2);
    REQUIRE(g.cols == 2);
    // slot 1 -> q[1] = (500,0): sensor 0 at 500 m offset, sensor 1 overhead
    CHECK(g(0, 0) == doctest::Approx(1e-4 / 260000.0).epsilon(1e-12));
    CHECK(g(1, 0) == doctest::Approx(1e-8).epsilon(1e-12));
    // slot 2 -> q[2] = (0,0)
    CHECK(g(0, 1) == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(g(1, 1) == doctest::Approx(1e-4 / 260000.0).epsilon(1e-12));
}

TEST_CASE("trajectory feasibility checks") {
    Scenario s = two_sensor_scenario();
    s.mission = make_mission(4.0, 1.0);  // 4 slots, step cap 30 m

    Trajectory ok;
    ok.q = {{0, 0}, {30, 0}, {45, 0}, {30, 0}, {0, 0}};
    CHECK(trajectory_feasible(ok, s));

    SUBCASE("speed violation is reported with the step index") {
        Trajectory bad = ok;
        bad.q[2] = {75.0, 0.0};
        const ValidationReport r = check_trajectory(bad, s);
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().find("step 2") != std::string::npos);
    }
    SUBCASE("wrong endpoint") {
        Trajectory bad = ok;
        bad.q.back() = {1.0, 0.0};
        CHECK_FALSE(trajectory_feasible(bad, s));
    }
    SUBCASE("wrong length") {
        Trajectory bad = ok;
        bad.q.pop_back();
        CHECK_FALSE(trajectory_feasible(bad, s));
    }
    SUBCASE("slack absorbs round-off at the speed limit") {
        Trajectory edge = ok;
        edge.q[1] = {30.0 * (1.0 + 1e-12), 0.0};
        CHECK(trajectory_feasible(edge, s));
    }
}
