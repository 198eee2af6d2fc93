#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aircomp/scenario.hpp"

using namespace aircomp;

TEST_CASE("unit conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(dbm_to_watts(-80.0) == doctest::Approx(1e-11).epsilon(1e-12));
    CHECK(db_to_linear(-40.0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(dbm_to_watts(4.0) == doctest::Approx(2.51188643151e-3).epsilon(1e-10));

    // round trip across several decades
    for (double x = -120.0; x <= 40.0; x += 7.3) {
        CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
        CHECK(watts_to_dbm(dbm_to_watts(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("paper default scenario matches the documented parameters") {
    const Scenario s = paper_default_scenario(1);
    CHECK(s.sensors.count() == 40);
    CHECK(s.uav.altitude_m == 100.0);
    CHECK(s.uav.v_max_mps == 30.0);
    CHECK(s.uav.start.x == 400.0);
    CHECK(s.uav.start.y == 0.0);
    CHECK(s.mission.slot_s == doctest::Approx(0.2));
    CHECK(s.mission.num_slots == 250);
    CHECK(s.channel.beta0 == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(s.channel.sigma2_w == doctest::Approx(1e-11).epsilon(1e-12));
    CHECK(s.channel.alpha == 2.0);
    for (std::size_t k = 0; k < 40; ++k) {
        CHECK(s.sensors.peak_power_w[k] == doctest::Approx(2.512e-3).epsilon(1e-3));
        CHECK(s.sensors.avg_power_w[k] == doctest::Approx(0.5 * s.sensors.peak_power_w[k]));
    }
    CHECK(validate(s).ok());
}

TEST_CASE("sensor placement is deterministic and stays inside the cluster disks") {
    const Scenario a = paper_default_scenario(1);
    const Scenario b = paper_default_scenario(1);
    const Scenario c = paper_default_scenario(2);
    bool identical = true, differs_from_other_seed = false;
    for (std::size_t k = 0; k < 40; ++k) {
        identical = identical && a.sensors.positions[k].x == b.sensors.positions[k].x &&
                    a.sensors.positions[k].y == b.sensors.positions[k].y;
        differs_from_other_seed =
            differs_from_other_seed || a.sensors.positions[k].x != c.sensors.positions[k].x;
    }
    CHECK(identical);
    CHECK(differs_from_other_seed);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Scenario s = paper_default_scenario(seed);
        for (std::size_t k = 0; k < 40; ++k) {
            const Vec2 center = k < 13 ? Vec2{200.0, 80.0} : Vec2{400.0, 200.0};
            CHECK(norm(s.sensors.positions[k] - center) <= 50.0 + 1e-12);
        }
        CHECK(validate(s).ok());
    }
}

TEST_CASE("mission duration sweep keeps slot length fixed") {
    PaperDefaultOptions opt;
    opt.duration_s = 8.0;
    CHECK(paper_default_scenario(1, opt).mission.num_slots == 40);
    opt.duration_s = 35.0;
    CHECK(paper_default_scenario(1, opt).mission.num_slots == 175);
}

TEST_CASE("validate flags the documented violations") {
    Scenario s = paper_default_scenario(1);

    SUBCASE("slot too long for the altitude") {
        s.mission = make_mission(100.0, 10.0);  // 10 s * 30 m/s = 300 >= H/10
        const ValidationReport r = validate(s);
        CHECK_FALSE(r.ok());
        bool found = false;
        for (const auto& m : r.violations) found = found || m.find("altitude/10") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("average power above peak") {
        s.sensors.avg_power_w[3] = 2.0 * s.sensors.peak_power_w[3];
        const ValidationReport r = validate(s);
        CHECK_FALSE(r.ok());
        bool found = false;
        for (const auto& m : r.violations) found = found || m.find("avg_power_w[3]") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("single sensor rejected") {
        s.sensors.positions.resize(1);
        s.sensors.peak_power_w.resize(1);
        s.sensors.avg_power_w.resize(1);
        CHECK_FALSE(validate(s).ok());
    }
    SUBCASE("nonpositive noise rejected") {
        s.channel.sigma2_w = 0.0;
        CHECK_FALSE(validate(s).ok());
    }
    SUBCASE("alpha below 2 rejected") {
        s.channel.alpha = 1.5;
        CHECK_FALSE(validate(s).ok());
    }
}

static const char* kConfig = R"(
# two sensors on the x axis
seed = 7
[sensors]
x = [100.0, 300.0]
y = [0.0, 40.0]
p_dbm = 4.0
[uav]
altitude_m = 100.0
v_max_mps = 30.0
start_x_m = 0.0
start_y_m = 0.0
[channel]
beta0_db = -40.0
noise_dbm = -80.0
[mission]
duration_s = 10.0
slot_s = 0.2
)";

TEST_CASE("config parsing") {
    const Scenario s = load_scenario_string(kConfig);
    CHECK(s.sensors.count() == 2);
    CHECK(s.sensors.positions[1].x == 300.0);
    CHECK(s.sensors.positions[1].y == 40.0);
    CHECK(s.sensors.peak_power_w[0] == doctest::Approx(dbm_to_watts(4.0)));
    CHECK(s.sensors.avg_power_w[0] == doctest::Approx(0.5 * dbm_to_watts(4.0)));  // default half
    CHECK(s.channel.alpha == 2.0);  // default
    CHECK(s.mission.num_slots == 50);
    CHECK(s.rng_seed == 7);
    CHECK(validate(s).ok());
}

TEST_CASE("config errors name the offending key") {
    std::string text(kConfig);
    const auto drop_line = [&](const std::string& needle) {
        const std::size_t pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.erase(pos, text.find('\n', pos) - pos);
    };
    SUBCASE("missing v_max") {
        drop_line("v_max_mps");
        CHECK_THROWS_WITH_AS(load_scenario_string(text), doctest::Contains("uav.v_max_mps"), ConfigError);
    }
    SUBCASE("missing powers") {
        drop_line("p_dbm");
        CHECK_THROWS_AS(load_scenario_string(text), ConfigError);
    }
    SUBCASE("both power units") {
        text += "\n[sensors]\np_watts = 1e-3\n";
        CHECK_THROWS_AS(load_scenario_string(text), ConfigError);
    }
    SUBCASE("bad number") {
        text += "\n[channel]\nalpha = two\n";
        CHECK_THROWS_AS(load_scenario_string(text), ConfigError);
    }
    SUBCASE("length mismatch") {
        text += "\n[sensors]\np_avg_watts = [1e-3, 1e-3, 1e-3]\n";
        CHECK_THROWS_AS(load_scenario_string(text), ConfigError);
    }
}

TEST_CASE("per-sensor power arrays") {
    std::string text(kConfig);
    const std::size_t pos = text.find("p_dbm = 4.0");
    text.replace(pos, std::string("p_dbm = 4.0").size(), "p_watts = [2e-3, 4e-3]\np_avg_dbm = 0.0");
    const Scenario s = load_scenario_string(text);
    CHECK(s.sensors.peak_power_w[0] == 2e-3);
    CHECK(s.sensors.peak_power_w[1] == 4e-3);
    CHECK(s.sensors.avg_power_w[0] == doctest::Approx(1e-3));
    CHECK(s.sensors.avg_power_w[1] == doctest::Approx(1e-3));
}
