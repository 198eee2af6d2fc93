#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aircomp/core.hpp"

namespace aircomp {

// All internal quantities are SI: watts, meters, seconds. dBm/dB appear only
// at config ingestion.

struct SensorField {
    std::vector<Vec2> positions;       // w_k, horizontal coordinates
    std::vector<double> peak_power_w;  // P_k, per-slot cap
    std::vector<double> avg_power_w;   // mean-power budget over the mission
    std::size_t count() const { return positions.size(); }
};

struct UavParams {
    double altitude_m = 100.0;
    double v_max_mps = 30.0;
    Vec2 start;  // mission start == mission end
};

struct ChannelParams {
    double beta0 = 1e-4;     // linear power gain at 1 m
    double alpha = 2.0;      // path-loss exponent, >= 2
    double sigma2_w = 1e-11; // receiver noise power
};

struct Mission {
    double duration_s = 0.0;
    double slot_s = 0.0;
    int num_slots = 0;  // duration_s == num_slots * slot_s
};

struct Scenario {
    SensorField sensors;
    UavParams uav;
    ChannelParams channel;
    Mission mission;
    std::uint64_t rng_seed = 0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every invariant; returns the full list of violations (report-style,
/// never throws). Each entry names the offending field and the bound.
ValidationReport validate(const Scenario& s);

/// Derives the slot count from duration and slot length. The pair must be
/// (nearly) commensurate; validate() reports if it is not.
Mission make_mission(double duration_s, double slot_s);

struct PaperDefaultOptions {
    double duration_s = 50.0;
    double slot_s = 0.2;
    double p_a_dbm = 4.0;          // peak power, 13-sensor cluster at (200, 80)
    double p_b_dbm = 4.0;          // peak power, 27-sensor cluster at (400, 200)
    double noise_dbm = -80.0;
    double alpha = 2.0;
    double avg_power_ratio = 0.5;  // avg budget = ratio * peak
};

/// Two-cluster default scenario: 13 sensors uniform in the disk of radius
/// 50 m around (200, 80), 27 around (400, 200), in that order. UAV starts at
/// (400, 0), altitude 100 m, v_max 30 m/s, slot 0.2 s, beta0 = -40 dB,
/// sigma2 = -80 dBm. Placement is a pure function of the seed.
Scenario paper_default_scenario(std::uint64_t seed, const PaperDefaultOptions& opt = {});

double dbm_to_watts(double dbm);
double watts_to_dbm(double w);
double db_to_linear(double db);
double linear_to_db(double lin);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Loads a scenario from a TOML-compatible config file (see docs/config.md).
/// Throws ConfigError on unreadable files, unknown/missing keys, or type
/// errors. Bound violations are left to validate().
Scenario load_scenario_file(const std::string& path);

/// Same, from an in-memory string (used by tests).
Scenario load_scenario_string(const std::string& text);

}  // namespace aircomp
