#pragma once

#include <optional>
#include <string>

#include "aircomp/channel.hpp"
#include "aircomp/core.hpp"
#include "aircomp/mse.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

enum class Scheme {
    proposed,      // alternate denoise / power / trajectory blocks
    to_no_pc,      // trajectory + denoise only; power pinned to the average budget
    init_traj_pc,  // denoise + power on the frozen initial trajectory
    static_uav,    // denoise + power with the UAV parked at the start point
};

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct BcdConfig {
    double epsilon = 1e-4;  // relative stopping threshold on the MSE trace
    int max_iters = 100;
    double power_tol = 1e-8;
    double traj_tol = 1e-6;
};

enum class StopReason { converged, max_iters };

struct BcdIter {
    double mse = 0.0;             // R^r, after all block updates of round r
    double wall_ms = 0.0;
    double mse_after_denoise = 0.0;
    double mse_after_power = 0.0;
    double traj_objective = 0.0;  // true trajectory objective after the SCA step
    double traj_kkt = 0.0;
    int traj_inner_iters = 0;
};

struct BcdTrace {
    double initial_mse = 0.0;  // R^0: initialization scored after a denoise update
    std::vector<BcdIter> iters;
    Trajectory trajectory;
    Matrix power;
    DenoiseSchedule eta;
    int iterations = 0;
    StopReason stop_reason = StopReason::max_iters;
    double final_mse = 0.0;
};

/// Out-and-back initialization: straight toward the sensor centroid at full
/// speed, hover if time permits, return to land exactly at the start. When
/// the centroid is out of reach the path turns at the farthest reachable
/// point on the segment.
Trajectory init_trajectory(const Scenario& s);

/// Full transmission at the average budget: p[k][n] = avg_power_w[k].
Matrix init_power(const Scenario& s);

BcdTrace run_bcd(const Scenario& s, const BcdConfig& cfg = {});
BcdTrace run_scheme(const Scenario& s, Scheme scheme, const BcdConfig& cfg = {});

/// Longest contiguous run of steps shorter than speed_frac * v_max * slot,
/// as a fraction of N. Used to detect hover windows.
double longest_slow_fraction(const Trajectory& traj, const Scenario& s, double speed_frac = 1e-3);

}  // namespace aircomp
