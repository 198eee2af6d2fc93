#pragma once

#include "aircomp/core.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// Horizontal waypoints q[0..N]. q[0] and q[N] sit at the mission start
/// point; waypoint q[n] is the UAV position for slot n (n = 1..N).
struct Trajectory {
    std::vector<Vec2> q;
    std::size_t slots() const { return q.empty() ? 0 : q.size() - 1; }
};

/// Speed-constraint slack absorbing solver round-off: 1e-9 * v_max * slot.
double speed_slack(const Scenario& s);

/// 3-D distance between the UAV above q and the sensor at w.
double distance(Vec2 q, Vec2 w, double altitude_m);

/// LoS channel power gain beta0 * d^-alpha.
double gain(Vec2 q, Vec2 w, const Scenario& s);

/// K x N gain matrix; column n-1 is computed from waypoint q[n].
Matrix gains(const Trajectory& traj, const Scenario& s);

/// Endpoint and per-step speed checks (with speed_slack()).
ValidationReport check_trajectory(const Trajectory& traj, const Scenario& s);
bool trajectory_feasible(const Trajectory& traj, const Scenario& s);

}  // namespace aircomp
