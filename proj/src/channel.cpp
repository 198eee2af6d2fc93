#include "aircomp/channel.hpp"

#include <cmath>
#include <sstream>

namespace aircomp {

double speed_slack(const Scenario& s) { return 1e-9 * s.uav.v_max_mps * s.mission.slot_s; }

double distance(Vec2 q, Vec2 w, double altitude_m) {
    return std::sqrt(altitude_m * altitude_m + norm2(q - w));
}

namespace {

// (h2 + d2)^(-alpha/2) with a fast path for free-space alpha = 2.
inline double inv_pow_half(double h2_plus_d2, double alpha) {
    if (alpha == 2.0) return 1.0 / h2_plus_d2;
    return std::pow(h2_plus_d2, -0.5 * alpha);
}

}  // namespace

double gain(Vec2 q, Vec2 w, const Scenario& s) {
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    return s.channel.beta0 * inv_pow_half(h2 + norm2(q - w), s.channel.alpha);
}

Matrix gains(const Trajectory& traj, const Scenario& s) {
    const std::size_t k = s.sensors.count();
    const std::size_t n = traj.slots();
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double beta0 = s.channel.beta0;
    const double alpha = s.channel.alpha;
    Matrix g(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 w = s.sensors.positions[i];
        double* row = g.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = beta0 * inv_pow_half(h2 + norm2(traj.q[j + 1] - w), alpha);
        }
    }
    return g;
}

ValidationReport check_trajectory(const Trajectory& traj, const Scenario& s) {
    ValidationReport r;
    std::ostringstream os;
    const std::size_t n = s.mission.num_slots >= 0 ? std::size_t(s.mission.num_slots) : 0;
    if (traj.q.size() != n + 1) {
        os << "trajectory: " << traj.q.size() << " waypoints, expected num_slots+1 = " << n + 1;
        r.violations.push_back(os.str());
        return r;
    }
    const double eps = speed_slack(s);
    auto endpoint_ok = [&](Vec2 p) { return norm(p - s.uav.start) <= eps; };
    if (!endpoint_ok(traj.q.front())) r.violations.push_back("trajectory: q[0] must equal uav.start");
    if (!endpoint_ok(traj.q.back())) r.violations.push_back("trajectory: q[N] must equal uav.start");
    const double step_max = s.uav.v_max_mps * s.mission.slot_s + eps;
    for (std::size_t i = 1; i < traj.q.size(); ++i) {
        const double step = norm(traj.q[i] - traj.q[i - 1]);
        if (step > step_max) {
            std::ostringstream m;
            m << "trajectory: step " << i << " length " << step << " exceeds v_max*slot = "
              << s.uav.v_max_mps * s.mission.slot_s;
            r.violations.push_back(m.str());
        }
    }
    return r;
}

bool trajectory_feasible(const Trajectory& traj, const Scenario& s) {
    return check_trajectory(traj, s).ok();
}

}  // namespace aircomp
