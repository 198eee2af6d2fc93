#include "aircomp/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "aircomp/power.hpp"
#include "aircomp/trajectory.hpp"

namespace aircomp {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::to_no_pc: return "to-no-pc";
        case Scheme::init_traj_pc: return "init-traj-pc";
        case Scheme::static_uav: return "static";
    }
    return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
    if (name == "proposed") return Scheme::proposed;
    if (name == "to-no-pc") return Scheme::to_no_pc;
    if (name == "init-traj-pc") return Scheme::init_traj_pc;
    if (name == "static") return Scheme::static_uav;
    return std::nullopt;
}

Trajectory init_trajectory(const Scenario& s) {
    const std::size_t n = std::size_t(s.mission.num_slots);
    const double step = s.uav.v_max_mps * s.mission.slot_s;
    Vec2 centroid{};
    for (const Vec2& w : s.sensors.positions) centroid = centroid + w;
    centroid = (1.0 / double(s.sensors.count())) * centroid;

    Trajectory traj;
    traj.q.assign(n + 1, s.uav.start);
    const Vec2 leg = centroid - s.uav.start;
    const double dist = norm(leg);
    if (dist <= 1e-12) return traj;  // already above the centroid: hover

    // Farthest point reachable with a guaranteed return: the centroid, or the
    // turn point half the flyable distance out. min(i, n-i) full-speed steps
    // bound how far waypoint i can be from both endpoints.
    const Vec2 dir = (1.0 / dist) * leg;
    const double target = std::min(dist, 0.5 * double(n) * step);
    for (std::size_t i = 1; i < n; ++i) {
        const double reach = double(std::min(i, n - i)) * step;
        traj.q[i] = s.uav.start + std::min(reach, target) * dir;
    }
    return traj;
}

Matrix init_power(const Scenario& s) {
    const std::size_t k = s.sensors.count();
    const std::size_t n = std::size_t(s.mission.num_slots);
    Matrix p(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < n; ++j) p(i, j) = s.sensors.avg_power_w[i];
    }
    return p;
}

double longest_slow_fraction(const Trajectory& traj, const Scenario& s, double speed_frac) {
    const double threshold = speed_frac * s.uav.v_max_mps * s.mission.slot_s;
    std::size_t best = 0, run = 0;
    for (std::size_t i = 1; i < traj.q.size(); ++i) {
        if (norm(traj.q[i] - traj.q[i - 1]) < threshold) {
            best = std::max(best, ++run);
        } else {
            run = 0;
        }
    }
    return traj.slots() == 0 ? 0.0 : double(best) / double(traj.slots());
}

BcdTrace run_bcd(const Scenario& s, const BcdConfig& cfg) {
    return run_scheme(s, Scheme::proposed, cfg);
}

BcdTrace run_scheme(const Scenario& s, Scheme scheme, const BcdConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("run_scheme: epsilon must be > 0");
    if (cfg.max_iters < 1) throw std::invalid_argument("run_scheme: max_iters must be >= 1");
    {
        ValidationReport r = validate(s);
        if (!r.ok()) throw std::invalid_argument("run_scheme: invalid scenario: " + r.violations.front());
    }
    const bool update_power = scheme != Scheme::to_no_pc;
    const bool update_traj = scheme == Scheme::proposed || scheme == Scheme::to_no_pc;

    BcdTrace trace;
    trace.trajectory = scheme == Scheme::static_uav
                           ? Trajectory{std::vector<Vec2>(std::size_t(s.mission.num_slots) + 1, s.uav.start)}
                           : init_trajectory(s);
    trace.power = init_power(s);
    Matrix g = gains(trace.trajectory, s);
    const double sigma2 = s.channel.sigma2_w;

    trace.eta = eta_opt_schedule(trace.power, g, sigma2);
    trace.initial_mse = mse_time_avg(trace.power, g, trace.eta, sigma2);

    double prev = trace.initial_mse;
    for (int r = 1; r <= cfg.max_iters; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        BcdIter rec;

        trace.eta = eta_opt_schedule(trace.power, g, sigma2);
        rec.mse_after_denoise = mse_time_avg(trace.power, g, trace.eta, sigma2);

        if (update_power) {
            trace.power = solve_power_all(trace.eta, g, s, cfg.power_tol);
        }
        rec.mse_after_power = mse_time_avg(trace.power, g, trace.eta, sigma2);

        if (update_traj) {
            ScaSubproblem sub = build_sca_subproblem(trace.trajectory, trace.power, trace.eta, s);
            TrajSolveResult step = solve_sca_step(sub, cfg.traj_tol);
            trace.trajectory = step.trajectory;
            g = gains(trace.trajectory, s);
            rec.traj_objective = step.true_value;
            rec.traj_kkt = step.kkt_residual;
            rec.traj_inner_iters = step.iterations;
        }

        rec.mse = mse_time_avg(trace.power, g, trace.eta, sigma2);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        trace.iters.push_back(rec);
        trace.iterations = r;
        trace.final_mse = rec.mse;

        if (r >= 2 && (prev - rec.mse) / rec.mse < cfg.epsilon) {
            trace.stop_reason = StopReason::converged;
            break;
        }
        prev = rec.mse;
    }

    // On convergence, bring the cheap blocks to a joint fixed point so the
    // returned denoise schedule is exactly optimal for the returned power and
    // trajectory (the trajectory no longer moves).
    if (trace.stop_reason == StopReason::converged) {
        double cur = trace.final_mse;
        for (int i = 0; i < 50; ++i) {
            trace.eta = eta_opt_schedule(trace.power, g, sigma2);
            if (update_power) trace.power = solve_power_all(trace.eta, g, s, cfg.power_tol);
            const double next = mse_time_avg(trace.power, g, trace.eta, sigma2);
            const bool done = cur - next <= 1e-13 * std::max(1.0, cur);
            cur = next;
            if (done) break;
        }
        trace.eta = eta_opt_schedule(trace.power, g, sigma2);  // last word to the closed form
        trace.final_mse = mse_time_avg(trace.power, g, trace.eta, sigma2);
    }
    return trace;
}

}  // namespace aircomp
