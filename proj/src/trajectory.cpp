#include "aircomp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aircomp {

namespace {

// x^(-e) with fast paths for the exponents free-space alpha produces.
inline double inv_pow(double x, double e) {
    if (e == 1.0) return 1.0 / x;
    if (e == 0.5) return 1.0 / std::sqrt(x);
    if (e == 1.5) return 1.0 / (x * std::sqrt(x));
    if (e == 2.0) return 1.0 / (x * x);
    return std::pow(x, -e);
}

}  // namespace

ScaSubproblem build_sca_subproblem(const Trajectory& q_ref, const Matrix& p,
                                   const DenoiseSchedule& eta, const Scenario& s) {
    const std::size_t k = s.sensors.count();
    const std::size_t n = q_ref.slots();
    if (p.rows != k || p.cols != n || eta.size() != n) {
        throw std::invalid_argument("build_sca_subproblem: dimension mismatch");
    }
    ScaSubproblem sub;
    sub.scenario = &s;
    sub.q_ref = q_ref;
    sub.a = Matrix(k, n);
    sub.gamma = Matrix(k, n);
    sub.g_ref = Matrix(k, n);
    sub.d2_ref = Matrix(k, n);

    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double alpha = s.channel.alpha;
    const double beta0 = s.channel.beta0;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 w = s.sensors.positions[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = norm2(q_ref.q[j + 1] - w);
            sub.d2_ref(i, j) = d2;
            const double e = eta[j];
            const double ratio = std::isinf(e) ? 0.0 : p(i, j) * beta0 / e;
            if (ratio <= 0.0) continue;  // slot contributes nothing; a = gamma = 0
            const double b = 2.0 * std::sqrt(ratio);
            sub.a(i, j) = ratio;
            sub.g_ref(i, j) = b * inv_pow(h2 + d2, 0.25 * alpha);
            sub.gamma(i, j) = -0.25 * alpha * b * inv_pow(h2 + d2, 0.25 * (alpha + 4.0));
        }
    }
    return sub;
}

double true_traj_objective(const Trajectory& traj, const Matrix& p, const DenoiseSchedule& eta,
                           const Scenario& s) {
    const std::size_t k = s.sensors.count();
    const std::size_t n = traj.slots();
    if (p.rows != k || p.cols != n || eta.size() != n) {
        throw std::invalid_argument("true_traj_objective: dimension mismatch");
    }
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double alpha = s.channel.alpha;
    const double beta0 = s.channel.beta0;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 w = s.sensors.positions[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double e = eta[j];
            const double ratio = std::isinf(e) ? 0.0 : p(i, j) * beta0 / e;
            if (ratio <= 0.0) continue;
            const double x = h2 + norm2(traj.q[j + 1] - w);
            total += ratio * inv_pow(x, 0.5 * alpha) - 2.0 * std::sqrt(ratio) * inv_pow(x, 0.25 * alpha);
        }
    }
    return total;
}

namespace {

struct SurrogateTerms {
    double value = 0.0;
    bool in_region = true;
};

// Shared evaluation core. Positive region_slack tolerates projection
// round-off on the L >= 0 half-spaces.
SurrogateTerms eval_surrogate(const Trajectory& traj, const ScaSubproblem& sub, double region_slack) {
    const Scenario& s = *sub.scenario;
    const std::size_t k = sub.a.rows, n = sub.a.cols;
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double alpha = s.channel.alpha;
    SurrogateTerms out;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 w = s.sensors.positions[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double a = sub.a(i, j);
            if (a <= 0.0) continue;
            const Vec2 qr = sub.q_ref.q[j + 1];
            const Vec2 q = traj.q[j + 1];
            const double d2r = sub.d2_ref(i, j);
            const double lin = d2r + 2.0 * dot(qr - w, q - qr);
            if (lin < -region_slack * (h2 + d2r)) {
                out.in_region = false;
                return out;
            }
            out.value += a * inv_pow(h2 + std::max(lin, 0.0), 0.5 * alpha);
            out.value -= sub.g_ref(i, j) + sub.gamma(i, j) * (norm2(q - w) - d2r);
        }
    }
    return out;
}

}  // namespace

double surrogate_objective(const Trajectory& traj, const ScaSubproblem& sub) {
    if (traj.q.size() != sub.q_ref.q.size()) {
        throw std::invalid_argument("surrogate_objective: waypoint count mismatch");
    }
    SurrogateTerms t = eval_surrogate(traj, sub, 1e-9);
    if (!t.in_region) {
        throw std::domain_error("surrogate_objective: linearized squared distance < 0 (outside trust region)");
    }
    return t.value;
}

namespace {

// True objective recovered from the subproblem coefficients (b = 2 sqrt(a)).
double true_value_from_sub(const Trajectory& traj, const ScaSubproblem& sub) {
    const Scenario& s = *sub.scenario;
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double alpha = s.channel.alpha;
    double total = 0.0;
    for (std::size_t i = 0; i < sub.a.rows; ++i) {
        const Vec2 w = s.sensors.positions[i];
        for (std::size_t j = 0; j < sub.a.cols; ++j) {
            const double a = sub.a(i, j);
            if (a <= 0.0) continue;
            const double x = h2 + norm2(traj.q[j + 1] - w);
            total += a * inv_pow(x, 0.5 * alpha) - 2.0 * std::sqrt(a) * inv_pow(x, 0.25 * alpha);
        }
    }
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dykstra projection onto the intersection of the speed-chain balls, pinned
// endpoints, and the active trust-region half-spaces.

namespace {

struct HalfSpace {
    std::size_t n;  // waypoint index
    Vec2 u;         // constraint dot(u, q[n]) >= rhs
    double rhs;
    double inv_u2;
};

// Cyclic (Dykstra-style) projection onto the speed chain, pinned endpoints,
// and trust-region half-spaces. Half-spaces join the cycle lazily when a
// sweep finds them violated; almost all never do. Stops on feasibility plus
// displacement stall rather than full dual convergence, so the output is a
// feasible near-projection.
struct Projector {
    std::size_t num_points;  // N + 1
    double radius;           // v_max * slot
    double feas_tol;         // constraint slack, well inside the checker's slack
    double stall_tol;
    std::vector<HalfSpace> half_spaces;
    std::vector<std::size_t> active;
    std::vector<char> is_active;
    std::vector<Vec2> ball_corr_a, ball_corr_b, hs_corr;

    explicit Projector(const ScaSubproblem& sub) {
        const Scenario& s = *sub.scenario;
        num_points = sub.q_ref.q.size();
        radius = s.uav.v_max_mps * s.mission.slot_s;
        feas_tol = 1e-10 * radius;
        stall_tol = 1e-8 * radius;
        const std::size_t k = sub.a.rows, n = sub.a.cols;
        // Half-spaces only exist where the f-term does; the pinned final
        // waypoint always satisfies its own (L = d2_ref >= 0).
        for (std::size_t i = 0; i < k; ++i) {
            const Vec2 w = s.sensors.positions[i];
            for (std::size_t j = 0; j + 1 < n; ++j) {
                if (sub.a(i, j) <= 0.0) continue;
                const Vec2 qr = sub.q_ref.q[j + 1];
                const Vec2 u = 2.0 * (qr - w);
                const double u2 = norm2(u);
                if (u2 == 0.0) continue;  // reference overhead: L is constant 0
                half_spaces.push_back({j + 1, u, dot(u, qr) - sub.d2_ref(i, j), 1.0 / u2});
            }
        }
        ball_corr_a.resize(num_points);
        ball_corr_b.resize(num_points);
        hs_corr.resize(half_spaces.size());
        is_active.assign(half_spaces.size(), 0);
    }

    // One cyclic pass; returns the largest point displacement.
    double pass(std::vector<Vec2>& x, double& worst_ball) {
        const std::size_t last = num_points - 1;
        double moved = 0.0;
        worst_ball = 0.0;
        for (std::size_t n = 1; n < num_points; ++n) {
            const bool a_free = (n - 1 != 0);
            const bool b_free = (n != last);
            Vec2 pa = a_free ? x[n - 1] + ball_corr_a[n] : x[n - 1];
            Vec2 pb = b_free ? x[n] + ball_corr_b[n] : x[n];
            Vec2 na = pa, nb = pb;
            const Vec2 d = pb - pa;
            const double len = norm(d);
            if (len > radius && (a_free || b_free)) {
                const Vec2 e = (1.0 / len) * d;
                const double excess = len - radius;
                if (a_free && b_free) {
                    na = pa + (0.5 * excess) * e;
                    nb = pb - (0.5 * excess) * e;
                } else if (b_free) {
                    nb = pa + radius * e;
                } else {
                    na = pb - radius * e;
                }
            }
            if (a_free) {
                ball_corr_a[n] = pa - na;
                moved = std::max(moved, norm(na - x[n - 1]));
                x[n - 1] = na;
            }
            if (b_free) {
                ball_corr_b[n] = pb - nb;
                moved = std::max(moved, norm(nb - x[n]));
                x[n] = nb;
            }
            worst_ball = std::max(worst_ball, norm(x[n] - x[n - 1]) - radius);
        }
        for (std::size_t h : active) {
            const HalfSpace& hs = half_spaces[h];
            const Vec2 p = x[hs.n] + hs_corr[h];
            const double gap = hs.rhs - dot(hs.u, p);
            Vec2 np = p;
            if (gap > 0.0) np = p + (gap * hs.inv_u2) * hs.u;
            hs_corr[h] = p - np;
            moved = std::max(moved, norm(np - x[hs.n]));
            x[hs.n] = np;
        }
        return moved;
    }

    // Appends violated half-spaces to the active cycle; true if any was added.
    bool activate_violated(const std::vector<Vec2>& x) {
        bool added = false;
        for (std::size_t h = 0; h < half_spaces.size(); ++h) {
            if (is_active[h]) continue;
            const HalfSpace& hs = half_spaces[h];
            if (dot(hs.u, x[hs.n]) < hs.rhs - feas_tol * std::sqrt(norm2(hs.u))) {
                is_active[h] = 1;
                hs_corr[h] = Vec2{};
                active.push_back(h);
                added = true;
            }
        }
        return added;
    }

    bool project(std::vector<Vec2>& x, int max_passes = 3000) {
        std::fill(ball_corr_a.begin(), ball_corr_a.end(), Vec2{});
        std::fill(ball_corr_b.begin(), ball_corr_b.end(), Vec2{});
        for (std::size_t h : active) is_active[h] = 0;
        active.clear();
        activate_violated(x);
        int passes_left = max_passes;
        for (int outer = 0; outer < 4; ++outer) {
            double worst_ball = kInf;
            while (passes_left-- > 0) {
                const double moved = pass(x, worst_ball);
                if (worst_ball <= feas_tol && moved <= stall_tol) break;
            }
            if (worst_ball > feas_tol) return false;
            if (!activate_violated(x)) return true;
        }
        return feasible(x);
    }

    bool feasible(const std::vector<Vec2>& x) const {
        for (std::size_t n = 1; n < num_points; ++n) {
            if (norm(x[n] - x[n - 1]) > radius + 2.0 * feas_tol) return false;
        }
        for (const HalfSpace& hs : half_spaces) {
            if (dot(hs.u, x[hs.n]) < hs.rhs - 2.0 * feas_tol * std::sqrt(norm2(hs.u))) return false;
        }
        return true;
    }
};

}  // namespace

TrajSolveResult solve_sca_step(const ScaSubproblem& sub, double tol) {
    const Scenario& s = *sub.scenario;
    const std::size_t k = sub.a.rows, n = sub.a.cols;
    const std::size_t num_points = n + 1;
    const double h2 = s.uav.altitude_m * s.uav.altitude_m;
    const double alpha = s.channel.alpha;

    TrajSolveResult res;
    res.trajectory = sub.q_ref;
    std::vector<Vec2>& x = res.trajectory.q;

    auto gradient = [&](const std::vector<Vec2>& pts, std::vector<Vec2>& out) {
        std::fill(out.begin(), out.end(), Vec2{});
        for (std::size_t i = 0; i < k; ++i) {
            const Vec2 w = s.sensors.positions[i];
            for (std::size_t j = 0; j + 1 < n; ++j) {  // q[N] is pinned
                const double a = sub.a(i, j);
                if (a <= 0.0) continue;
                const Vec2 qr = sub.q_ref.q[j + 1];
                const Vec2 q = pts[j + 1];
                const double lin = std::max(sub.d2_ref(i, j) + 2.0 * dot(qr - w, q - qr), 0.0);
                const double f_slope = -alpha * a * inv_pow(h2 + lin, 0.5 * alpha + 1.0);
                out[j + 1] = out[j + 1] + f_slope * (qr - w) - (2.0 * sub.gamma(i, j)) * (q - w);
            }
        }
    };

    Projector proj(sub);
    auto kkt_residual = [&](const std::vector<Vec2>& pts, const std::vector<Vec2>& g) {
        std::vector<Vec2> probe = pts;
        for (std::size_t m = 1; m + 1 < num_points; ++m) probe[m] = probe[m] - g[m];
        proj.project(probe);
        double r2 = 0.0, g2 = 0.0;
        for (std::size_t m = 1; m + 1 < num_points; ++m) {
            r2 += norm2(probe[m] - pts[m]);
            g2 += norm2(g[m]);
        }
        return std::sqrt(r2) / (1.0 + std::sqrt(g2));
    };

    std::vector<Vec2> grad(num_points), prev_grad(num_points), prev_x, dir(num_points), trial(num_points);
    double cur = eval_surrogate(res.trajectory, sub, 1e-9).value;
    const double entry_value = cur;

    // curvature of the surrogate at the reference bounds the sane step size
    double curv_max = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double a = sub.a(i, j);
            if (a <= 0.0) continue;
            const double d2r = sub.d2_ref(i, j);
            c += -2.0 * sub.gamma(i, j) +
                 alpha * (alpha + 2.0) * a * inv_pow(h2 + d2r, 0.5 * alpha + 2.0) * d2r;
        }
        curv_max = std::max(curv_max, c);
    }

    gradient(x, grad);
    double step = curv_max > 0.0 ? 1.0 / curv_max : 1.0;
    int it = 0;
    int accepted_steps = 0;
    int stalls = 0;
    for (; it < 500; ++it) {
        double g2 = 0.0;
        for (const Vec2& gi : grad) g2 += norm2(gi);
        if (g2 == 0.0) break;
        if (accepted_steps > 0) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t m = 1; m + 1 < num_points; ++m) {
                const Vec2 sm = x[m] - prev_x[m];
                const Vec2 ym = grad[m] - prev_grad[m];
                sy += dot(sm, ym);
                ss += norm2(sm);
            }
            if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-12, 1e14);
        }

        // one projection per iteration; the search probes the feasible
        // segment toward the projected point (feasible throughout, trust
        // region included, because every constraint is convex and L affine)
        trial = x;
        for (std::size_t m = 1; m + 1 < num_points; ++m) trial[m] = x[m] - step * grad[m];
        if (!proj.project(trial)) {
            step *= 0.25;
            continue;
        }
        double d_inf = 0.0, dir_deriv = 0.0;
        for (std::size_t m = 1; m + 1 < num_points; ++m) {
            dir[m] = trial[m] - x[m];
            d_inf = std::max(d_inf, norm(dir[m]));
            dir_deriv += dot(grad[m], dir[m]);
        }
        if (d_inf <= 1e-12 * std::max(1.0, proj.radius)) break;  // projected fixed point

        bool accepted = false;
        double trial_value = cur;
        double sfrac = 1.0;
        Trajectory trial_traj;
        trial_traj.q = trial;
        for (int bt = 0; bt < 50; ++bt) {
            const SurrogateTerms ev = eval_surrogate(trial_traj, sub, 1e-9);
            if (ev.in_region && ev.value <= cur + 1e-4 * sfrac * std::min(dir_deriv, 0.0)) {
                accepted = true;
                trial_value = ev.value;
                break;
            }
            sfrac *= 0.5;
            for (std::size_t m = 1; m + 1 < num_points; ++m) trial_traj.q[m] = x[m] + sfrac * dir[m];
        }
        if (!accepted) break;
        prev_x = x;
        prev_grad = grad;
        x = trial_traj.q;
        ++accepted_steps;
        const double improvement = cur - trial_value;
        cur = trial_value;
        gradient(x, grad);
        stalls = improvement <= 1e-9 * (1.0 + std::abs(cur)) ? stalls + 1 : 0;
        if (stalls >= 2 && accepted_steps >= 3) {
            // surrogate improvement has flattened; accept only if the
            // projected-gradient fixed-point residual agrees
            if (kkt_residual(x, grad) <= 10.0 * tol) break;
            stalls = 0;
        }
        if (it % 50 == 49 && kkt_residual(x, grad) <= tol) break;
    }
    res.iterations = accepted_steps;

    // never worse than staying put
    if (!(cur <= entry_value)) {
        res.trajectory = sub.q_ref;
        cur = entry_value;
        gradient(res.trajectory.q, grad);
    }

    res.kkt_residual = kkt_residual(res.trajectory.q, grad);
    res.surrogate_value = cur;
    res.true_value = true_value_from_sub(res.trajectory, sub);
    return res;
}

}  // namespace aircomp
