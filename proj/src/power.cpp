#include "aircomp/power.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aircomp {

double power_objective(std::span<const double> c, std::span<const double> p) {
    if (c.size() != p.size()) throw std::invalid_argument("power_objective: length mismatch");
    double obj = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double t = std::sqrt(p[i]) * c[i] - 1.0;
        obj += t * t;
    }
    return obj;
}

namespace {

// Stationary point of the per-slot term plus mu * p, clipped to [0, peak].
inline double slot_power(double c, double mu, double peak) {
    if (c <= 0.0) return 0.0;
    if (mu <= 0.0) return std::min(1.0 / (c * c), peak);
    const double r = c / (c * c + mu);
    return std::min(r * r, peak);
}

double mean_power(std::span<const double> c, double mu, double peak) {
    double sum = 0.0;
    for (double ci : c) sum += slot_power(ci, mu, peak);
    return sum / double(c.size());
}

}  // namespace

PowerSolution solve_power_sensor(const PowerSubproblem& sub, double tol) {
    const std::size_t n = sub.c.size();
    if (n == 0) throw std::invalid_argument("solve_power_sensor: empty subproblem");
    for (double ci : sub.c) {
        if (!std::isfinite(ci) || ci < 0.0) throw std::invalid_argument("solve_power_sensor: c must be finite and >= 0");
    }
    if (!(sub.avg_w > 0.0)) throw std::invalid_argument("solve_power_sensor: avg power budget must be > 0");
    if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("solve_power_sensor: tol must be in (0, 1e-3]");

    PowerSolution out;
    out.p.resize(n);
    auto fill = [&](double mu) {
        for (std::size_t i = 0; i < n; ++i) out.p[i] = slot_power(sub.c[i], mu, sub.peak_w);
    };

    if (mean_power(sub.c, 0.0, sub.peak_w) <= sub.avg_w) {
        fill(0.0);
        out.lambda = 0.0;
        return out;
    }

    // mean(mu) is continuous, nonincreasing; every slot power is <= 1/(4 mu),
    // so mu = 1/(4 avg) already satisfies the budget. Bisect mu = lambda/N.
    double lo = 0.0;
    double hi = 1.0 / (4.0 * sub.avg_w);
    while (mean_power(sub.c, hi, sub.peak_w) > sub.avg_w) hi *= 2.0;  // safety, should not trigger
    for (int it = 0; it < 128; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_power(sub.c, mid, sub.peak_w) > sub.avg_w) {
            lo = mid;
        } else {
            hi = mid;
        }
        const double lambda = hi * double(n);
        const double slack = lambda * (sub.avg_w - mean_power(sub.c, hi, sub.peak_w));
        if (slack <= tol * sub.avg_w * std::max(lambda, 1.0) && (hi - lo) <= 1e-14 * hi) break;
    }
    fill(hi);  // feasible side of the bracket
    out.lambda = hi * double(n);
    return out;
}

namespace {

// Exact projection onto {0 <= u <= umax, sum u^2 <= r2}: clamp to the box,
// then bisect the ball multiplier in u = clamp(z/(1+theta), 0, umax).
void project_box_ball(std::vector<double>& u, double umax, double r2) {
    const std::vector<double> z = u;  // pre-clamp point; the multiplier form below needs it
    double ss = 0.0;
    for (double& x : u) {
        x = std::clamp(x, 0.0, umax);
        ss += x * x;
    }
    if (ss <= r2) return;
    auto norm2_at = [&](double theta) {
        double s = 0.0;
        for (double zi : z) {
            const double x = std::clamp(zi / (1.0 + theta), 0.0, umax);
            s += x * x;
        }
        return s;
    };
    double lo = 0.0, hi = 1.0;
    while (norm2_at(hi) > r2) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm2_at(mid) > r2) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(z[i] / (1.0 + hi), 0.0, umax);
}

}  // namespace

// The iteration runs in amplitude coordinates u = sqrt(p), where the
// objective sum (c u - 1)^2 is a smooth quadratic (the p-space gradient blows
// up at p = 0) and the constraint set maps to the box-ball intersection
// above. Spectral projected gradient with a monotone Armijo line search.
std::vector<double> power_oracle(const PowerSubproblem& sub, int iters) {
    const std::size_t n = sub.c.size();
    const double umax = std::sqrt(sub.peak_w);
    const double r2 = sub.avg_w * double(n);
    // zero-gain slots contribute a constant; pin them to zero so they do not
    // hold budget hostage
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (sub.c[i] > 0.0) u[i] = std::min(std::sqrt(sub.avg_w), umax);
    }
    project_box_ball(u, umax, r2);

    auto objective = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = sub.c[i] * x[i] - 1.0;
            if (sub.c[i] > 0.0) s += t * t;
            else s += 1.0;
        }
        return s;
    };
    auto gradient = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = sub.c[i] > 0.0 ? 2.0 * sub.c[i] * (sub.c[i] * x[i] - 1.0) : 0.0;
        }
    };

    double c2max = 0.0;
    for (double ci : sub.c) c2max = std::max(c2max, ci * ci);
    if (c2max == 0.0) return std::vector<double>(n, 0.0);
    const double step = 1.0 / (2.0 * c2max);  // inverse Lipschitz constant

    // Monotone accelerated projected gradient with adaptive restart: the
    // momentum point y may leave the feasible set (the quadratic is defined
    // everywhere); x stays feasible and its objective never increases.
    std::vector<double> x = u, y = u, z(n), grad(n), x_prev(n);
    double fx = objective(x);
    double t = 1.0;
    for (int it = 0; it < iters; ++it) {
        gradient(y, grad);
        for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - step * grad[i];
        project_box_ball(z, umax, r2);
        const double fz = objective(z);

        double restart_dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) restart_dot += (y[i] - z[i]) * (z[i] - x[i]);

        x_prev = x;
        const double fx_prev = fx;
        if (fz >= fx) {
            // rejected step: restart so the next iterate is a plain projected
            // gradient step from x, which descends strictly away from optima
            y = x;
            t = 1.0;
            if (it % 64 == 63 && fx_prev - fx <= 1e-16 * (1.0 + fx)) {
                double r = 0.0;
                gradient(x, grad);
                for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - step * grad[i];
                project_box_ball(z, umax, r2);
                for (std::size_t i = 0; i < n; ++i) r += (z[i] - x[i]) * (z[i] - x[i]);
                if (r <= 1e-26 * (1.0 + r2)) break;
            }
            continue;
        }
        x = z;
        fx = fz;
        if (restart_dot > 0.0) t = 1.0;  // momentum fighting descent: reset
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[i] + (t / t_next) * (z[i] - x[i]) + ((t - 1.0) / t_next) * (x[i] - x_prev[i]);
        }
        t = t_next;

        if (it % 64 == 63 && fx_prev - fx <= 1e-16 * (1.0 + fx)) {
            // fixed-point residual at the feasible iterate decides convergence
            gradient(x, grad);
            for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - step * grad[i];
            project_box_ball(z, umax, r2);
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r += (z[i] - x[i]) * (z[i] - x[i]);
            if (r <= 1e-26 * (1.0 + r2)) break;
        }
    }

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = x[i] * x[i];
    return p;
}

Matrix solve_power_all(const DenoiseSchedule& eta, const Matrix& g, const Scenario& s, double tol) {
    const std::size_t k = g.rows, n = g.cols;
    if (eta.size() != n) throw std::invalid_argument("solve_power_all: eta length mismatch");
    if (k != s.sensors.count()) throw std::invalid_argument("solve_power_all: gain rows != sensor count");
    Matrix p(k, n);
    PowerSubproblem sub;
    sub.c.resize(n);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sub.c[j] = std::isinf(eta[j]) ? 0.0 : std::sqrt(g(i, j) / eta[j]);
        }
        sub.peak_w = s.sensors.peak_power_w[i];
        sub.avg_w = s.sensors.avg_power_w[i];
        PowerSolution sol = solve_power_sensor(sub, tol);
        std::copy(sol.p.begin(), sol.p.end(), p.row(i));
    }
    return p;
}

ValidationReport check_power_schedule(const Matrix& p, const Scenario& s) {
    ValidationReport r;
    const std::size_t k = s.sensors.count();
    if (p.rows != k || p.cols != std::size_t(std::max(0, s.mission.num_slots))) {
        r.violations.push_back("power: schedule shape does not match scenario");
        return r;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double peak = s.sensors.peak_power_w[i];
        const double avg = s.sensors.avg_power_w[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < p.cols; ++j) {
            const double x = p(i, j);
            if (!(x >= 0.0) || x > peak * (1.0 + 1e-9)) {
                std::ostringstream os;
                os << "power: p[" << i << "][" << j << "] = " << x << " outside [0, peak = " << peak << "]";
                r.violations.push_back(os.str());
            }
            sum += x;
        }
        if (sum / double(p.cols) > avg * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "power: sensor " << i << " mean power " << sum / double(p.cols)
               << " exceeds budget " << avg;
            r.violations.push_back(os.str());
        }
    }
    return r;
}

}  // namespace aircomp
