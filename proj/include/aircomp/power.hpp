#pragma once

#include <span>

#include "aircomp/core.hpp"
#include "aircomp/mse.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// One sensor's transmit-power problem:
///   minimize sum_n (sqrt(p_n) c_n - 1)^2
///   s.t. 0 <= p_n <= peak_w,  mean_n p_n <= avg_w,
/// where c_n = sqrt(g_n / eta_n) folds channel gain and denoising factor.
struct PowerSubproblem {
    std::vector<double> c;
    double peak_w = 0.0;
    double avg_w = 0.0;
};

struct PowerSolution {
    std::vector<double> p;
    double lambda = 0.0;  // multiplier of the mean-power constraint
};

double power_objective(std::span<const double> c, std::span<const double> p);

/// KKT solver: per-slot stationarity p_n = clip((c_n/(c_n^2 + lambda/N))^2, 0, peak)
/// with lambda found by bisection on the mean-power constraint. Slots with
/// c_n = 0 get zero power. Output is always primal feasible.
PowerSolution solve_power_sensor(const PowerSubproblem& sub, double tol = 1e-8);

/// Independent oracle: spectral projected gradient on the same objective with
/// exact projection onto {0 <= p <= peak, mean p <= avg} (1-D bisection on the
/// capped-simplex shift). Monotone in the objective.
std::vector<double> power_oracle(const PowerSubproblem& sub, int iters = 4000);

/// Solves the K per-sensor subproblems given the denoising schedule and gain
/// matrix. Safe to call concurrently on shared inputs.
Matrix solve_power_all(const DenoiseSchedule& eta, const Matrix& g, const Scenario& s, double tol = 1e-8);

/// Feasibility of a power schedule against peak/average limits (with relative
/// slack 1e-9).
ValidationReport check_power_schedule(const Matrix& p, const Scenario& s);

}  // namespace aircomp
