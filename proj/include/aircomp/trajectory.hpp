#pragma once

#include "aircomp/channel.hpp"
#include "aircomp/core.hpp"
#include "aircomp/mse.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// Convexified trajectory subproblem built around a reference trajectory with
/// the power and denoising blocks held fixed. Per (sensor, slot):
///   a      = p * beta0 / eta                      (numerator of the f-term)
///   b      = 2 * sqrt(p * beta0 / eta)            (numerator of the g-term)
///   g_ref  = b * (H^2 + d2_ref)^(-alpha/4)
///   gamma  = -(alpha/4) * b * (H^2 + d2_ref)^(-(alpha+4)/4)
/// where d2_ref is the squared horizontal distance at the reference point.
/// The f-term's squared distance is replaced by its linearization
///   L(q) = d2_ref + 2 (q_ref - w)^T (q - q_ref)  >= 0,
/// while the g-term keeps the true squared distance in its tangent bound, so
/// the surrogate upper-bounds the true objective everywhere the subproblem is
/// defined and touches it at the reference.
struct ScaSubproblem {
    const Scenario* scenario = nullptr;
    Trajectory q_ref;
    Matrix a;        // K x N
    Matrix gamma;    // K x N, <= 0
    Matrix g_ref;    // K x N
    Matrix d2_ref;   // K x N
};

ScaSubproblem build_sca_subproblem(const Trajectory& q_ref, const Matrix& p,
                                   const DenoiseSchedule& eta, const Scenario& s);

/// sum over (k, n) of  a (H^2 + d^2)^(-alpha/2) - b (H^2 + d^2)^(-alpha/4),
/// the slot-MSE numerator with its power- and trajectory-independent
/// constants dropped. Equals mse_time_avg * N * K^2 - sum_n (K + sigma2/eta_n).
double true_traj_objective(const Trajectory& traj, const Matrix& p, const DenoiseSchedule& eta,
                           const Scenario& s);

/// Convex majorizer of true_traj_objective; tight at q_ref. Throws
/// std::domain_error if any linearized squared distance falls below zero
/// (outside the trust region) beyond a small relative slack.
double surrogate_objective(const Trajectory& traj, const ScaSubproblem& sub);

struct TrajSolveResult {
    Trajectory trajectory;
    double surrogate_value = 0.0;
    double true_value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// One majorize-minimize step: minimizes the surrogate over the speed-chain,
/// endpoint, and trust-region constraints by spectral projected gradient with
/// Dykstra projection, starting from q_ref. The returned trajectory is
/// feasible and never has a larger surrogate (hence true) value than q_ref.
TrajSolveResult solve_sca_step(const ScaSubproblem& sub, double tol = 1e-6);

}  // namespace aircomp
