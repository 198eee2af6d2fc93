#pragma once

#include <cstdint>
#include <span>

#include "aircomp/core.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

/// Per-slot denoising factors. +infinity is the all-silent sentinel: the
/// receiver outputs 0 and the slot MSE is 1/K.
using DenoiseSchedule = std::vector<double>;

/// Analytic slot MSE
///   (1/K^2) * ( sum_k (sqrt(p_k g_k / eta) - 1)^2 + sigma2/eta ).
/// eta == +inf yields 1/K; eta == 0 throws (caller bug).
double mse_slot(std::span<const double> p, std::span<const double> g, double eta, double sigma2);

/// Mean of mse_slot over all N slots.
double mse_time_avg(const Matrix& p, const Matrix& g, const DenoiseSchedule& eta, double sigma2);

/// Closed-form minimizer of the slot MSE over eta:
///   ((sigma2 + sum_k p_k g_k) / (sum_k sqrt(p_k g_k)))^2,
/// or +inf when every p_k g_k is zero.
double eta_opt(std::span<const double> p, std::span<const double> g, double sigma2);

DenoiseSchedule eta_opt_schedule(const Matrix& p, const Matrix& g, double sigma2);

/// conjugate_cancelled applies the transmit precoder's exact phase
/// cancellation analytically (the model guarantees |h~| = 1, so the effective
/// per-sensor coefficient is sqrt(p_k g_k)); explicit_random draws the unit
/// phases and multiplies them out, leaving ~1-ulp residue.
enum class PhaseModel { conjugate_cancelled, explicit_random };

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Signal-level Monte-Carlo of the aggregation error |f_hat - f|^2: real unit
/// Gaussian symbols, circular Gaussian noise, conjugate precoding at each
/// sensor, receiver scaling 1/(K sqrt(eta)). Every sample derives its own
/// splitmix64 stream from (seed, sample index), so the estimate is
/// independent of evaluation order. The error is accumulated in residual form
/// (coefficients sqrt(p g / eta) - 1), which is algebraically identical to
/// |y/(K sqrt(eta)) - f|^2 and exact when the instance is perfectly aligned.
McEstimate mc_mse(std::span<const double> p, std::span<const double> g, double eta, double sigma2,
                  std::size_t samples, std::uint64_t seed,
                  PhaseModel phases = PhaseModel::conjugate_cancelled);

}  // namespace aircomp
