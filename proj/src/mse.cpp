#include "aircomp/mse.hpp"

#include <cmath>
#include <stdexcept>

namespace aircomp {

double mse_slot(std::span<const double> p, std::span<const double> g, double eta, double sigma2) {
    if (p.size() != g.size()) throw std::invalid_argument("mse_slot: p and g length mismatch");
    const double k = double(p.size());
    if (eta == 0.0) throw std::invalid_argument("mse_slot: eta must be positive (got 0)");
    if (std::isinf(eta)) return 1.0 / k;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = std::sqrt(p[i] * g[i] / eta) - 1.0;
        sum += t * t;
    }
    return (sum + sigma2 / eta) / (k * k);
}

double mse_time_avg(const Matrix& p, const Matrix& g, const DenoiseSchedule& eta, double sigma2) {
    if (!p.same_shape(g) || eta.size() != p.cols) {
        throw std::invalid_argument("mse_time_avg: dimension mismatch");
    }
    const std::size_t k = p.rows, n = p.cols;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double e = eta[j];
        if (e == 0.0) throw std::invalid_argument("mse_time_avg: eta must be positive (got 0)");
        if (std::isinf(e)) {
            total += 1.0 / double(k);
            continue;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double t = std::sqrt(p(i, j) * g(i, j) / e) - 1.0;
            sum += t * t;
        }
        total += (sum + sigma2 / e) / (double(k) * double(k));
    }
    return total / double(n);
}

double eta_opt(std::span<const double> p, std::span<const double> g, double sigma2) {
    if (p.size() != g.size()) throw std::invalid_argument("eta_opt: p and g length mismatch");
    double amp_sum = 0.0;   // sum_k sqrt(p_k g_k)
    double power_sum = 0.0; // sum_k p_k g_k
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pg = p[i] * g[i];
        amp_sum += std::sqrt(pg);
        power_sum += pg;
    }
    if (amp_sum == 0.0) return kInf;
    const double r = (sigma2 + power_sum) / amp_sum;
    return r * r;
}

DenoiseSchedule eta_opt_schedule(const Matrix& p, const Matrix& g, double sigma2) {
    if (!p.same_shape(g)) throw std::invalid_argument("eta_opt_schedule: dimension mismatch");
    DenoiseSchedule eta(p.cols);
    for (std::size_t j = 0; j < p.cols; ++j) {
        double amp_sum = 0.0, power_sum = 0.0;
        for (std::size_t i = 0; i < p.rows; ++i) {
            const double pg = p(i, j) * g(i, j);
            amp_sum += std::sqrt(pg);
            power_sum += pg;
        }
        eta[j] = amp_sum == 0.0 ? kInf : [&] {
            const double r = (sigma2 + power_sum) / amp_sum;
            return r * r;
        }();
    }
    return eta;
}

namespace {

// Per-sample splitmix64 stream; the multiplier spreads consecutive sample
// indices far apart in the underlying Weyl sequence.
struct SampleStream {
    std::uint64_t s;
    SampleStream(std::uint64_t seed, std::uint64_t sample) {
        s = seed + sample * 0xa0761d6478bd642fULL;
        s = splitmix64(s) ^ (s >> 32);
    }
    double unit() { return u01(splitmix64(s)); }       // [0,1)
    double unit_open() { return u01_open(splitmix64(s)); }  // (0,1]
    void normals(double& z0, double& z1) {
        const double r = std::sqrt(-2.0 * std::log(unit_open()));
        const double th = 2.0 * M_PI * unit();
        z0 = r * std::cos(th);
        z1 = r * std::sin(th);
    }
};

}  // namespace

McEstimate mc_mse(std::span<const double> p, std::span<const double> g, double eta, double sigma2,
                  std::size_t samples, std::uint64_t seed, PhaseModel phases) {
    if (p.size() != g.size()) throw std::invalid_argument("mc_mse: p and g length mismatch");
    if (samples < 1000) throw std::invalid_argument("mc_mse: need at least 1000 samples");
    if (eta == 0.0) throw std::invalid_argument("mc_mse: eta must be positive (got 0)");
    const std::size_t k = p.size();
    const double inv_k = 1.0 / double(k);
    const bool silent = std::isinf(eta);
    const double sqrt_eta = silent ? 0.0 : std::sqrt(eta);
    const double noise_scale = std::sqrt(0.5 * sigma2);

    // residual coefficient per sensor: sqrt(p g)/sqrt(eta) - 1
    std::vector<double> amp(k), coef(k);
    for (std::size_t i = 0; i < k; ++i) {
        amp[i] = std::sqrt(p[i] * g[i]);
        coef[i] = silent ? -1.0 : amp[i] / sqrt_eta - 1.0;
    }

    std::vector<double> sym(k);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t m = 0; m < samples; ++m) {
        SampleStream rng(seed, m);
        for (std::size_t i = 0; i + 1 < k; i += 2) rng.normals(sym[i], sym[i + 1]);
        if (k % 2 != 0) {
            double z0, z1;
            rng.normals(z0, z1);
            sym[k - 1] = z0;
        }
        double err_re = 0.0, err_im = 0.0;
        if (phases == PhaseModel::explicit_random && !silent) {
            // b_k = sqrt(p) conj(h~), h_k = sqrt(g) h~ drawn on the unit circle
            for (std::size_t i = 0; i < k; ++i) {
                const double th = 2.0 * M_PI * rng.unit();
                const double c = std::cos(th), sn = std::sin(th);
                const double re = amp[i] * (c * c + sn * sn);   // ~amp up to 1 ulp
                const double im = amp[i] * (c * sn - sn * c);   // exactly 0
                err_re += (re / sqrt_eta - 1.0) * sym[i];
                err_im += (im / sqrt_eta) * sym[i];
            }
        } else {
            for (std::size_t i = 0; i < k; ++i) err_re += coef[i] * sym[i];
        }
        if (sigma2 > 0.0 && !silent) {
            double n_re, n_im;
            rng.normals(n_re, n_im);
            err_re += noise_scale * n_re / sqrt_eta;
            err_im += noise_scale * n_im / sqrt_eta;
        }
        const double err = (err_re * err_re + err_im * err_im) * inv_k * inv_k;
        sum += err;
        sum_sq += err * err;
    }

    McEstimate out;
    const double m = double(samples);
    out.estimate = sum / m;
    const double var = std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0));
    out.std_error = std::sqrt(var / m);
    return out;
}

}  // namespace aircomp
