#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "aircomp/mse.hpp"

using namespace aircomp;

namespace {

// Test-side oracle: golden-section search for the minimizing eta over a wide
// log bracket. Independent of eta_opt's closed form.
double eta_golden_section(std::span<const double> p, std::span<const double> g, double sigma2,
                          double bracket_center) {
    double lo = std::log(bracket_center) + std::log(1e-12);
    double hi = std::log(bracket_center) + std::log(1e12);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = mse_slot(p, g, std::exp(x1), sigma2);
    double f2 = mse_slot(p, g, std::exp(x2), sigma2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = mse_slot(p, g, std::exp(x1), sigma2);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = mse_slot(p, g, std::exp(x2), sigma2);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

struct Instance {
    std::vector<double> p, g;
    double sigma2;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_k = 10) {
    Instance inst;
    const std::size_t k = 1 + std::size_t(uniform(rng) * double(max_k));
    for (std::size_t i = 0; i < k; ++i) {
        inst.p.push_back(log_uniform(rng, 1e-6, 1e2));
        inst.g.push_back(log_uniform(rng, 1e-6, 1e2));
    }
    inst.sigma2 = log_uniform(rng, 1e-8, 1e2);
    return inst;
}

}  // namespace

TEST_CASE("mse_slot hand-checked values") {
    const double p1[] = {1.0};
    const double g1[] = {1.0};
    // K=1, p*g=1, sigma2=1, eta=4: (1/2 - 1)^2 + 1/4 = 0.5
    CHECK(mse_slot(p1, g1, 4.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    // perfect alignment, zero noise -> 0
    const double p3[] = {2.0, 0.5, 8.0};
    const double g3[] = {2.0, 8.0, 0.5};  // p*g = 4 for all
    CHECK(mse_slot(p3, g3, 4.0, 0.0) == 0.0);

    // all powers zero -> 1/K for any eta including the sentinel
    const double z[] = {0.0, 0.0, 0.0, 0.0};
    const double gz[] = {1.0, 2.0, 3.0, 4.0};
    CHECK(mse_slot(z, gz, 1.0, 0.0) == doctest::Approx(0.25));
    CHECK(mse_slot(z, gz, kInf, 123.0) == doctest::Approx(0.25));

    CHECK_THROWS_AS(mse_slot(p1, g1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(mse_slot(p1, std::span<const double>(g3, 2), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("mse_slot lower bounds") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const Instance inst = random_instance(rng);
        const double eta = log_uniform(rng, 1e-8, 1e8);
        const double k = double(inst.p.size());
        const double v = mse_slot(inst.p, inst.g, eta, inst.sigma2);
        CHECK(v >= 0.0);
        CHECK(v >= inst.sigma2 / (k * k * eta) * (1.0 - 1e-12));
    }
}

TEST_CASE("mse_time_avg is the slot mean") {
    // two slots engineered to MSE 0.2 and 0.4
    Matrix p(1, 2), g(1, 2);
    p(0, 0) = 1.0;
    g(0, 0) = 1.0;
    p(0, 1) = 1.0;
    g(0, 1) = 1.0;
    DenoiseSchedule eta = {4.0, 4.0};
    // per-slot with sigma2: (1/2-1)^2 + s/4; choose s to hit 0.2 / 0.4 via different eta
    // simpler: verify mean against direct mse_slot calls on random data
    std::mt19937_64 rng(5);
    Matrix pr(3, 7), gr(3, 7);
    DenoiseSchedule er(7);
    for (std::size_t j = 0; j < 7; ++j) {
        er[j] = log_uniform(rng, 1e-4, 1e4);
        for (std::size_t i = 0; i < 3; ++i) {
            pr(i, j) = log_uniform(rng, 1e-4, 1e2);
            gr(i, j) = log_uniform(rng, 1e-4, 1e2);
        }
    }
    double manual = 0.0;
    for (std::size_t j = 0; j < 7; ++j) {
        std::vector<double> pc, gc;
        for (std::size_t i = 0; i < 3; ++i) {
            pc.push_back(pr(i, j));
            gc.push_back(gr(i, j));
        }
        manual += mse_slot(pc, gc, er[j], 0.37);
    }
    CHECK(mse_time_avg(pr, gr, er, 0.37) == doctest::Approx(manual / 7.0).epsilon(1e-14));

    CHECK(mse_time_avg(p, g, eta, 1.0) == doctest::Approx(0.5).epsilon(1e-14));  // identical slots

    DenoiseSchedule wrong(3, 1.0);
    CHECK_THROWS_AS(mse_time_avg(p, g, wrong, 1.0), std::invalid_argument);
}

TEST_CASE("eta_opt closed form") {
    const double p1[] = {1.0};
    const double g1[] = {1.0};
    CHECK(eta_opt(p1, g1, 1.0) == doctest::Approx(4.0).epsilon(1e-15));

    // zero noise, aligned amplitudes a^2: optimum equals a^2, slot MSE 0
    const double pa[] = {9.0, 9.0, 9.0};
    const double ga[] = {1.0, 1.0, 1.0};
    CHECK(eta_opt(pa, ga, 0.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(mse_slot(pa, ga, eta_opt(pa, ga, 0.0), 0.0) == doctest::Approx(0.0));

    const double z[] = {0.0, 0.0};
    const double gz[] = {1.0, 1.0};
    CHECK(std::isinf(eta_opt(z, gz, 1.0)));
}

TEST_CASE("eta_opt matches the golden-section oracle") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 40; ++t) {
        const Instance inst = random_instance(rng);
        const double closed = eta_opt(inst.p, inst.g, inst.sigma2);
        const double searched = eta_golden_section(inst.p, inst.g, inst.sigma2, closed);
        const double m_closed = mse_slot(inst.p, inst.g, closed, inst.sigma2);
        const double m_searched = mse_slot(inst.p, inst.g, searched, inst.sigma2);
        CHECK(m_closed <= m_searched * (1.0 + 1e-6));
    }
}

TEST_CASE("eta_opt beats a log grid around itself") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const Instance inst = random_instance(rng);
        const double closed = eta_opt(inst.p, inst.g, inst.sigma2);
        const double m_closed = mse_slot(inst.p, inst.g, closed, inst.sigma2);
        for (int j = 0; j < 1000; ++j) {
            const double eta = closed * std::pow(10.0, -12.0 + 24.0 * j / 999.0);
            CHECK(m_closed <= mse_slot(inst.p, inst.g, eta, inst.sigma2) * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("scaling invariance: (p g, sigma2) -> c (p g, sigma2)") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        Instance inst = random_instance(rng);
        const double c = log_uniform(rng, 1e-6, 1e6);
        const double eta1 = eta_opt(inst.p, inst.g, inst.sigma2);
        const double m1 = mse_slot(inst.p, inst.g, eta1, inst.sigma2);
        Instance scaled = inst;
        for (double& x : scaled.p) x *= c;
        scaled.sigma2 *= c;
        const double eta2 = eta_opt(scaled.p, scaled.g, scaled.sigma2);
        const double m2 = mse_slot(scaled.p, scaled.g, eta2, scaled.sigma2);
        CHECK(eta2 == doctest::Approx(c * eta1).epsilon(1e-10));
        CHECK(m2 == doctest::Approx(m1).epsilon(1e-10));
    }
}

TEST_CASE("monte-carlo matches the analytic slot MSE") {
    SUBCASE("perfect alignment, zero noise: exactly zero") {
        const double p[] = {2.0, 8.0};
        const double g[] = {2.0, 0.5};  // p*g = 4 = eta
        const McEstimate est = mc_mse(p, g, 4.0, 0.0, 2000, 3);
        CHECK(est.estimate == 0.0);
        CHECK(est.std_error == 0.0);
    }
    SUBCASE("K=1 hand value within 3 standard errors") {
        const double p[] = {1.0};
        const double g[] = {1.0};
        const McEstimate est = mc_mse(p, g, 4.0, 1.0, 200000, 17);
        REQUIRE(est.std_error > 0.0);
        CHECK(std::abs(est.estimate - 0.5) <= 3.0 * est.std_error);
    }
    SUBCASE("random instances, both phase models") {
        std::mt19937_64 rng(123);
        int fails = 0;
        for (int t = 0; t < 20; ++t) {
            const Instance inst = random_instance(rng, 6);
            const double eta = eta_opt(inst.p, inst.g, inst.sigma2) * log_uniform(rng, 0.5, 2.0);
            const double analytic = mse_slot(inst.p, inst.g, eta, inst.sigma2);
            const PhaseModel phases = t % 2 == 0 ? PhaseModel::explicit_random : PhaseModel::conjugate_cancelled;
            const McEstimate est = mc_mse(inst.p, inst.g, eta, inst.sigma2, 100000, 1000 + t, phases);
            if (std::abs(est.estimate - analytic) > 3.0 * est.std_error) ++fails;
        }
        CHECK(fails <= 1);
    }
    SUBCASE("all-silent sentinel gives 1/K") {
        const double p[] = {0.0, 0.0, 0.0};
        const double g[] = {1.0, 1.0, 1.0};
        const McEstimate est = mc_mse(p, g, kInf, 1e-2, 100000, 5);
        CHECK(std::abs(est.estimate - 1.0 / 3.0) <= 3.0 * est.std_error);
    }
    SUBCASE("preconditions") {
        const double p[] = {1.0};
        const double g[] = {1.0};
        CHECK_THROWS_AS(mc_mse(p, g, 1.0, 1.0, 999, 1), std::invalid_argument);
        CHECK_THROWS_AS(mc_mse(p, g, 0.0, 1.0, 2000, 1), std::invalid_argument);
    }
}

TEST_CASE("monte-carlo estimate is independent of seed only through noise") {
    // same seed -> identical; different seed -> close but not identical
    const double p[] = {1.0, 2.0};
    const double g[] = {0.5, 0.25};
    const McEstimate a = mc_mse(p, g, 1.0, 0.1, 50000, 7);
    const McEstimate b = mc_mse(p, g, 1.0, 0.1, 50000, 7);
    const McEstimate c = mc_mse(p, g, 1.0, 0.1, 50000, 8);
    CHECK(a.estimate == b.estimate);
    CHECK(a.estimate != c.estimate);
    CHECK(std::abs(a.estimate - c.estimate) <= 6.0 * (a.std_error + c.std_error));
}
