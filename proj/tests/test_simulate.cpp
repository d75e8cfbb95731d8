// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vdfap/distribution.hpp"
#include "vdfap/estimators.hpp"
#include "vdfap/sampling.hpp"
#include "vdfap/simulate.hpp"

#include <array>
#include <cmath>

using namespace vdfap;

TEST_CASE("configuration validation")
{
    SimulationConfig cfg;
    cfg.dim = 1;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 1;
    CHECK_NOTHROW(validate(cfg));

    SimulationConfig bad = cfg;
    bad.dt = 5e-2; // coarser than 1e-2 * lambda/|v|
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.v_vertical = 1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = cfg;
    bad.dim = 3;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    // horizon so short that >1% of arrival times would be discarded
    bad = cfg;
    bad.max_steps = 2000; // 2 time units; IG(1,1) tail there is ~11%
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    CHECK(cfg.normalized_drift() == -1.0);
    CHECK(cfg.params() == VdfapParams(1, -1.0, 1.0));
}

TEST_CASE("inverse Gaussian log-survival reference values")
{
    // IG(mean 1, shape 1): S(30), S(50) from a high-precision evaluation.
    CHECK(std::exp(inverse_gaussian_log_survival(30.0, 1.0, 1.0))
          == doctest::Approx(3.6313658725812105e-9).epsilon(1e-8));
    CHECK(std::exp(inverse_gaussian_log_survival(50.0, 1.0, 1.0))
          == doctest::Approx(7.9760972755115806e-14).epsilon(1e-8));
    // overflow-prone regime: shape/mean large
    const double ls = inverse_gaussian_log_survival(400.0, 1.0, 400.0);
    CHECK(std::isfinite(ls));
    CHECK(ls < 0.0);
}

TEST_CASE("arrivals match the model covariance")
{
    SimulationConfig cfg;
    cfg.dim = 2;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 2.5e-4;
    cfg.seed = 11;
    const std::int64_t n = 100000;
    const SampleBatch b = simulate_first_arrival(cfg, n);
    CHECK(b.method == SampleMethod::EulerMaruyama);
    CHECK(b.count + b.discarded == n);
    CHECK(b.discarded < n / 1000);

    const double want = cfg.lambda / std::fabs(cfg.normalized_drift());
    for (int j = 0; j < 2; ++j) {
        double second = 0.0, fourth = 0.0;
        for (std::int64_t i = 0; i < b.count; ++i) {
            const double x = b.at(i, j);
            second += x * x;
            fourth += x * x * x * x;
        }
        second /= static_cast<double>(b.count);
        fourth /= static_cast<double>(b.count);
        const double se = std::sqrt((fourth - second * second) / static_cast<double>(b.count));
        CHECK(std::fabs(second - want) < 5.0 * se);
    }
}

TEST_CASE("arrivals are KS-consistent with the exact sampler (d=1)")
{
    SimulationConfig cfg;
    cfg.dim = 1;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 1e-4;
    cfg.seed = 5;
    const std::int64_t n = 30000;
    const SampleBatch em = simulate_first_arrival(cfg, n);
    const SampleBatch exact = sample_exact(cfg.params(), 6, n);
    const KsResult ks = two_sample_ks(row_norms(em), row_norms(exact), 0.01);
    CHECK(ks.pass);
}

TEST_CASE("KS statistic decreases under dt refinement")
{
    // The discretization bias (~ sqrt(dt)) must dominate the sampling noise,
    // hence the large reference batch and the coarse-to-fine grid.
    const SampleBatch exact = sample_exact(VdfapParams(1, -1.0, 1.0), 900001, 500000);
    const auto exact_norms = row_norms(exact);
    double prev = 1.0;
    for (double dt : {1e-2, 2.5e-3, 6.25e-4}) {
        SimulationConfig cfg;
        cfg.dim = 1;
        cfg.v_vertical = -1.0;
        cfg.sigma = 1.0;
        cfg.lambda = 1.0;
        cfg.dt = dt;
        cfg.seed = 42;
        const SampleBatch em = simulate_first_arrival(cfg, 200000);
        const KsResult ks = two_sample_ks(row_norms(em), exact_norms, 0.01);
        CHECK(ks.statistic < prev);
        prev = ks.statistic;
    }
}

TEST_CASE("empirical CF converges to the closed form under dt refinement")
{
    const std::int64_t n = 100000;
    const VdfapParams p(1, -1.0, 1.0);
    double errs[2];
    int slot = 0;
    for (double dt : {4e-3, 1e-3}) {
        SimulationConfig cfg;
        cfg.dim = 1;
        cfg.v_vertical = -1.0;
        cfg.sigma = 1.0;
        cfg.lambda = 1.0;
        cfg.dt = dt;
        cfg.seed = 3;
        const SampleBatch em = simulate_first_arrival(cfg, n);
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const std::array<double, 1> w{0.4 * i};
            const auto est = empirical_cf(em, std::span<const double>(w));
            worst = std::max(worst,
                             std::fabs(est.real() - vdfap_cf(p, std::span<const double>(w))));
        }
        errs[slot++] = worst;
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[1] <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("bridge correction tightens the coarse-step distribution")
{
    const std::int64_t n = 60000;
    const SampleBatch exact = sample_exact(VdfapParams(1, -1.0, 1.0), 321, n);
    const auto exact_norms = row_norms(exact);

    SimulationConfig cfg;
    cfg.dim = 1;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 18;
    const KsResult plain = two_sample_ks(row_norms(simulate_first_arrival(cfg, n)),
                                         exact_norms, 0.01);
    cfg.bridge_correction = true;
    const KsResult bridged = two_sample_ks(row_norms(simulate_first_arrival(cfg, n)),
                                           exact_norms, 0.01);
    CHECK(bridged.statistic < plain.statistic);
    CHECK(bridged.pass);
}

TEST_CASE("discarded particles are counted, never emitted")
{
    SimulationConfig cfg;
    cfg.dim = 1;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 1e-3;
    cfg.max_steps = 6000; // IG(1,1) tail beyond t=6 is ~0.5%
    cfg.seed = 9;
    const std::int64_t n = 20000;
    const SampleBatch b = simulate_first_arrival(cfg, n);
    CHECK(b.count + b.discarded == n);
    CHECK(b.discarded > 20);
    CHECK(b.discarded < 300);
    CHECK(static_cast<std::int64_t>(b.positions.size()) == b.count * b.dim);
}

TEST_CASE("simulation is reproducible")
{
    SimulationConfig cfg;
    cfg.dim = 2;
    cfg.v_vertical = -2.0;
    cfg.sigma = 1.0;
    cfg.lambda = 0.5;
    cfg.dt = 2e-4;
    cfg.seed = 77;
    const SampleBatch a = simulate_first_arrival(cfg, 5000);
    const SampleBatch b = simulate_first_arrival(cfg, 5000);
    CHECK(a.positions == b.positions);
    CHECK(a.discarded == b.discarded);
}
