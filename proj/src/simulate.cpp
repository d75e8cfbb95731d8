// SPDX-License-Identifier: Apache-2.0

#include "vdfap/simulate.hpp"

#include "vdfap/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace vdfap {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log Phi(-x) for x >= 0, asymptotic branch for large x where erfc underflows.
double log_normal_sf(double x)
{
    if (x < 30.0)
        return std::log(0.5 * std::erfc(x / std::sqrt(2.0)));
    // Phi(-x) = phi(x)/x (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
    const double inv2 = 1.0 / (x * x);
    const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2));
    return -0.5 * x * x - kLogSqrt2Pi - std::log(x) + std::log(series);
}

double log_normal_cdf(double x)
{
    return log_normal_sf(-x);
}

std::int64_t auto_max_steps(const SimulationConfig& cfg)
{
    const double mean = cfg.lambda / std::fabs(cfg.v_vertical);
    const double shape = cfg.lambda * cfg.lambda / (cfg.sigma * cfg.sigma);
    // Double the horizon until the arrival-time tail mass drops below 1e-6.
    double t = 8.0 * mean;
    while (inverse_gaussian_log_survival(t, mean, shape) > std::log(1e-6))
        t *= 2.0;
    return static_cast<std::int64_t>(std::ceil(t / cfg.dt));
}

struct ChunkResult {
    std::vector<double> positions;
    std::int64_t discarded = 0;
};

ChunkResult simulate_chunk(const SimulationConfig& cfg, std::int64_t n,
                           std::uint64_t chunk_index, std::int64_t max_steps)
{
    rng::Stream stream = rng::Stream::for_chunk(cfg.seed, chunk_index);
    const double root_dt = cfg.sigma * std::sqrt(cfg.dt);
    const double drift_step = cfg.v_vertical * cfg.dt;
    const double bridge_var = cfg.sigma * cfg.sigma * cfg.dt;

    ChunkResult result;
    result.positions.reserve(static_cast<std::size_t>(n) * cfg.dim);
    for (std::int64_t i = 0; i < n; ++i) {
        double par[2] = {0.0, 0.0};
        double height = cfg.lambda;
        bool arrived = false;
        for (std::int64_t step = 0; step < max_steps && !arrived; ++step) {
            double next_par[2];
            for (int j = 0; j < cfg.dim; ++j)
                next_par[j] = par[j] + root_dt * stream.normal();
            const double next_height = height + drift_step + root_dt * stream.normal();

            if (next_height <= 0.0) {
                // Linear interpolation to the crossing instant.
                const double theta = height / (height - next_height);
                for (int j = 0; j < cfg.dim; ++j) {
                    double hit = par[j] + theta * (next_par[j] - par[j]);
                    if (cfg.bridge_correction)
                        hit += std::sqrt(theta * (1.0 - theta) * bridge_var) * stream.normal();
                    result.positions.push_back(hit);
                }
                arrived = true;
            } else if (cfg.bridge_correction) {
                // The bridge between two positive endpoints still dips below
                // zero with probability exp(-2 h0 h1 / (sigma^2 dt)).
                const double p_cross = std::exp(-2.0 * height * next_height / bridge_var);
                if (stream.uniform() < p_cross) {
                    const double theta = 0.5;
                    for (int j = 0; j < cfg.dim; ++j) {
                        const double mid = par[j] + theta * (next_par[j] - par[j]);
                        const double noise =
                            std::sqrt(theta * (1.0 - theta) * bridge_var) * stream.normal();
                        result.positions.push_back(mid + noise);
                    }
                    arrived = true;
                }
            }
            if (!arrived) {
                par[0] = next_par[0];
                par[1] = next_par[1];
                height = next_height;
            }
        }
        if (!arrived)
            ++result.discarded;
    }
    return result;
}

} // namespace

double inverse_gaussian_log_survival(double t, double mean, double shape)
{
    if (!(t > 0.0))
        return 0.0;
    const double a = std::sqrt(shape / t);
    // S(t) = Phi(-a(t/mu - 1)) - e^{2 shape/mu} Phi(-a(t/mu + 1)), combined in
    // log space because the exponential factor overflows for large shape/mu.
    const double log_term1 = log_normal_cdf(-a * (t / mean - 1.0));
    const double log_term2 = 2.0 * shape / mean + log_normal_cdf(-a * (t / mean + 1.0));
    // term1 > term2 always; log(term1 - term2) via log1p.
    const double diff = log_term2 - log_term1;
    return log_term1 + std::log1p(-std::exp(diff));
}

void validate(const SimulationConfig& cfg)
{
    if (cfg.dim != 1 && cfg.dim != 2)
        throw std::invalid_argument("simulation: dimension must be 1 or 2");
    if (!std::isfinite(cfg.v_vertical) || !(cfg.v_vertical < 0.0))
        throw std::invalid_argument("simulation: vertical drift must be finite and negative");
    if (!std::isfinite(cfg.sigma) || !(cfg.sigma > 0.0))
        throw std::invalid_argument("simulation: sigma must be finite and positive");
    if (!std::isfinite(cfg.lambda) || !(cfg.lambda > 0.0))
        throw std::invalid_argument("simulation: lambda must be finite and positive");
    if (!std::isfinite(cfg.dt) || !(cfg.dt > 0.0))
        throw std::invalid_argument("simulation: dt must be finite and positive");
    // 1% of the mean passage time; coarse enough to admit convergence
    // studies over dt in {1e-2, 2.5e-3, 6.25e-4} lambda/|v|.
    const double dt_cap = 1e-2 * cfg.lambda / std::fabs(cfg.v_vertical) * (1.0 + 1e-12);
    if (cfg.dt > dt_cap)
        throw std::invalid_argument("simulation: dt too coarse; require dt <= 1e-2 lambda/|v|");
    if (cfg.max_steps > 0) {
        const double mean = cfg.lambda / std::fabs(cfg.v_vertical);
        const double shape = cfg.lambda * cfg.lambda / (cfg.sigma * cfg.sigma);
        const double horizon = static_cast<double>(cfg.max_steps) * cfg.dt;
        if (inverse_gaussian_log_survival(horizon, mean, shape) > std::log(0.01))
            throw std::invalid_argument(
                "simulation: expected discard fraction beyond max_steps exceeds 1%");
    }
}

SampleBatch simulate_first_arrival(const SimulationConfig& cfg, std::int64_t count)
{
    validate(cfg);
    if (count < 1)
        throw std::invalid_argument("simulation: count must be >= 1");
    const std::int64_t max_steps = cfg.max_steps > 0 ? cfg.max_steps : auto_max_steps(cfg);

    const std::int64_t chunks = (count + rng::kChunkSize - 1) / rng::kChunkSize;
    std::vector<ChunkResult> results(static_cast<std::size_t>(chunks));
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(chunks));
    auto run_range = [&](unsigned w) {
        for (std::int64_t c = w; c < chunks; c += workers) {
            const std::int64_t n =
                std::min(count, (c + 1) * rng::kChunkSize) - c * rng::kChunkSize;
            results[static_cast<std::size_t>(c)] =
                simulate_chunk(cfg, n, static_cast<std::uint64_t>(c), max_steps);
        }
    };
    if (workers <= 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run_range, w);
        for (auto& t : pool)
            t.join();
    }

    SampleBatch batch;
    batch.dim = cfg.dim;
    batch.seed = cfg.seed;
    batch.method = SampleMethod::EulerMaruyama;
    batch.u = cfg.normalized_drift();
    batch.lambda = cfg.lambda;
    for (const auto& r : results) {
        batch.discarded += r.discarded;
        batch.positions.insert(batch.positions.end(), r.positions.begin(), r.positions.end());
    }
    batch.count = static_cast<std::int64_t>(batch.positions.size()) / cfg.dim;
    return batch;
}

} // namespace vdfap
