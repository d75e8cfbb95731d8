// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one criterion per function, one pass/fail line each,
// every tolerance pinned in code. Exit status is the number of failures.

#include "vdfap/capacity.hpp"
#include "vdfap/distribution.hpp"
#include "vdfap/estimators.hpp"
#include "vdfap/quadrature.hpp"
#include "vdfap/sampling.hpp"
#include "vdfap/simulate.hpp"
#include "vdfap/specfun.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

using namespace vdfap;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& label)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + label;
        }
    }
};

// --- 1. CF closed form: Fourier quadrature (d=1) and empirical CF (d=2) ----
Outcome criterion_cf_closed_form()
{
    Outcome out;
    const VdfapParams p1(1, -1.0, 1.0);
    double worst_quad = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double w = 0.25 + 0.25 * i;
        auto r = quadrature::integrate_half_line(
            [&p1, w](double x) { return vdfap_pdf_radial(p1, x) * std::cos(w * x); }, 0.0,
            1e-10, 1e-9, 8000);
        worst_quad = std::max(worst_quad, std::fabs(2.0 * r.value - vdfap_cf_radial(p1, w)));
    }
    out.require(worst_quad <= 1e-6, "d=1 Fourier quadrature max err "
                                        + std::to_string(worst_quad));

    const VdfapParams p2(2, -1.0, 1.0);
    const std::int64_t n = 1000000;
    const SampleBatch b = sample_exact(p2, 2024, n);
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    double worst_emp = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double angle = 0.31 * i;
        const double mag = 0.2 + 0.18 * i;
        const std::array<double, 2> w{mag * std::cos(angle), mag * std::sin(angle)};
        const auto est = empirical_cf(b, std::span<const double>(w));
        worst_emp = std::max(worst_emp,
                             std::fabs(est.real() - vdfap_cf(p2, std::span<const double>(w))));
    }
    out.require(worst_emp <= tol, "d=2 empirical CF max err " + std::to_string(worst_emp));
    out.detail = out.pass ? "quad err " + std::to_string(worst_quad) + ", empirical err "
                                + std::to_string(worst_emp) + " (tol " + std::to_string(tol)
                                + ")"
                          : out.detail;
    return out;
}

// --- 2. Moments: Hessian identity exact; sample covariance within 4 SE -----
Outcome criterion_moments()
{
    Outcome out;
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> log_u(std::log(0.2), std::log(5.0));
    std::uniform_real_distribution<double> log_l(std::log(0.3), std::log(4.0));
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = rep % 2 + 1;
        const VdfapParams p(dim, -std::exp(log_u(gen)), std::exp(log_l(gen)));
        const std::array<double, 2> zero{0.0, 0.0};
        const auto view = std::span<const double>(zero.data(), static_cast<std::size_t>(dim));
        const Mat h = cf_hessian(p, view);
        const Mat cov = covariance(p);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                out.require(-h(i, j) == cov(i, j), "hessian/covariance mismatch");
    }

    const VdfapParams p(2, -1.0, 1.0);
    const std::int64_t n = 1000000;
    const SampleBatch b = sample_exact(p, 1001, n);
    const double want = p.lambda / p.drift_mag();
    double worst_z = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int c = a; c < 2; ++c) {
            double m = 0, q = 0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double prod = b.at(i, a) * b.at(i, c);
                m += prod;
                q += prod * prod;
            }
            m /= static_cast<double>(n);
            q /= static_cast<double>(n);
            const double se = std::sqrt((q - m * m) / static_cast<double>(n));
            const double target = a == c ? want : 0.0;
            worst_z = std::max(worst_z, std::fabs(m - target) / se);
        }
    }
    out.require(worst_z <= 4.0, "sample covariance z " + std::to_string(worst_z));
    if (out.pass)
        out.detail = "identity exact on 20 params; max |z| = " + std::to_string(worst_z);
    return out;
}

// --- 3. Weak stability: grid convolution in both dimensions ----------------
Outcome criterion_weak_stability()
{
    Outcome out;
    const std::array<std::pair<double, double>, 3> pairs{{{1.0, 2.0}, {0.5, 0.5}, {2.0, 3.0}}};
    double worst1 = 0.0, worst2 = 0.0;
    for (const auto& [l1, l2] : pairs) {
        const double e2 = grid_convolution_check(VdfapParams(2, -1.0, l1),
                                                 VdfapParams(2, -1.0, l2), 12.0, 512);
        const double e1 = grid_convolution_check(VdfapParams(1, -1.0, l1),
                                                 VdfapParams(1, -1.0, l2), 12.0, 4096);
        worst2 = std::max(worst2, e2);
        worst1 = std::max(worst1, e1);
    }
    out.require(worst2 <= 1e-3, "d=2 L1 " + std::to_string(worst2));
    out.require(worst1 <= 1e-4, "d=1 L1 " + std::to_string(worst1));
    if (out.pass)
        out.detail = "L1 max: d=2 " + std::to_string(worst2) + ", d=1 " + std::to_string(worst1);
    return out;
}

// --- 4. Entropy: radial quadrature vs closed form; k-NN recovery -----------
Outcome criterion_entropy()
{
    Outcome out;
    const VdfapParams cases[] = {VdfapParams(2, -0.1, 1.0), VdfapParams(2, -1.0, 1.0),
                                 VdfapParams(2, -10.0, 1.0)};
    double worst_rel = 0.0;
    for (const auto& p : cases) {
        auto integ = quadrature::integrate_half_line(
            [&p](double r) {
                const double lf = vdfap_log_pdf_radial(p, r);
                return lf < -700.0 ? 0.0 : r * std::exp(lf) * lf;
            },
            0.0, 1e-13, 1e-9, 8000);
        const double h_quad = -2.0 * kPi * integ.value;
        const double h_exact = differential_entropy(p);
        worst_rel = std::max(worst_rel, std::fabs(h_quad - h_exact) / std::fabs(h_exact));
    }
    out.require(worst_rel <= 1e-6, "quadrature rel err " + std::to_string(worst_rel));

    const VdfapParams p(2, -1.0, 1.0);
    const SampleBatch b = sample_exact(p, 2718, 1000000);
    const EntropyEstimate est = knn_entropy(b, 4);
    const double knn_err = std::fabs(est.value - differential_entropy(p));
    out.require(knn_err <= 0.02, "k-NN err " + std::to_string(knn_err));
    if (out.pass)
        out.detail = "quad rel err " + std::to_string(worst_rel) + ", k-NN err "
            + std::to_string(knn_err);
    return out;
}

// --- 5. Ancillary-function properties ---------------------------------------
Outcome criterion_ancillary_properties()
{
    Outcome out;
    const int pts = 10000;
    double prev_h0 = -1e300, max_g = -1e300, min_slack = 1e300;
    for (int i = 0; i <= pts; ++i) {
        const double s = std::pow(10.0, -4.0 + 8.0 * i / pts);
        const double h = capacity::h0(s);
        if (i > 0)
            out.require(h > prev_h0, "h0 not increasing at s=" + std::to_string(s));
        prev_h0 = h;
        max_g = std::max(max_g, capacity::g(s));
        const double val = -s * specfun::expint_ei_scaled(s);
        min_slack = std::min(min_slack, val - s / (s + 1.0));
        min_slack = std::min(min_slack, (s + 1.0) / (s + 2.0) - val);
    }
    out.require(max_g < 2.0, "g reached " + std::to_string(max_g));
    out.require(min_slack > 1e-12, "Ei inequality slack " + std::to_string(min_slack));

    double worst_fd = 0.0;
    for (double s : {0.5, 1.0, 5.0, 20.0}) {
        const double h = s * 1e-6;
        const double fd_g = (capacity::g(s + h) - capacity::g(s - h)) / (2.0 * h);
        const double fd_h0 = (capacity::h0(s + h) - capacity::h0(s - h)) / (2.0 * h);
        worst_fd = std::max(worst_fd, std::fabs(fd_g - capacity::g_prime(s))
                                          / std::max(1.0, std::fabs(capacity::g_prime(s))));
        worst_fd = std::max(worst_fd, std::fabs(fd_h0 - capacity::h0_prime(s))
                                          / std::max(1.0, std::fabs(capacity::h0_prime(s))));
    }
    out.require(worst_fd <= 1e-6, "derivative FD err " + std::to_string(worst_fd));
    if (out.pass)
        out.detail = "max g = " + std::to_string(max_g) + ", min Ei slack = "
            + std::to_string(min_slack) + ", FD err " + std::to_string(worst_fd);
    return out;
}

// --- 6. Bound sandwich, positivity, and the frozen reference point ---------
Outcome criterion_bound_sandwich()
{
    Outcome out;
    std::vector<double> us, ls;
    for (int i = 0; i < 20; ++i) {
        us.push_back(-std::pow(10.0, -1.0 + 2.0 * i / 19.0));
        ls.push_back(std::pow(10.0, -1.0 + 2.0 * i / 19.0));
    }
    double min_lower = 1e300, min_gap = 1e300;
    for (double smin : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const capacity::CovarianceConstraint c(smin, 0, 0, smin);
        for (const auto& r : capacity::bounds_sweep(us, ls, c)) {
            min_lower = std::min(min_lower, r.lower);
            min_gap = std::min(min_gap, r.upper - r.lower);
        }
    }
    out.require(min_lower > 0.0, "lower bound not positive");
    out.require(min_gap >= -1e-12, "sandwich violated by " + std::to_string(-min_gap));

    const capacity::CovarianceConstraint eye(1, 0, 0, 1);
    const double lo = capacity::capacity_lower_bound(-1.0, 1.0, eye);
    const double hi = capacity::capacity_upper_bound(-1.0, 1.0, eye);
    out.require(std::fabs(lo - 0.76473850227438735938) <= 1e-5,
                "lower at reference point " + std::to_string(lo));
    out.require(std::fabs(hi - 0.81400783120125025716) <= 1e-5,
                "upper at reference point " + std::to_string(hi));
    if (out.pass)
        out.detail = "min lower " + std::to_string(min_lower) + ", min gap "
            + std::to_string(min_gap) + ", reference point ok";
    return out;
}

// --- 7. Constructive lower bound via mutual information --------------------
Outcome criterion_constructive_mi()
{
    Outcome out;
    const EntropyEstimate est = estimate_mi_vdfap_input(-1.0, 1.0, 1.0, 1000000, 4, 42);
    const double want = capacity::h0(2.0) - capacity::h0(1.0);
    const double err = std::fabs(est.value - want);
    out.require(err <= 0.02, "MI err " + std::to_string(err));
    if (out.pass)
        out.detail = "estimate " + std::to_string(est.value) + " vs " + std::to_string(want)
            + " (err " + std::to_string(err) + ")";
    return out;
}

// --- 8. Physics ground truth: KS consistency and dt convergence ------------
Outcome criterion_physics()
{
    Outcome out;
    const std::int64_t n = 100000;
    SimulationConfig cfg;
    cfg.dim = 1;
    cfg.v_vertical = -1.0;
    cfg.sigma = 1.0;
    cfg.lambda = 1.0;
    cfg.dt = 1e-4;
    cfg.seed = 5;
    const SampleBatch em = simulate_first_arrival(cfg, n);
    const SampleBatch exact = sample_exact(cfg.params(), 6, n);
    const KsResult ks = two_sample_ks(row_norms(em), row_norms(exact), 0.01);
    out.require(ks.pass, "KS " + std::to_string(ks.statistic) + " > threshold "
                             + std::to_string(ks.threshold));

    const SampleBatch ref = sample_exact(VdfapParams(1, -1.0, 1.0), 900001, 1000000);
    const auto ref_norms = row_norms(ref);
    std::vector<double> stats;
    for (double dt : {1e-2, 2.5e-3, 6.25e-4}) {
        SimulationConfig study = cfg;
        study.dt = dt;
        study.seed = 17;
        const SampleBatch run = simulate_first_arrival(study, 200000);
        stats.push_back(two_sample_ks(row_norms(run), ref_norms, 0.01).statistic);
    }
    out.require(stats[1] < stats[0] && stats[2] < stats[1],
                "KS not decreasing: " + std::to_string(stats[0]) + ", "
                    + std::to_string(stats[1]) + ", " + std::to_string(stats[2]));
    if (out.pass)
        out.detail = "KS " + std::to_string(ks.statistic) + " (thr "
            + std::to_string(ks.threshold) + "); refinement " + std::to_string(stats[0]) + " > "
            + std::to_string(stats[1]) + " > " + std::to_string(stats[2]);
    return out;
}

// --- 9. Cauchy limit of the CF ----------------------------------------------
Outcome criterion_cauchy_limit()
{
    Outcome out;
    const VdfapParams p(2, -1e-8, 1.0);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double w = 0.1 * std::pow(100.0, i / 100.0); // [0.1, 10] log-spaced
        worst = std::max(worst, std::fabs(vdfap_cf_radial(p, w) - std::exp(-p.lambda * w)));
    }
    out.require(worst <= 1e-6, "max dev " + std::to_string(worst));
    if (out.pass)
        out.detail = "max deviation " + std::to_string(worst);
    return out;
}

// --- 10. Scale invariance of the bounds -------------------------------------
Outcome criterion_scale_invariance()
{
    Outcome out;
    const double u = -1.3, lambda = 0.8;
    const capacity::CovarianceConstraint base(1.2, 0.2, 0.2, 0.9);
    const double lo = capacity::capacity_lower_bound(u, lambda, base);
    const double hi = capacity::capacity_upper_bound(u, lambda, base);
    double worst = 0.0;
    for (double k : {0.1, 3.0, 10.0}) {
        const capacity::CovarianceConstraint scaled(k * k * 1.2, k * k * 0.2, k * k * 0.2,
                                                    k * k * 0.9);
        worst = std::max(worst,
                         std::fabs(capacity::capacity_lower_bound(u / k, k * lambda, scaled) - lo));
        worst = std::max(worst,
                         std::fabs(capacity::capacity_upper_bound(u / k, k * lambda, scaled) - hi));
    }
    out.require(worst <= 1e-12, "max drift " + std::to_string(worst));
    if (out.pass)
        out.detail = "max drift " + std::to_string(worst);
    return out;
}

} // namespace

int main()
{
    struct Entry {
        const char* name;
        Outcome (*fn)();
        double budget_seconds;
    };
    const Entry entries[] = {
        {"CF closed form (quadrature d=1, empirical d=2)", criterion_cf_closed_form, 30.0},
        {"moments (Hessian identity, sample covariance)", criterion_moments, 20.0},
        {"weak stability under convolution", criterion_weak_stability, 60.0},
        {"entropy closed form (quadrature + k-NN)", criterion_entropy, 60.0},
        {"ancillary function properties", criterion_ancillary_properties, 5.0},
        {"bound sandwich and positivity", criterion_bound_sandwich, 5.0},
        {"constructive lower bound (mutual information)", criterion_constructive_mi, 120.0},
        {"physics ground truth (Euler-Maruyama)", criterion_physics, 180.0},
        {"Cauchy limit", criterion_cauchy_limit, 1.0},
        {"scale invariance of bounds", criterion_scale_invariance, 1.0},
    };

    int failures = 0;
    int index = 0;
    for (const auto& e : entries) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed > e.budget_seconds) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("over runtime budget");
        }
        std::printf("[%s] criterion %2d: %s (%.1fs of %.0fs) %s\n",
                    out.pass ? "PASS" : "FAIL", index, e.name, elapsed, e.budget_seconds,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass)
            ++failures;
    }
    std::printf("%d/10 acceptance criteria passed\n", 10 - failures);
    return failures;
}
