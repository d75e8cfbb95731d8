// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: evaluation (pdf, cf, moments, entropy), exact and
// Euler-Maruyama sampling, capacity bound sweeps, the constructive mutual
// information estimate, and the validation suite. Outputs are pure functions
// of the manifest (command + parameters + declared seeds); repeated runs are
// byte-identical.

#include "vdfap/capacity.hpp"
#include "vdfap/distribution.hpp"
#include "vdfap/estimators.hpp"
#include "vdfap/quadrature.hpp"
#include "vdfap/rng.hpp"
#include "vdfap/sampling.hpp"
#include "vdfap/simulate.hpp"
#include "vdfap/specfun.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

const std::vector<std::string> kCommands = {"pdf",    "cf",    "moments", "entropy", "sample",
                                            "bounds", "sweep", "validate", "mi"};

struct RunManifest {
    std::string command;
    ordered_json params = ordered_json::object();
    std::string output_path;  // empty: stdout only
    std::string format = "csv";
    std::string units = "nats";
};

ordered_json to_json(const RunManifest& m)
{
    ordered_json j;
    j["command"] = m.command;
    j["params"] = m.params;
    j["output_path"] = m.output_path;
    j["format"] = m.format;
    j["units"] = m.units;
    return j;
}

RunManifest manifest_from_json(const ordered_json& j)
{
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.params = j.at("params");
    m.output_path = j.at("output_path").get<std::string>();
    m.format = j.at("format").get<std::string>();
    m.units = j.at("units").get<std::string>();
    return m;
}

void check_manifest(const RunManifest& m)
{
    if (std::find(kCommands.begin(), kCommands.end(), m.command) == kCommands.end())
        throw std::invalid_argument("unknown command: " + m.command);
    if (m.format != "csv" && m.format != "json")
        throw std::invalid_argument("format must be csv or json");
    if (m.units != "nats" && m.units != "bits")
        throw std::invalid_argument("units must be nats or bits");
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double unit_scale(const std::string& units)
{
    return units == "bits" ? std::log(2.0) : 1.0;
}

std::vector<double> parse_csv_doubles(const std::string& text, std::size_t want_min,
                                      std::size_t want_max, const char* what)
{
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse '" + cell + "'");
        }
        if (used != cell.size() || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": cannot parse '" + cell + "'");
        out.push_back(v);
    }
    if (out.size() < want_min || out.size() > want_max)
        throw std::invalid_argument(std::string(what) + ": expected "
                                    + std::to_string(want_min) + ".." + std::to_string(want_max)
                                    + " comma-separated values");
    return out;
}

// Grid spec lo:hi:steps[:log]
std::vector<double> parse_grid(const std::string& text, const char* what)
{
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ':'))
        parts.push_back(piece);
    if (parts.size() != 3 && parts.size() != 4)
        throw std::invalid_argument(std::string(what) + ": expected lo:hi:steps[:log]");
    const bool log_spaced = parts.size() == 4;
    if (log_spaced && parts[3] != "log")
        throw std::invalid_argument(std::string(what) + ": trailing token must be 'log'");
    double lo = 0, hi = 0;
    long steps = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        steps = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": malformed grid bounds");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || steps < 1 || steps > 1000000)
        throw std::invalid_argument(std::string(what) + ": malformed grid");
    if (steps == 1)
        return {lo};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    if (log_spaced) {
        if (lo == 0.0 || hi == 0.0 || (lo < 0) != (hi < 0))
            throw std::invalid_argument(std::string(what)
                                        + ": log grid endpoints must share a sign");
        const double sign = lo < 0 ? -1.0 : 1.0;
        const double la = std::log(std::fabs(lo)), lb = std::log(std::fabs(hi));
        for (long i = 0; i < steps; ++i)
            out.push_back(sign * std::exp(la + (lb - la) * i / (steps - 1)));
    } else {
        for (long i = 0; i < steps; ++i)
            out.push_back(lo + (hi - lo) * i / (steps - 1));
    }
    return out;
}

// Write-then-rename so failures never leave partial artifacts.
void atomic_write(const std::string& path, const std::string& content)
{
    const fs::path target(path);
    const fs::path tmp = target.parent_path()
        / (target.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

void emit(const RunManifest& m, const std::string& content, const std::string& summary)
{
    if (!m.output_path.empty())
        atomic_write(m.output_path, content);
    std::cout << summary << "\n";
}

vdfap::VdfapParams params_from(const ordered_json& p)
{
    return vdfap::VdfapParams(p.value("dim", 2), p.at("u").get<double>(),
                              p.at("lambda").get<double>());
}

vdfap::capacity::CovarianceConstraint sigma_from(const ordered_json& p)
{
    const auto e = p.at("sigma").get<std::vector<double>>();
    if (e.size() != 4)
        throw std::invalid_argument("sigma must have four row-major entries");
    return vdfap::capacity::CovarianceConstraint(e[0], e[1], e[2], e[3]);
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

int run_pdf(const RunManifest& m)
{
    const auto& p = m.params;
    const auto point = p.at("point").get<std::vector<double>>();
    const int dim = p.value("dim", 2);
    double value = 0.0;
    if (p.contains("u_par")) {
        const auto upar = p.at("u_par").get<std::vector<double>>();
        const vdfap::FapParams fp(dim, std::span<const double>(upar),
                                  p.at("u").get<double>(), p.at("lambda").get<double>());
        value = vdfap::fap_pdf(fp, std::span<const double>(point));
    } else {
        value = vdfap::vdfap_pdf(params_from(p), std::span<const double>(point));
    }
    ordered_json out;
    out["value"] = value;
    emit(m, m.format == "json" ? out.dump(2) + "\n" : "value\n" + fmt(value) + "\n",
         "pdf = " + fmt(value));
    return 0;
}

int run_cf(const RunManifest& m)
{
    const auto& p = m.params;
    const auto omega = p.at("omega").get<std::vector<double>>();
    const double value = vdfap::vdfap_cf(params_from(p), std::span<const double>(omega));
    ordered_json out;
    out["value"] = value;
    emit(m, m.format == "json" ? out.dump(2) + "\n" : "value\n" + fmt(value) + "\n",
         "cf = " + fmt(value));
    return 0;
}

int run_moments(const RunManifest& m)
{
    const auto p = params_from(m.params);
    const vdfap::Vec mu = vdfap::mean(p);
    const vdfap::Mat cov = vdfap::covariance(p);
    ordered_json out;
    out["mean"] = std::vector<double>(mu.v.begin(), mu.v.begin() + p.dim);
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < p.dim; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < p.dim; ++j)
            row.push_back(cov(i, j));
        rows.push_back(row);
    }
    out["covariance"] = rows;
    std::string csv = "component,mean,variance\n";
    for (int i = 0; i < p.dim; ++i)
        csv += std::to_string(i + 1) + "," + fmt(mu[i]) + "," + fmt(cov(i, i)) + "\n";
    emit(m, m.format == "json" ? out.dump(2) + "\n" : csv,
         "moments: var = " + fmt(cov(0, 0)) + " per component");
    return 0;
}

int run_entropy(const RunManifest& m)
{
    const auto p = params_from(m.params);
    const double value = vdfap::differential_entropy(p) / unit_scale(m.units);
    ordered_json out;
    out["value"] = value;
    out["units"] = m.units;
    emit(m, m.format == "json" ? out.dump(2) + "\n" : "value\n" + fmt(value) + "\n",
         "entropy = " + fmt(value) + " " + m.units);
    return 0;
}

int run_sample(const RunManifest& m)
{
    const auto& p = m.params;
    if (m.output_path.empty())
        throw std::invalid_argument("sample requires --out");
    const auto n = p.at("n").get<std::int64_t>();
    const auto seed = p.at("seed").get<std::uint64_t>();
    const std::string method = p.value("method", "exact");

    vdfap::SampleBatch batch;
    if (method == "exact") {
        batch = vdfap::sample_exact(params_from(p), seed, n);
    } else if (method == "em") {
        vdfap::SimulationConfig cfg;
        cfg.dim = p.value("dim", 2);
        cfg.sigma = p.value("diff_sigma", 1.0);
        cfg.v_vertical = p.at("u").get<double>() * cfg.sigma * cfg.sigma;
        cfg.lambda = p.at("lambda").get<double>();
        cfg.dt = p.value("dt", 1e-3 * cfg.lambda / std::fabs(cfg.v_vertical));
        cfg.max_steps = p.value("max_steps", std::int64_t{0});
        cfg.bridge_correction = p.value("bridge", false);
        cfg.seed = seed;
        batch = vdfap::simulate_first_arrival(cfg, n);
    } else {
        throw std::invalid_argument("method must be exact or em");
    }

    // Stage into a scratch directory, then move both files into place.
    const fs::path target(m.output_path);
    const fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
    const fs::path scratch = dir / (".vdfap-stage-" + std::to_string(::getpid()));
    fs::create_directories(scratch);
    const fs::path staged_csv = scratch / target.filename();
    try {
        vdfap::save_batch_csv(batch, staged_csv.string());
        fs::rename(staged_csv, target);
        fs::rename(vdfap::sidecar_path(staged_csv.string()),
                   vdfap::sidecar_path(target.string()));
        fs::remove_all(scratch);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(scratch, ec);
        throw;
    }
    std::cout << "sample: " << batch.count << " rows -> " << m.output_path
              << " (+ sidecar), method " << vdfap::to_string(batch.method);
    if (batch.discarded > 0)
        std::cout << ", discarded " << batch.discarded;
    std::cout << "\n";
    return 0;
}

int run_bounds(const RunManifest& m)
{
    const auto& p = m.params;
    const auto c = sigma_from(p);
    const double u = p.at("u").get<double>();
    const double lambda = p.at("lambda").get<double>();
    const auto rows = vdfap::capacity::bounds_sweep({u}, {lambda}, c);
    const double scale = unit_scale(m.units);
    std::string content;
    if (m.format == "json") {
        ordered_json out;
        out["u"] = u;
        out["lambda"] = lambda;
        out["sigma_min"] = c.sigma_min();
        out["lower"] = rows[0].lower / scale;
        out["upper"] = rows[0].upper / scale;
        out["units"] = m.units;
        content = out.dump(2) + "\n";
    } else {
        content = vdfap::capacity::bounds_to_csv(rows, scale);
    }
    emit(m, content,
         "bounds: lower = " + fmt(rows[0].lower / scale) + ", upper = "
             + fmt(rows[0].upper / scale) + " (" + m.units + ")");
    return 0;
}

int run_sweep(const RunManifest& m)
{
    const auto& p = m.params;
    auto u_grid = parse_grid(p.at("grid_u").get<std::string>(), "--grid-u");
    auto l_grid = parse_grid(p.at("grid_lambda").get<std::string>(), "--grid-lambda");
    for (double u : u_grid)
        if (!(u < 0.0))
            throw std::invalid_argument("--grid-u: drift values must be negative");
    for (double l : l_grid)
        if (!(l > 0.0))
            throw std::invalid_argument("--grid-lambda: values must be positive");
    // rows sorted by (u, lambda)
    std::sort(u_grid.begin(), u_grid.end());
    std::sort(l_grid.begin(), l_grid.end());
    const auto rows = vdfap::capacity::bounds_sweep(u_grid, l_grid, sigma_from(p));
    const std::string csv = vdfap::capacity::bounds_to_csv(rows, unit_scale(m.units));
    emit(m, csv, "sweep: " + std::to_string(rows.size()) + " rows ("
                     + std::to_string(u_grid.size()) + "x" + std::to_string(l_grid.size())
                     + " grid, " + m.units + ")");
    return 0;
}

int run_mi(const RunManifest& m)
{
    const auto& p = m.params;
    const auto est = vdfap::estimate_mi_vdfap_input(
        p.at("u").get<double>(), p.at("lambda").get<double>(),
        p.at("lambda_in").get<double>(), p.at("n").get<std::int64_t>(), p.value("k", 4),
        p.at("seed").get<std::uint64_t>());
    const double scale = unit_scale(m.units);
    ordered_json out;
    out["value"] = est.value / scale;
    out["std_error"] = est.std_error / scale;
    out["k"] = est.k;
    out["n"] = est.n;
    out["units"] = m.units;
    emit(m,
         m.format == "json" ? out.dump(2) + "\n"
                            : "value,std_error\n" + fmt(est.value / scale) + ","
                                  + fmt(est.std_error / scale) + "\n",
         "mi = " + fmt(est.value / scale) + " +/- " + fmt(est.std_error / scale) + " "
             + m.units);
    return 0;
}

// ---------------------------------------------------------------------------
// Validation suite
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    double statistic;
    double threshold;
    bool pass;
};

Check make_check(const std::string& name, double stat, double threshold, bool larger_fails = true)
{
    return {name, stat, threshold, larger_fails ? stat <= threshold : stat >= threshold};
}

std::vector<Check> run_validation(const std::string& suite, std::uint64_t seed)
{
    using namespace vdfap;
    std::vector<Check> checks;
    const bool full = suite == "all";
    auto sub_seed = [seed](std::uint64_t tag) { return rng::splitmix64(seed ^ tag); };

    { // special function inequality slack on a log grid
        double min_slack = 1e300;
        const int pts = 2000;
        for (int i = 0; i <= pts; ++i) {
            const double s = std::pow(10.0, -4.0 + 8.0 * i / pts);
            const double val = -s * specfun::expint_ei_scaled(s);
            min_slack = std::min(min_slack, val - s / (s + 1.0));
            min_slack = std::min(min_slack, (s + 1.0) / (s + 2.0) - val);
        }
        checks.push_back(make_check("ei_inequality_slack", min_slack, 1e-12, false));
    }
    { // h0 monotone, g < 2
        double min_step = 1e300, max_g = -1e300;
        const int pts = 2000;
        for (int i = 0; i <= pts; ++i) {
            const double s = std::pow(10.0, -4.0 + 8.0 * i / pts);
            min_step = std::min(min_step, capacity::h0(s * 1.001) - capacity::h0(s));
            max_g = std::max(max_g, capacity::g(s));
        }
        checks.push_back(make_check("h0_strictly_increasing", min_step, 0.0, false));
        checks.push_back(make_check("g_below_2", max_g, 2.0));
    }
    { // normalization of the densities
        for (int dim : {1, 2}) {
            const VdfapParams p(dim, -1.3, 0.9);
            double mass;
            if (dim == 1) {
                auto r = quadrature::integrate_half_line(
                    [&p](double x) { return vdfap_pdf_radial(p, x); }, 0.0, 1e-12, 1e-9, 8000);
                mass = 2.0 * r.value;
            } else {
                auto r = quadrature::integrate_half_line(
                    [&p](double x) { return x * vdfap_pdf_radial(p, x); }, 0.0, 1e-12, 1e-9,
                    8000);
                mass = 2.0 * 3.14159265358979323846 * r.value;
            }
            checks.push_back(make_check("pdf_normalization_d" + std::to_string(dim),
                                        std::fabs(mass - 1.0), 1e-6));
        }
    }
    { // Fourier quadrature of the d=1 pdf vs the closed-form CF
        const VdfapParams p(1, -1.0, 1.0);
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const double w = 0.5 * i;
            auto r = quadrature::integrate_half_line(
                [&p, w](double x) { return vdfap_pdf_radial(p, x) * std::cos(w * x); }, 0.0,
                1e-10, 1e-9, 8000);
            worst = std::max(worst, std::fabs(2.0 * r.value - vdfap_cf_radial(p, w)));
        }
        checks.push_back(make_check("cf_fourier_match_d1", worst, 1e-6));
    }
    { // moment identity
        const VdfapParams p(2, -2.0, 3.0);
        const std::array<double, 2> zero{0.0, 0.0};
        const Mat h = cf_hessian(p, std::span<const double>(zero));
        const Mat cov = covariance(p);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                worst = std::max(worst, std::fabs(-h(i, j) - cov(i, j)));
        checks.push_back(make_check("moment_hessian_identity", worst, 1e-15));
    }
    { // Cauchy limit of the CF
        const VdfapParams p(2, -1e-8, 1.0);
        double worst = 0.0;
        for (double w = 0.1; w <= 10.0; w *= 1.3)
            worst = std::max(worst,
                             std::fabs(vdfap_cf_radial(p, w) - std::exp(-p.lambda * w)));
        checks.push_back(make_check("cauchy_limit_cf", worst, 1e-6));
    }
    { // entropy closed form vs radial quadrature
        const VdfapParams p(2, -1.0, 1.0);
        auto integ = quadrature::integrate_half_line(
            [&p](double r) {
                const double lf = vdfap_log_pdf_radial(p, r);
                return lf < -700.0 ? 0.0 : r * std::exp(lf) * lf;
            },
            0.0, 1e-13, 1e-9, 8000);
        const double h_quad = -2.0 * 3.14159265358979323846 * integ.value;
        checks.push_back(make_check(
            "entropy_quadrature_match_d2",
            std::fabs(h_quad - differential_entropy(p)) / std::fabs(differential_entropy(p)),
            1e-6));
    }
    { // weak stability on the grid
        checks.push_back(make_check(
            "stability_L1_d1",
            grid_convolution_check(VdfapParams(1, -1, 1), VdfapParams(1, -1, 2), 12.0, 4096),
            1e-4));
        checks.push_back(make_check(
            "stability_L1_d2",
            grid_convolution_check(VdfapParams(2, -1, 1), VdfapParams(2, -1, 2), 12.0, 512),
            1e-3));
    }
    { // bound sandwich, positivity, scale invariance
        std::vector<double> us, ls;
        for (int i = 0; i < 10; ++i) {
            us.push_back(-std::pow(10.0, -1.0 + 2.0 * i / 9.0));
            ls.push_back(std::pow(10.0, -1.0 + 2.0 * i / 9.0));
        }
        double min_gap = 1e300, min_lower = 1e300;
        for (double smin : {0.5, 1.0, 2.0}) {
            const capacity::CovarianceConstraint c(smin, 0, 0, smin);
            for (const auto& r : capacity::bounds_sweep(us, ls, c)) {
                min_gap = std::min(min_gap, r.upper - r.lower);
                min_lower = std::min(min_lower, r.lower);
            }
        }
        checks.push_back(make_check("bounds_sandwich_gap", min_gap, -1e-12, false));
        checks.push_back(make_check("bounds_lower_positive", min_lower, 0.0, false));

        const capacity::CovarianceConstraint base(1.2, 0.2, 0.2, 0.9);
        const double lo = capacity::capacity_lower_bound(-1.3, 0.8, base);
        const double up = capacity::capacity_upper_bound(-1.3, 0.8, base);
        double worst = 0.0;
        for (double k : {0.1, 3.0, 10.0}) {
            const capacity::CovarianceConstraint sc(k * k * 1.2, k * k * 0.2, k * k * 0.2,
                                                    k * k * 0.9);
            worst = std::max(worst,
                             std::fabs(capacity::capacity_lower_bound(-1.3 / k, 0.8 * k, sc) - lo));
            worst = std::max(worst,
                             std::fabs(capacity::capacity_upper_bound(-1.3 / k, 0.8 * k, sc) - up));
        }
        checks.push_back(make_check("bounds_scale_invariance", worst, 1e-12));
    }
    { // exact sampler covariance
        const VdfapParams p(2, -1.0, 1.0);
        const std::int64_t n = full ? 400000 : 100000;
        const SampleBatch b = sample_exact(p, sub_seed(0xC0F1ULL), n);
        const double want = p.lambda / p.drift_mag();
        double worst = 0.0;
        for (int j = 0; j < 2; ++j) {
            double second = 0, fourth = 0;
            for (std::int64_t i = 0; i < b.count; ++i) {
                const double x = b.at(i, j);
                second += x * x;
                fourth += x * x * x * x;
            }
            second /= static_cast<double>(n);
            fourth /= static_cast<double>(n);
            const double se = std::sqrt((fourth - second * second) / static_cast<double>(n));
            worst = std::max(worst, std::fabs(second - want) / se);
        }
        checks.push_back(make_check("sample_covariance_z", worst, 4.0));
    }
    { // empirical CF against the closed form
        const VdfapParams p(2, -1.0, 1.0);
        const std::int64_t n = full ? 400000 : 100000;
        const SampleBatch b = sample_exact(p, sub_seed(0xCF00ULL), n);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const std::array<double, 2> w{0.25 + 0.3 * i, 0.1 * i};
            const auto est = empirical_cf(b, std::span<const double>(w));
            worst = std::max(worst,
                             std::fabs(est.real() - vdfap_cf(p, std::span<const double>(w))));
        }
        checks.push_back(make_check("cf_empirical_d2", worst,
                                    3.0 / std::sqrt(static_cast<double>(n))));
    }
    if (full) { // k-NN estimator calibration and the VDFAP target
        SampleBatch gauss;
        gauss.dim = 2;
        gauss.count = 50000;
        gauss.positions.resize(100000);
        rng::Stream stream(sub_seed(0x6A05ULL));
        for (auto& x : gauss.positions)
            x = stream.normal();
        const EntropyEstimate eg = knn_entropy(gauss, 4);
        checks.push_back(make_check("knn_gaussian_calibration",
                                    std::fabs(eg.value - 2.8378770664093454836),
                                    3.0 * eg.std_error));

        const VdfapParams p(2, -1.0, 1.0);
        const SampleBatch b = sample_exact(p, sub_seed(0x3AD1ULL), 200000);
        const EntropyEstimate ev = knn_entropy(b, 4);
        checks.push_back(make_check("knn_entropy_vdfap_d2",
                                    std::fabs(ev.value - differential_entropy(p)),
                                    std::max(0.02, 3.0 * ev.std_error)));
    }
    if (full) { // Euler-Maruyama physics against the exact sampler
        SimulationConfig cfg;
        cfg.dim = 1;
        cfg.v_vertical = -1.0;
        cfg.sigma = 1.0;
        cfg.lambda = 1.0;
        cfg.dt = 1e-4;
        cfg.seed = sub_seed(0xE3ULL);
        const std::int64_t n = 30000;
        const SampleBatch em = simulate_first_arrival(cfg, n);
        const SampleBatch exact = sample_exact(cfg.params(), sub_seed(0xE4ULL), n);
        const KsResult ks = two_sample_ks(row_norms(em), row_norms(exact), 0.01);
        checks.push_back(make_check("ks_em_vs_exact_d1", ks.statistic, ks.threshold));
    }
    if (full) { // constructive lower bound via mutual information
        const EntropyEstimate est =
            estimate_mi_vdfap_input(-1.0, 1.0, 1.0, 200000, 4, sub_seed(0x313AULL));
        const double want = capacity::h0(2.0) - capacity::h0(1.0);
        checks.push_back(make_check("mi_constructive_lower_bound",
                                    std::fabs(est.value - want), 0.03));
    }
    return checks;
}

int run_validate(const RunManifest& m)
{
    const auto& p = m.params;
    const std::string suite = p.value("suite", "all");
    if (suite != "all" && suite != "fast")
        throw std::invalid_argument("suite must be all or fast");
    const auto seed = p.value("seed", std::uint64_t{0});
    const auto checks = run_validation(suite, seed);

    bool all_pass = true;
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back(ordered_json{{"test", c.name},
                                   {"statistic", c.statistic},
                                   {"threshold", c.threshold},
                                   {"pass", c.pass}});
    }
    ordered_json report;
    report["suite"] = suite;
    report["seed"] = seed;
    report["checks"] = arr;
    report["pass"] = all_pass;

    if (!m.output_path.empty())
        atomic_write(m.output_path, report.dump(2) + "\n");
    else
        std::cout << report.dump(2) << "\n";
    std::cout << "validate: " << (all_pass ? "all checks passed" : "FAILURES") << " ("
              << checks.size() << " checks, suite " << suite << ", seed " << seed << ")\n";
    return all_pass ? 0 : 1;
}

int run(const RunManifest& m)
{
    check_manifest(m);
    if (m.command == "pdf")
        return run_pdf(m);
    if (m.command == "cf")
        return run_cf(m);
    if (m.command == "moments")
        return run_moments(m);
    if (m.command == "entropy")
        return run_entropy(m);
    if (m.command == "sample")
        return run_sample(m);
    if (m.command == "bounds")
        return run_bounds(m);
    if (m.command == "sweep")
        return run_sweep(m);
    if (m.command == "mi")
        return run_mi(m);
    return run_validate(m);
}

void print_error(int code, const std::string& message, const ordered_json& context)
{
    ordered_json err;
    err["code"] = code;
    err["message"] = message;
    err["context"] = context;
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"VDFAP noise-model toolkit: densities, characteristic functions, moments, "
                 "exact sampling, differential entropy, capacity bounds, and a Monte Carlo "
                 "validation suite"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::string out, format = "csv", units = "nats";
    double u = 0.0, lambda = 0.0, dt = 0.0, diff_sigma = 1.0, lambda_in = 0.0;
    int dim = 2, k = 4;
    std::int64_t n = 0, max_steps = 0;
    std::uint64_t seed = 0;
    std::string sigma_text, omega_text, point_text, upar_text, grid_u, grid_lambda;
    std::string method = "exact", suite = "all";
    bool bridge = false, dump_manifest = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out, "output artifact path");
        cmd->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--units", units, "nats|bits")->check(CLI::IsMember({"nats", "bits"}));
        cmd->add_flag("--dump-manifest", dump_manifest,
                      "print the run manifest JSON instead of executing");
    };

    CLI::App* pdf = app.add_subcommand("pdf", "density value at a point");
    pdf->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
    pdf->add_option("--u", u)->required();
    pdf->add_option("--lambda", lambda)->required();
    pdf->add_option("--point", point_text, "x[,y]")->required();
    pdf->add_option("--u-par", upar_text, "parallel drift a[,b] (general FAP density)");
    add_common(pdf);

    CLI::App* cf = app.add_subcommand("cf", "characteristic function value");
    cf->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
    cf->add_option("--u", u)->required();
    cf->add_option("--lambda", lambda)->required();
    cf->add_option("--omega", omega_text, "w1[,w2]")->required();
    add_common(cf);

    CLI::App* moments = app.add_subcommand("moments", "mean vector and covariance matrix");
    moments->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
    moments->add_option("--u", u)->required();
    moments->add_option("--lambda", lambda)->required();
    add_common(moments);

    CLI::App* entropy = app.add_subcommand("entropy", "differential entropy");
    entropy->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
    entropy->add_option("--u", u)->required();
    entropy->add_option("--lambda", lambda)->required();
    add_common(entropy);

    CLI::App* sample = app.add_subcommand("sample", "draw arrival-position samples");
    sample->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
    sample->add_option("--u", u)->required();
    sample->add_option("--lambda", lambda)->required();
    sample->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed)->required();
    sample->add_option("--method", method)->check(CLI::IsMember({"exact", "em"}));
    sample->add_option("--dt", dt, "Euler-Maruyama step");
    sample->add_option("--diff-sigma", diff_sigma, "diffusion scale for --method em");
    sample->add_option("--max-steps", max_steps);
    sample->add_flag("--bridge", bridge, "Brownian-bridge crossing recovery");
    add_common(sample);

    CLI::App* bounds = app.add_subcommand("bounds", "capacity bounds at one parameter point");
    bounds->add_option("--u", u)->required();
    bounds->add_option("--lambda", lambda)->required();
    bounds->add_option("--sigma", sigma_text, "covariance cap a,b,c,d (row-major)")->required();
    add_common(bounds);

    CLI::App* sweep = app.add_subcommand("sweep", "capacity bounds over a parameter grid");
    sweep->add_option("--grid-u", grid_u, "lo:hi:steps[:log], negative values")->required();
    sweep->add_option("--grid-lambda", grid_lambda, "lo:hi:steps[:log]")->required();
    sweep->add_option("--sigma", sigma_text, "covariance cap a,b,c,d (row-major)")->required();
    add_common(sweep);

    CLI::App* mi = app.add_subcommand("mi", "k-NN mutual information for a VDFAP input");
    mi->add_option("--u", u)->required();
    mi->add_option("--lambda", lambda)->required();
    mi->add_option("--lambda-in", lambda_in)->required();
    mi->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    mi->add_option("--k", k)->check(CLI::PositiveNumber);
    mi->add_option("--seed", seed)->required();
    add_common(mi);

    CLI::App* validate = app.add_subcommand("validate", "run the validation suite");
    validate->add_option("--suite", suite)->check(CLI::IsMember({"all", "fast"}));
    validate->add_option("--seed", seed);
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            return app.exit(e);
        std::ostringstream silent;
        app.exit(e, silent, silent);
        print_error(2, e.what(), {{"stage", "argument parsing"}});
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        manifest.command = active->get_name();
        manifest.output_path = out;
        manifest.format = format;
        manifest.units = units;
        ordered_json& p = manifest.params;
        // Validate model flags against the owning type's invariants before
        // dispatching; domain failures later map to exit 3, these to exit 2.
        auto require_model_params = [&]() {
            if (!std::isfinite(u) || !(u < 0.0) || -u < vdfap::kMinDriftMagnitude)
                throw std::invalid_argument("--u must be negative with |u| >= 1e-12");
            if (!std::isfinite(lambda) || !(lambda > 0.0))
                throw std::invalid_argument("--lambda must be positive");
        };
        auto put_common_model = [&]() {
            require_model_params();
            p["dim"] = dim;
            p["u"] = u;
            p["lambda"] = lambda;
        };
        if (manifest.command == "pdf") {
            put_common_model();
            p["point"] = parse_csv_doubles(point_text, static_cast<std::size_t>(dim),
                                           static_cast<std::size_t>(dim), "--point");
            if (!upar_text.empty())
                p["u_par"] = parse_csv_doubles(upar_text, static_cast<std::size_t>(dim),
                                               static_cast<std::size_t>(dim), "--u-par");
        } else if (manifest.command == "cf") {
            put_common_model();
            p["omega"] = parse_csv_doubles(omega_text, static_cast<std::size_t>(dim),
                                           static_cast<std::size_t>(dim), "--omega");
        } else if (manifest.command == "moments" || manifest.command == "entropy") {
            put_common_model();
        } else if (manifest.command == "sample") {
            put_common_model();
            p["n"] = n;
            p["seed"] = seed;
            p["method"] = method;
            if (dt > 0.0)
                p["dt"] = dt;
            p["diff_sigma"] = diff_sigma;
            if (max_steps > 0)
                p["max_steps"] = max_steps;
            p["bridge"] = bridge;
        } else if (manifest.command == "bounds") {
            require_model_params();
            p["u"] = u;
            p["lambda"] = lambda;
            p["sigma"] = parse_csv_doubles(sigma_text, 4, 4, "--sigma");
        } else if (manifest.command == "sweep") {
            p["grid_u"] = grid_u;
            p["grid_lambda"] = grid_lambda;
            p["sigma"] = parse_csv_doubles(sigma_text, 4, 4, "--sigma");
        } else if (manifest.command == "mi") {
            require_model_params();
            if (!std::isfinite(lambda_in) || !(lambda_in > 0.0))
                throw std::invalid_argument("--lambda-in must be positive");
            p["u"] = u;
            p["lambda"] = lambda;
            p["lambda_in"] = lambda_in;
            p["n"] = n;
            p["k"] = k;
            p["seed"] = seed;
        } else if (manifest.command == "validate") {
            p["suite"] = suite;
            p["seed"] = seed;
        }

        if (dump_manifest) {
            // round-trip through JSON before printing; the manifest must survive
            const RunManifest back = manifest_from_json(to_json(manifest));
            std::cout << to_json(back).dump(2) << "\n";
            return 0;
        }
        return run(manifest);
    } catch (const std::invalid_argument& e) {
        print_error(2, e.what(), {{"command", manifest.command}});
        return 2;
    } catch (const std::domain_error& e) {
        print_error(3, e.what(), {{"command", manifest.command}});
        return 3;
    } catch (const nlohmann::json::exception& e) {
        print_error(2, e.what(), {{"command", manifest.command}});
        return 2;
    } catch (const fs::filesystem_error& e) {
        print_error(4, e.what(), {{"command", manifest.command}});
        return 4;
    } catch (const std::runtime_error& e) {
        print_error(4, e.what(), {{"command", manifest.command}});
        return 4;
    }
}
