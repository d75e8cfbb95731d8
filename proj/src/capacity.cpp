// SPDX-License-Identifier: Apache-2.0

#include "vdfap/capacity.hpp"

#include "vdfap/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vdfap::capacity {

namespace {

void require_positive_s(double s)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::domain_error("ancillary functions require s > 0");
}

void require_channel_params(double u, double lambda)
{
    if (!std::isfinite(u) || !(u < 0.0))
        throw std::invalid_argument("capacity bounds: drift u must be finite and negative");
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw std::invalid_argument("capacity bounds: lambda must be finite and positive");
}

} // namespace

CovarianceConstraint::CovarianceConstraint(double a, double b, double c, double d)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
        throw std::invalid_argument("covariance constraint: non-finite entry");
    const double scale = std::fabs(a) + std::fabs(b) + std::fabs(c) + std::fabs(d);
    if (std::fabs(b - c) > 1e-9 * scale)
        throw std::invalid_argument("covariance constraint: matrix is not symmetric");
    a_ = a;
    b_ = 0.5 * (b + c);
    d_ = d;
    // positive definite <=> positive trace and determinant
    if (!(trace() > 0.0) || !(det() > 0.0))
        throw std::invalid_argument("covariance constraint: matrix must be positive definite");
}

double CovarianceConstraint::sigma_min() const
{
    const double half_trace = 0.5 * trace();
    const double gap = std::sqrt(std::max(0.0, half_trace * half_trace - det()));
    return half_trace - gap;
}

double g(double s)
{
    require_positive_s(s);
    return s * (specfun::expint_ei_scaled(s + 1.0) - 3.0 * specfun::expint_ei_scaled(s));
}

double g_prime(double s)
{
    require_positive_s(s);
    return (s + 1.0) / s * g(s) + s / (s + 1.0) - 3.0;
}

double h0(double s)
{
    require_positive_s(s);
    return 2.0 * std::log(s) - std::log1p(s) - g(s);
}

double h0_prime(double s)
{
    require_positive_s(s);
    return (s + 1.0) / s * (2.0 - g(s));
}

double capacity_lower_bound(double u, double lambda, const CovarianceConstraint& c)
{
    require_channel_params(u, lambda);
    const double mag = -u;
    const double smin = c.sigma_min();
    return h0(mag * (lambda + mag * smin)) - h0(mag * lambda);
}

double capacity_upper_bound(double u, double lambda, const CovarianceConstraint& c)
{
    require_channel_params(u, lambda);
    const double mag = -u;
    const double s = mag * lambda;
    // det of [Sigma/lambda^2 + I/(lambda|u|)] by the explicit 2x2 formula.
    const double shift = 1.0 / (lambda * mag);
    const double inv_l2 = 1.0 / (lambda * lambda);
    const double m00 = c.a() * inv_l2 + shift;
    const double m11 = c.d() * inv_l2 + shift;
    const double m01 = c.b() * inv_l2;
    const double det = m00 * m11 - m01 * m01;
    return 0.5 * std::log(det) + std::log1p(s) + g(s) - 2.0;
}

CapacityBounds::CapacityBounds(double lower_, double upper_, double u_, double lambda_,
                               double sigma_min_)
    : lower(lower_), upper(upper_), u(u_), lambda(lambda_), sigma_min(sigma_min_)
{
    if (!(lower > 0.0))
        throw std::domain_error("capacity bounds: lower bound must be strictly positive");
    // Both values bound the same capacity, so lower <= upper; tolerate only
    // rounding-level inversions and report anything larger.
    const double slack = 1e-12 * (1.0 + std::fabs(upper));
    if (lower > upper + slack) {
        std::ostringstream msg;
        msg << "capacity bounds: lower " << lower << " exceeds upper " << upper
            << " at u=" << u << " lambda=" << lambda << " sigma_min=" << sigma_min;
        throw std::domain_error(msg.str());
    }
}

std::vector<CapacityBounds> bounds_sweep(const std::vector<double>& u_grid,
                                         const std::vector<double>& lambda_grid,
                                         const CovarianceConstraint& c)
{
    if (u_grid.empty() || lambda_grid.empty())
        throw std::invalid_argument("bounds_sweep: grids must be nonempty");
    std::vector<CapacityBounds> out;
    out.reserve(u_grid.size() * lambda_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
            const double u = u_grid[i];
            const double lambda = lambda_grid[j];
            try {
                const double lo = capacity_lower_bound(u, lambda, c);
                const double hi = capacity_upper_bound(u, lambda, c);
                out.emplace_back(lo, hi, u, lambda, c.sigma_min());
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << e.what() << " [grid point i=" << i << " j=" << j << " u=" << u
                    << " lambda=" << lambda << "]";
                throw std::domain_error(msg.str());
            }
        }
    }
    return out;
}

std::string bounds_to_csv(const std::vector<CapacityBounds>& rows, double unit_scale)
{
    std::ostringstream csv;
    csv << "u,lambda,sigma_min,lower_nats,upper_nats\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.u, r.lambda,
                      r.sigma_min, r.lower / unit_scale, r.upper / unit_scale);
        csv << buf;
    }
    return csv.str();
}

} // namespace vdfap::capacity
