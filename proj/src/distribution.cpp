// SPDX-License-Identifier: Apache-2.0

#include "vdfap/distribution.hpp"

#include "vdfap/quadrature.hpp"
#include "vdfap/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace vdfap {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

specfun::BesselOrder density_order(int dim)
{
    // order (d+1)/2
    return dim == 1 ? specfun::BesselOrder::One : specfun::BesselOrder::ThreeHalves;
}

// Shared kernel of the FAP densities in log space:
//   log(2 lambda) + (d+1)(log|u| - log sqrt(2 pi)) + <drift terms>
//   + log K_nu(rho) - nu log rho,   rho = |u| sqrt(|n|^2 + lambda^2).
double log_pdf_kernel(int dim, double drift_norm, double lambda, double drift_term,
                      double n_sq)
{
    const double nu = 0.5 * (dim + 1);
    const double q = std::sqrt(n_sq + lambda * lambda);
    const double rho = drift_norm * q;
    return std::log(2.0 * lambda) + (dim + 1) * (std::log(drift_norm) - 0.5 * kLog2Pi)
        + drift_term + specfun::log_bessel_k(density_order(dim), rho) - nu * std::log(rho);
}

// e^s Ei(-s) combination appearing in the closed-form entropy:
//   s e^s (e Ei(-1-s) - 3 Ei(-s)) = s (e^{s+1} Ei(-(s+1)) - 3 e^s Ei(-s)).
double entropy_ei_term(double s)
{
    return s * (specfun::expint_ei_scaled(s + 1.0) - 3.0 * specfun::expint_ei_scaled(s));
}

double entropy_d1_quadrature(const VdfapParams& p)
{
    // -2 int_0^inf f log f dr; the integrand underflows cleanly far out.
    auto integrand = [&p](double r) {
        const double lf = vdfap_log_pdf_radial(p, r);
        if (lf < -700.0)
            return 0.0;
        return std::exp(lf) * lf;
    };
    const auto res = quadrature::integrate_half_line(integrand, 0.0, 1e-12, 1e-8, 8000);
    return -2.0 * res.value;
}

} // namespace

double fap_log_pdf(const FapParams& p, std::span<const double> n)
{
    const Vec point = make_vec(p.dim, n);
    require_finite(point, "fap_pdf");
    const double drift_term = p.u_par[0] * point[0] + p.u_par[1] * point[1]
        - p.u_D * p.lambda;
    return log_pdf_kernel(p.dim, p.drift_norm(), p.lambda, drift_term,
                          point.squared_norm());
}

double fap_pdf(const FapParams& p, std::span<const double> n)
{
    return std::exp(fap_log_pdf(p, n));
}

double vdfap_log_pdf_radial(const VdfapParams& p, double r)
{
    if (!std::isfinite(r))
        throw std::domain_error("vdfap_pdf: non-finite radius");
    return log_pdf_kernel(p.dim, p.drift_mag(), p.lambda, p.s(), r * r);
}

double vdfap_pdf_radial(const VdfapParams& p, double r)
{
    return std::exp(vdfap_log_pdf_radial(p, r));
}

double vdfap_log_pdf(const VdfapParams& p, std::span<const double> n)
{
    const Vec point = make_vec(p.dim, n);
    require_finite(point, "vdfap_pdf");
    return vdfap_log_pdf_radial(p, point.norm());
}

double vdfap_pdf(const VdfapParams& p, std::span<const double> n)
{
    return std::exp(vdfap_log_pdf(p, n));
}

double vdfap_cf_radial(const VdfapParams& p, double omega_norm)
{
    const double a = p.drift_mag();
    const double w2 = omega_norm * omega_norm;
    if (!std::isfinite(w2))
        throw std::domain_error("vdfap_cf: frequency norm overflows");
    // sqrt(w^2 + u^2) - |u| without cancellation for small w.
    const double excess = w2 / (std::sqrt(w2 + a * a) + a);
    return std::exp(-p.lambda * excess);
}

double vdfap_cf(const VdfapParams& p, std::span<const double> omega)
{
    const Vec w = make_vec(p.dim, omega);
    require_finite(w, "vdfap_cf");
    return vdfap_cf_radial(p, w.norm());
}

Vec cf_gradient(const VdfapParams& p, std::span<const double> omega)
{
    const Vec w = make_vec(p.dim, omega);
    require_finite(w, "cf_gradient");
    const double a = p.drift_mag();
    const double root = std::sqrt(w.squared_norm() + a * a);
    const double phi = vdfap_cf_radial(p, w.norm()); // rejects overflowing norms
    Vec out = Vec::zero(p.dim);
    const double coef = -p.lambda * phi / root;
    for (int i = 0; i < p.dim; ++i)
        out[i] = coef * w[i];
    return out;
}

Mat cf_hessian(const VdfapParams& p, std::span<const double> omega)
{
    const Vec w = make_vec(p.dim, omega);
    require_finite(w, "cf_hessian");
    const double a = p.drift_mag();
    const double w2 = w.squared_norm();
    // At w = 0 the root must reduce to |u| exactly so that -H(0) and the
    // covariance formula agree bit for bit.
    const double root = w2 == 0.0 ? a : std::sqrt(w2 + a * a);
    const double phi = vdfap_cf_radial(p, w.norm());
    const double diag = -(p.lambda * phi) / root;
    const double outer = p.lambda * phi * (1.0 + p.lambda * root) / (root * root * root);
    Mat h(p.dim);
    for (int i = 0; i < p.dim; ++i)
        for (int j = 0; j < p.dim; ++j)
            h(i, j) = (i == j ? diag : 0.0) + outer * (w[i] * w[j]);
    return h;
}

Vec mean(const VdfapParams& p)
{
    return Vec::zero(p.dim);
}

Mat covariance(const VdfapParams& p)
{
    return Mat::identity_scaled(p.dim, -(p.lambda * 1.0) / p.u);
}

VdfapParams stable_sum(const VdfapParams& p1, const VdfapParams& p2)
{
    if (p1.dim != p2.dim)
        throw std::invalid_argument("stable_sum: dimensions differ");
    if (p1.u != p2.u)
        throw std::invalid_argument("stable_sum: drifts differ; closure requires equal u");
    return VdfapParams(p1.dim, p1.u, p1.lambda + p2.lambda);
}

double differential_entropy(const VdfapParams& p)
{
    if (p.dim == 1)
        return entropy_d1_quadrature(p);
    const double s = p.s();
    // log(2 pi e^3) + 2 log lambda - log(1+s) - s e^s (e Ei(-1-s) - 3 Ei(-s))
    return kLog2Pi + 3.0 + 2.0 * std::log(p.lambda) - std::log1p(s) - entropy_ei_term(s);
}

} // namespace vdfap
