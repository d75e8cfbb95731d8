// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the production evaluation paths:
//  - K_1 by trapezoidal quadrature of the integral representation
//    K_1(x) = int_0^inf e^{-x cosh t} cosh t dt (the equally spaced
//    trapezoid rule converges geometrically for this integrand);
//  - Ei by the convergent series in 80-bit arithmetic for moderate
//    arguments and by quadrature of the defining integral otherwise;
//  - reference pdf evaluation straight from the density formula in
//    extended precision.

#ifndef VDFAP_TEST_ORACLES_HPP
#define VDFAP_TEST_ORACLES_HPP

#include "vdfap/quadrature.hpp"

#include <cmath>

namespace oracles {

inline double bessel_k1_quadrature(double x)
{
    const double t_max = std::acosh(745.0 / x) + 1.0;
    const double h = t_max / 6000.0;
    long double sum = 0.5L * std::exp(-(long double)x); // t = 0 term, cosh 0 = 1
    for (int i = 1; i <= 6000; ++i) {
        const long double t = h * i;
        const long double c = coshl(t);
        sum += expl(-(long double)x * c) * c;
    }
    return static_cast<double>(sum * (long double)h);
}

inline double expint_ei_series_ld(double x)
{
    // gamma + log|x| + sum x^k/(k k!), summed in long double; safe to x ~ -8.
    const long double gamma = 0.57721566490153286060651209008240243L;
    long double term = 1.0L;
    long double sum = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= (long double)x / k;
        sum += term / k;
        if (fabsl(term) < 1e-25L * (fabsl(sum) + 1e-30L))
            break;
    }
    return static_cast<double>(gamma + logl(fabsl((long double)x)) + sum);
}

inline double expint_ei_quadrature(double x)
{
    // Ei(x) = -e^x int_0^inf e^{x s} / (1+s) ds for x < 0.
    const double a = -x;
    auto integrand = [a](double s) { return std::exp(-a * s) / (1.0 + s); };
    const auto r = vdfap::quadrature::integrate_half_line(integrand, 0.0, 1e-16, 1e-14, 8000);
    return -std::exp(x) * r.value;
}

inline double expint_ei(double x)
{
    return x > -8.0 ? expint_ei_series_ld(x) : expint_ei_quadrature(x);
}

// Density of the general first-arrival-position law evaluated term by term
// in long double, using the oracle K_1 or the elementary K_{3/2} form.
inline double fap_pdf_reference(int dim, double u_par0, double u_par1, double u_D,
                                double lambda, double n0, double n1)
{
    const long double two_pi = 6.283185307179586476925286766559L;
    const long double unorm = sqrtl((long double)u_par0 * u_par0 + (long double)u_par1 * u_par1
                                    + (long double)u_D * u_D);
    const long double nsq = (long double)n0 * n0 + (long double)n1 * n1;
    const long double rho = unorm * sqrtl(nsq + (long double)lambda * lambda);
    long double kval;
    long double power;
    if (dim == 1) {
        kval = bessel_k1_quadrature(static_cast<double>(rho));
        power = rho;
    } else {
        kval = sqrtl(3.14159265358979323846264338328L / (2.0L * rho)) * expl(-rho)
            * (1.0L + 1.0L / rho);
        power = rho * sqrtl(rho);
    }
    const long double pref = 2.0L * (long double)lambda
        * powl(unorm / sqrtl(two_pi), (long double)(dim + 1));
    const long double drift = expl((long double)u_par0 * n0 + (long double)u_par1 * n1
                                   - (long double)u_D * lambda);
    return static_cast<double>(pref * drift * kval / power);
}

} // namespace oracles

#endif
