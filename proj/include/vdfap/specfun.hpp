// SPDX-License-Identifier: Apache-2.0
//
// Special functions needed by the VDFAP formulas: the modified Bessel
// function of the second kind K_nu for nu in {1/2, 1, 3/2}, and the
// exponential integral Ei on the negative real axis.
//
// Accuracy contract: relative error <= 1e-12 on x in [1e-6, 700] for K_nu
// and x in [-700, -1e-8] for Ei. Scaled variants (e^x K_nu(x), e^s Ei(-s))
// are exposed so callers can combine exponential factors in log space
// without overflow.

#ifndef VDFAP_SPECFUN_HPP
#define VDFAP_SPECFUN_HPP

namespace vdfap::specfun {

// Only these three orders appear in the densities (order (d+1)/2, d in {1,2})
// and in the half-integer recurrence checks.
enum class BesselOrder { Half, One, ThreeHalves };

// Numeric value of the order (1/2, 1, 3/2).
double order_value(BesselOrder nu) noexcept;

// K_nu(x) for x > 0. Throws std::domain_error for x <= 0 or non-finite x.
// Underflows to zero for very large x; that is not an error.
double bessel_k(BesselOrder nu, double x);

// e^x * K_nu(x); stays in normal range for all x in the contract domain.
double bessel_k_scaled(BesselOrder nu, double x);

// log K_nu(x), finite wherever K_nu would merely underflow.
double log_bessel_k(BesselOrder nu, double x);

// Ei(x) = -int_{-x}^inf e^{-t}/t dt for x < 0. Strictly negative.
// Throws std::domain_error for x >= 0 or non-finite x.
double expint_ei(double x);

// e^s * Ei(-s) for s > 0. Strictly negative, bounded, no overflow for any s.
double expint_ei_scaled(double s);

} // namespace vdfap::specfun

#endif
