// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Gauss-Kronrod 15(7) quadrature on finite and half-infinite
// intervals. Used for normalization checks, Fourier-pair verification and
// the d=1 differential entropy, where no closed form exists.

#ifndef VDFAP_QUADRATURE_HPP
#define VDFAP_QUADRATURE_HPP

#include <functional>

namespace vdfap::quadrature {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0; // accumulated local error bound
    int intervals = 0;           // intervals in the final partition
    bool converged = false;
};

// Integrate f over [a, b]. Bisects the interval with the largest local error
// until |error| <= max(abs_tol, rel_tol * |value|) or the interval budget is
// exhausted.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, double rel_tol = 1e-10,
                 int max_intervals = 4000);

// Integrate f over [a, +inf) via the rational substitution
// x = a + t/(1-t), t in [0,1).
Result integrate_half_line(const std::function<double(double)>& f, double a,
                           double abs_tol = 1e-10, double rel_tol = 1e-10,
                           int max_intervals = 4000);

} // namespace vdfap::quadrature

#endif
