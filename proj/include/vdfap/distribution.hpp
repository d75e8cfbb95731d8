// SPDX-License-Identifier: Apache-2.0
//
// The FAP/VDFAP distribution surface: densities (linear and log scale),
// characteristic function with gradient and Hessian, first two moments,
// differential entropy, and the convolution-closure combinator.

#ifndef VDFAP_DISTRIBUTION_HPP
#define VDFAP_DISTRIBUTION_HPP

#include "vdfap/params.hpp"

#include <span>

namespace vdfap {

// Log-density of the general FAP law (nonzero parallel drift allowed).
double fap_log_pdf(const FapParams& p, std::span<const double> n);
double fap_pdf(const FapParams& p, std::span<const double> n);

// Log-density of the VDFAP sub-family; depends on n only through its norm.
double vdfap_log_pdf(const VdfapParams& p, std::span<const double> n);
double vdfap_pdf(const VdfapParams& p, std::span<const double> n);
// Radial forms used by the quadrature layers.
double vdfap_log_pdf_radial(const VdfapParams& p, double r);
double vdfap_pdf_radial(const VdfapParams& p, double r);

// Characteristic function exp(-lambda(sqrt(|w|^2+u^2) - |u|)); real-valued in
// (0, 1], equal to 1 exactly at w = 0.
double vdfap_cf(const VdfapParams& p, std::span<const double> omega);
double vdfap_cf_radial(const VdfapParams& p, double omega_norm);

// Gradient and Hessian of the characteristic function in omega.
Vec cf_gradient(const VdfapParams& p, std::span<const double> omega);
Mat cf_hessian(const VdfapParams& p, std::span<const double> omega);

// First two moments: zero mean and (lambda/|u|) I covariance.
Vec mean(const VdfapParams& p);
Mat covariance(const VdfapParams& p);

// Sum of independent VDFAP vectors with identical drift: lambdas add.
// Throws std::invalid_argument when dimensions or drifts differ.
VdfapParams stable_sum(const VdfapParams& p1, const VdfapParams& p2);

// Differential entropy in nats. Closed form for d=2; adaptive quadrature of
// -int f log f for d=1.
double differential_entropy(const VdfapParams& p);

} // namespace vdfap

#endif
