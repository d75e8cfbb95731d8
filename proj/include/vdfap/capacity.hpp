// SPDX-License-Identifier: Apache-2.0
//
// Analytic capacity machinery for the 3D (d=2) VDFAP channel under a
// covariance constraint: the ancillary functions g and h0 of the
// dimensionless product s = |u| lambda, and the closed-form lower and upper
// capacity bounds. All values are in nats.

#ifndef VDFAP_CAPACITY_HPP
#define VDFAP_CAPACITY_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace vdfap::capacity {

// Symmetric positive definite 2x2 input-covariance cap.
class CovarianceConstraint {
public:
    // Entries row-major [a, b; c, d]. Asymmetry beyond 1e-9 relative is
    // rejected; smaller asymmetry is symmetrized by averaging.
    CovarianceConstraint(double a, double b, double c, double d);

    double a() const { return a_; }
    double b() const { return b_; }
    double d() const { return d_; }

    // Smallest eigenvalue via the closed 2x2 formula.
    double sigma_min() const;
    double trace() const { return a_ + d_; }
    double det() const { return a_ * d_ - b_ * b_; }

private:
    double a_, b_, d_; // symmetric: [a b; b d]
};

// g(s) = s e^{s+1} Ei(-(s+1)) - 3 s e^s Ei(-s); g(s) < 2 for all s > 0.
double g(double s);

// g'(s) = ((s+1)/s) g(s) + s/(s+1) - 3.
double g_prime(double s);

// h0(s) = 2 log s - log(1+s) - g(s); strictly increasing on s > 0.
double h0(double s);

// h0'(s) = ((s+1)/s) (2 - g(s)) > 0.
double h0_prime(double s);

// Lower bound h0(|u|(lambda + |u| sigma_min)) - h0(|u| lambda); strictly
// positive for any valid constraint.
double capacity_lower_bound(double u, double lambda, const CovarianceConstraint& c);

// Upper bound (1/2) log det(Sigma/lambda^2 + I/(lambda|u|)) + log(1+lambda|u|)
// + lambda|u| e^{lambda|u|}(e Ei(-1-lambda|u|) - 3 Ei(-lambda|u|)) - 2.
double capacity_upper_bound(double u, double lambda, const CovarianceConstraint& c);

struct CapacityBounds {
    double lower; // nats
    double upper; // nats
    double u;
    double lambda;
    double sigma_min;

    CapacityBounds(double lower, double upper, double u, double lambda, double sigma_min);
};

// Cartesian-product evaluation over the two grids, ordered by grid index
// (u varies slowest). Domain errors are rethrown with the grid coordinates
// attached to the message.
std::vector<CapacityBounds> bounds_sweep(const std::vector<double>& u_grid,
                                         const std::vector<double>& lambda_grid,
                                         const CovarianceConstraint& c);

// CSV serialization, header u,lambda,sigma_min,lower_nats,upper_nats,
// 17 significant digits. unit_scale divides the bound columns (log 2 for bits).
std::string bounds_to_csv(const std::vector<CapacityBounds>& rows, double unit_scale = 1.0);

} // namespace vdfap::capacity

#endif
