// SPDX-License-Identifier: Apache-2.0
//
// Parameter types for the FAP/VDFAP noise family. The spatial information is
// d-dimensional with d in {1, 2}; small fixed-capacity vector/matrix types
// avoid heap traffic in the evaluation loops.

#ifndef VDFAP_PARAMS_HPP
#define VDFAP_PARAMS_HPP

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace vdfap {

// d-vector with d <= 2; entries beyond dim are kept at zero.
struct Vec {
    int dim = 0;
    std::array<double, 2> v{0.0, 0.0};

    Vec() = default;
    Vec(int d, double x, double y = 0.0) : dim(d), v{x, y} {}
    static Vec zero(int d) { return Vec(d, 0.0, 0.0); }

    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double squared_norm() const { return v[0] * v[0] + v[1] * v[1]; }
    double norm() const { return std::hypot(v[0], v[1]); }
};

// d x d matrix with d <= 2, row-major.
struct Mat {
    int dim = 0;
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    Mat() = default;
    explicit Mat(int d) : dim(d) {}
    static Mat identity_scaled(int d, double s)
    {
        Mat out(d);
        for (int i = 0; i < d; ++i)
            out.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = s;
        return out;
    }
    double operator()(int i, int j) const
    {
        return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    double& operator()(int i, int j)
    {
        return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

inline Vec make_vec(int dim, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("vector size does not match dimension");
    Vec out(dim, x[0], dim > 1 ? x[1] : 0.0);
    return out;
}

inline void require_finite(const Vec& n, const char* what)
{
    for (int i = 0; i < n.dim; ++i)
        if (!std::isfinite(n[i]))
            throw std::domain_error(std::string(what) + ": non-finite coordinate");
}

// The smallest admissible drift magnitude. Below this the family degenerates
// toward the Cauchy limit whose covariance does not exist, which would break
// every second-moment consumer.
inline constexpr double kMinDriftMagnitude = 1e-12;

// VDFAP^(d)(u, lambda): zero parallel drift, vertical drift u < 0 pointing
// from the transmitter toward the receiver plane at distance lambda.
struct VdfapParams {
    int dim;       // d = D - 1, in {1, 2}
    double u;      // normalized vertical drift v_D / sigma^2, strictly negative
    double lambda; // transmitter-receiver distance, strictly positive

    VdfapParams(int d, double u_, double lambda_) : dim(d), u(u_), lambda(lambda_)
    {
        if (d != 1 && d != 2)
            throw std::invalid_argument("VdfapParams: dimension must be 1 or 2");
        if (!std::isfinite(u) || !(u < 0.0))
            throw std::invalid_argument("VdfapParams: drift u must be finite and negative");
        if (-u < kMinDriftMagnitude)
            throw std::invalid_argument("VdfapParams: |u| below 1e-12 is rejected");
        if (!std::isfinite(lambda) || !(lambda > 0.0))
            throw std::invalid_argument("VdfapParams: lambda must be finite and positive");
        if (!std::isfinite(-u * lambda))
            throw std::invalid_argument("VdfapParams: |u|*lambda overflows");
    }

    double drift_mag() const { return -u; }
    // Dimensionless product s = |u| * lambda that governs entropy and bounds.
    double s() const { return -u * lambda; }

    friend bool operator==(const VdfapParams& a, const VdfapParams& b)
    {
        return a.dim == b.dim && a.u == b.u && a.lambda == b.lambda;
    }
};

// General FAP parameters: parallel drift u_par plus vertical drift u_D < 0.
// With u_par = 0 this coincides with VdfapParams(d, u_D, lambda).
struct FapParams {
    int dim;
    Vec u_par;
    double u_D;
    double lambda;

    FapParams(int d, std::span<const double> u_par_, double u_D_, double lambda_)
        : dim(d), u_par(make_vec(d, u_par_)), u_D(u_D_), lambda(lambda_)
    {
        if (d != 1 && d != 2)
            throw std::invalid_argument("FapParams: dimension must be 1 or 2");
        require_finite(u_par, "FapParams");
        if (!std::isfinite(u_D) || !(u_D < 0.0))
            throw std::invalid_argument("FapParams: vertical drift u_D must be finite and negative");
        if (-u_D < kMinDriftMagnitude)
            throw std::invalid_argument("FapParams: |u_D| below 1e-12 is rejected");
        if (!std::isfinite(lambda) || !(lambda > 0.0))
            throw std::invalid_argument("FapParams: lambda must be finite and positive");
    }

    static FapParams from_vdfap(const VdfapParams& p)
    {
        const std::array<double, 2> zero{0.0, 0.0};
        return FapParams(p.dim, std::span<const double>(zero.data(),
                                                        static_cast<std::size_t>(p.dim)),
                         p.u, p.lambda);
    }

    double drift_norm() const
    {
        return std::sqrt(u_par.squared_norm() + u_D * u_D);
    }
};

} // namespace vdfap

#endif
