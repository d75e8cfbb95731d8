// SPDX-License-Identifier: Apache-2.0
//
// Independent stochastic oracles: empirical characteristic function,
// Kozachenko-Leonenko k-NN differential entropy, mutual information for
// VDFAP-distributed inputs, discrete-convolution closure checks, and a
// two-sample Kolmogorov-Smirnov test.

#ifndef VDFAP_ESTIMATORS_HPP
#define VDFAP_ESTIMATORS_HPP

#include "vdfap/params.hpp"
#include "vdfap/sampling.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vdfap {

struct EntropyEstimate {
    double value = 0.0;     // nats
    double std_error = 0.0; // nats
    int k = 0;
    std::int64_t n = 0;
};

// (1/n) sum_j exp(i w . x_j). Throws on an empty batch or dimension mismatch.
std::complex<double> empirical_cf(const SampleBatch& batch, std::span<const double> omega);

// Kozachenko-Leonenko estimator with Euclidean metric and digamma bias
// correction; the standard error is the delete-one jackknife of the mean of
// the per-sample contributions. Coincident points are rejected (callers must
// jitter if their data has ties).
EntropyEstimate knn_entropy(const SampleBatch& batch, int k);

// Draw X ~ VDFAP(2)(u, lambda_in) and N ~ VDFAP(2)(u, lambda) independently,
// form Y = X + N, and estimate I(X;Y) = h(Y) - h(N) with h(N) exact.
EntropyEstimate estimate_mi_vdfap_input(double u, double lambda, double lambda_in,
                                        std::int64_t n, int k, std::uint64_t seed);

// L1 distance between the discrete self-convolution of the two tabulated pdfs
// and the tabulated pdf of stable_sum(p1, p2), on a uniform grid of the given
// resolution spanning [-half_width, half_width) per axis.
double grid_convolution_check(const VdfapParams& p1, const VdfapParams& p2,
                              double half_width, int resolution);

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    double alpha = 0.0;
    bool pass = false;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic threshold
// c(alpha) sqrt((n+m)/(n m)), c(alpha) = sqrt(-log(alpha/2)/2).
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b, double alpha);

// Euclidean norms of the rows of a batch.
std::vector<double> row_norms(const SampleBatch& batch);

// JSON record {"test": ..., "statistic": ..., "threshold": ..., "pass": ...}.
std::string check_record_json(const std::string& test, double statistic, double threshold,
                              bool pass);

} // namespace vdfap

#endif
