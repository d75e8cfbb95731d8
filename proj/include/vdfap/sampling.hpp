// SPDX-License-Identifier: Apache-2.0
//
// Exact sampling of VDFAP vectors and the SampleBatch container with its
// CSV + JSON sidecar serialization.
//
// The sampler uses the first-passage representation of the model: with
// sigma = 1 and v_D = u, the arrival time T of the vertical coordinate is
// inverse Gaussian with mean lambda/|u| and shape lambda^2, and the parallel
// coordinates conditioned on T are centered Gaussian with variance T.

#ifndef VDFAP_SAMPLING_HPP
#define VDFAP_SAMPLING_HPP

#include "vdfap/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vdfap {

enum class SampleMethod { ExactMixture, EulerMaruyama };

const char* to_string(SampleMethod m);
SampleMethod sample_method_from_string(const std::string& name);

struct SampleBatch {
    int dim = 0;
    std::int64_t count = 0;
    std::vector<double> positions; // row-major, count x dim
    std::uint64_t seed = 0;
    SampleMethod method = SampleMethod::ExactMixture;
    double u = 0.0;
    double lambda = 0.0;
    std::int64_t discarded = 0; // Euler-Maruyama step-cap casualties; 0 for exact

    double at(std::int64_t row, int col) const
    {
        return positions[static_cast<std::size_t>(row) * dim + col];
    }
};

// count independent exact draws; bit-identical for identical (p, seed, count)
// regardless of worker count.
SampleBatch sample_exact(const VdfapParams& p, std::uint64_t seed, std::int64_t count);

// One inverse-Gaussian variate (Michael-Schucany-Haas transformation).
namespace rng { class Stream; }
double sample_inverse_gaussian(double mean, double shape, rng::Stream& stream);

// CSV (header x1[,x2], 17 significant digits) plus JSON sidecar with keys
// d, u, lambda, seed, count, method. The sidecar path is the CSV path with
// its extension replaced by .json.
void save_batch_csv(const SampleBatch& batch, const std::string& csv_path);
SampleBatch load_batch_csv(const std::string& csv_path);
std::string sidecar_path(const std::string& csv_path);

} // namespace vdfap

#endif
