// SPDX-License-Identifier: Apache-2.0
//
// Deterministic per-chunk random streams. Samples are generated in fixed-size
// chunks, each chunk owning a stream keyed by (seed, chunk index), so results
// are bit-identical no matter how many workers execute the chunks.

#ifndef VDFAP_RNG_HPP
#define VDFAP_RNG_HPP

#include <cstdint>
#include <random>

namespace vdfap::rng {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t chunk) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632be59bd9b4e019ULL));
}

// mt19937_64-backed stream with explicitly coded uniform and normal variates
// (std::*_distribution output is implementation-defined, which would break
// the bit-reproducibility contract).
class Stream {
public:
    explicit Stream(std::uint64_t key) : gen_(key) {}

    static Stream for_chunk(std::uint64_t seed, std::uint64_t chunk)
    {
        return Stream(stream_key(seed, chunk));
    }

    // Uniform in (0, 1): 53-bit mantissa, zero excluded.
    double uniform()
    {
        const std::uint64_t bits = gen_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline constexpr std::int64_t kChunkSize = 65536;

} // namespace vdfap::rng

#endif
