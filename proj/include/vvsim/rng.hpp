#pragma once

#include <cstdint>
#include <random>

// Reproducible sampling primitives. The generator algorithm is pinned so
// identical seeds give identical records on any conforming platform:
//   - stream seeds come from a SplitMix64 finalizer over
//     (seed, stream index), one independent std::mt19937_64 per stream;
//   - uniforms are (x >> 11) * 2^-53 from raw 64-bit draws;
//   - Poisson variates use Knuth inversion below mean 10 and Hormann's
//     PTRS transformed rejection at or above it.
namespace vvsim {

// SplitMix64-mixed seed for stream `index` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng);

// Exact Poisson sample; mean must be finite and >= 0.
long long poisson_sample(std::mt19937_64& rng, double mean);

}  // namespace vvsim
