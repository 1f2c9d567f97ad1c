#include "vvsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace vvsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Knuth's multiplication method; expected O(mean) uniforms.
long long poisson_inversion(std::mt19937_64& rng, double mean) {
  const double limit = std::exp(-mean);
  long long k = 0;
  double prod = uniform01(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

// Hormann (1993) transformed rejection with squeeze, valid for mean >= 10.
long long poisson_ptrs(std::mt19937_64& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const auto k = static_cast<long long>(
        std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        k * loglam - mean - std::lgamma(k + 1.0))
      return k;
  }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(stream_seed(seed, index));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

long long poisson_sample(std::mt19937_64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_sample: mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

}  // namespace vvsim
