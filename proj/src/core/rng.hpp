#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace spinglass {

/// Derives an independent stream seed from a master seed and a purpose label.
/// Both the hash and the generator below are fixed algorithms, so equal
/// (seed, label) pairs reproduce equal streams on every platform.
uint64_t derive_seed(uint64_t master, std::string_view label);

/// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();

    /// Uniform double in [0,1), 53-bit resolution.
    double next_unit();

    /// Uniform double strictly inside (0,1).
    double next_open_unit();

    /// Uniform integer in [0, bound), unbiased. bound must be > 0.
    uint64_t next_below(uint64_t bound);

    /// +1 or -1 with equal probability.
    int next_sign();

    /// Standard normal deviate via inverse-transform sampling.
    /// Consumes exactly one uniform per deviate.
    double next_gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t s_[4];
};

/// Inverse of the standard normal CDF (Acklam's rational approximation with
/// one Halley refinement step). p must lie in (0,1).
double inverse_normal_cdf(double p);

} // namespace spinglass
