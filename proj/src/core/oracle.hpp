#pragma once

#include <cstdint>

#include "core/instance.hpp"

namespace spinglass {

struct GroundTruth {
    double energy = 0.0;
    uint64_t degeneracy = 0; // distinct minimizing configurations, always even
    SpinConfiguration witness;
};

/// Largest spin count accepted by the exhaustive solver.
inline constexpr int kMaxBruteForceSpins = 26;

/// Exact minimum of the bond-energy sum over all 2^N configurations.
///
/// Spin 0 is pinned to +1 and the degeneracy doubled (flipping every spin
/// leaves the energy unchanged), and the remaining spins are enumerated in
/// Gray-code order so each step is a single O(1) incremental flip. Gaussian
/// energies within 1e-9 of the running minimum count as degenerate.
/// jobs > 1 partitions the enumeration; results do not depend on jobs.
GroundTruth brute_force_ground(const SpinGlassInstance& inst, int jobs = 1);

} // namespace spinglass
