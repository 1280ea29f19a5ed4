#pragma once

#include <cstdint>

#include "core/instance.hpp"

namespace spinglass {

struct ClimbResult {
    SpinConfiguration config; // strict local optimum: no single flip improves
    uint64_t flips = 0;       // accepted flips, the run's contribution to E_L
    double energy = 0.0;
};

/// Deterministic steepest-descent bit-flip hill climber. Each step flips the
/// spin with the most negative energy delta (ties broken by lowest index)
/// and stops when no flip strictly decreases the energy. Zero-delta flips
/// are never taken, so the energy sequence is strictly decreasing and the
/// climb terminates.
ClimbResult hill_climb(const SpinGlassInstance& inst, SpinConfiguration start);

} // namespace spinglass
