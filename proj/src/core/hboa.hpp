#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "core/bayes_model.hpp"
#include "core/instance.hpp"
#include "core/rng.hpp"

namespace spinglass {

struct PopulationMember {
    SpinConfiguration config;
    double energy = 0.0;
};

struct Population {
    std::vector<PopulationMember> members;
    int size() const { return static_cast<int>(members.size()); }
};

struct RunCaps {
    uint64_t max_evaluations = 10'000'000;
    uint32_t max_generations = 0; // 0: defaults to the number of spins
};

struct RunMetrics {
    uint64_t evaluations = 0; // E_G: hill-climber restarts (one per candidate)
    uint64_t flips = 0;       // E_L: accepted hill-climber flips
    bool found = false;
    double best_energy = std::numeric_limits<double>::infinity();
    uint32_t generations = 0;
};

/// Binary tournament selection without replacement: two shuffled passes pair
/// consecutive members and keep the lower-energy one of each pair (ties keep
/// the first of the pair), so every member enters exactly two tournaments
/// and exactly pop.size() winners are returned.
std::vector<SpinConfiguration> tournament_select(const Population& pop, Rng& rng);

/// Replacement window: the number of spins, capped at 5% of the population
/// (rounded up) and never below 1.
int rtr_window(int num_spins, int pop_size);

/// Restricted tournament replacement. Draws `window` distinct members, finds
/// the one closest to the offspring in Hamming distance (ties: lowest
/// population index among the drawn) and replaces it only if the offspring
/// energy is strictly lower. Returns whether a replacement happened.
bool rtr_replace(Population& pop, const SpinConfiguration& offspring, double energy,
                 int window, Rng& rng);

/// One full optimizer run against a known target energy. Every candidate —
/// the pop_size uniform initial solutions and floor(pop_size/2) model-sampled
/// offspring per generation — is refined by the hill climber and counts
/// toward E_G; offspring are folded back through RTR. The run stops once an
/// evaluated configuration reaches the target (exactly for +/-J couplings,
/// within 1e-9 otherwise), completing the current batch of candidates so E_G
/// lands on generation boundaries, or unsuccessfully at the caps or when the
/// population has fully converged.
RunMetrics hboa_run(const SpinGlassInstance& inst, int pop_size, double target_energy,
                    const RunCaps& caps, Rng& rng);

} // namespace spinglass
