#include "core/hboa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/local_search.hpp"

namespace spinglass {

std::vector<SpinConfiguration> tournament_select(const Population& pop, Rng& rng) {
    const int p = pop.size();
    if (p < 2 || p % 2 != 0)
        fail(Errc::invalid_argument,
             "tournament selection needs an even population of at least 2, got " +
                 std::to_string(p));

    std::vector<SpinConfiguration> winners;
    winners.reserve(p);
    std::vector<int> order(p);
    for (int pass = 0; pass < 2; ++pass) {
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (int t = 0; t < p; t += 2) {
            const PopulationMember& a = pop.members[order[t]];
            const PopulationMember& b = pop.members[order[t + 1]];
            winners.push_back(b.energy < a.energy ? b.config : a.config);
        }
    }
    return winners;
}

int rtr_window(int num_spins, int pop_size) {
    int cap = static_cast<int>(std::ceil(0.05 * pop_size));
    return std::min(num_spins, std::max(1, cap));
}

bool rtr_replace(Population& pop, const SpinConfiguration& offspring, double energy,
                 int window, Rng& rng) {
    const int p = pop.size();
    if (window < 1 || window > p)
        fail(Errc::invalid_argument, "replacement window must lie in [1, population size]");

    // partial Fisher-Yates draw of `window` distinct indices
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < window; ++t) {
        int j = t + static_cast<int>(rng.next_below(static_cast<uint64_t>(p - t)));
        std::swap(idx[t], idx[j]);
    }

    const size_t n = offspring.size();
    int nearest = -1;
    size_t nearest_dist = n + 1;
    for (int t = 0; t < window; ++t) {
        const SpinConfiguration& c = pop.members[idx[t]].config;
        size_t dist = 0;
        for (size_t b = 0; b < n; ++b)
            dist += c[b] != offspring[b];
        if (dist < nearest_dist || (dist == nearest_dist && idx[t] < nearest)) {
            nearest_dist = dist;
            nearest = idx[t];
        }
    }

    if (energy < pop.members[nearest].energy) {
        pop.members[nearest] = PopulationMember{offspring, energy};
        return true;
    }
    return false;
}

namespace {

bool population_converged(const Population& pop) {
    for (int i = 1; i < pop.size(); ++i)
        if (pop.members[i].config != pop.members[0].config)
            return false;
    return true;
}

} // namespace

RunMetrics hboa_run(const SpinGlassInstance& inst, int pop_size, double target_energy,
                    const RunCaps& caps, Rng& rng) {
    if (pop_size < 4 || pop_size % 2 != 0)
        fail(Errc::invalid_argument,
             "population size must be even and at least 4, got " + std::to_string(pop_size));

    const int n = inst.num_spins();
    const double tol = inst.energy_tolerance();
    const uint32_t max_generations =
        caps.max_generations ? caps.max_generations : static_cast<uint32_t>(n);

    RunMetrics metrics;
    auto evaluate = [&](SpinConfiguration&& start, PopulationMember& out) {
        if (metrics.evaluations >= caps.max_evaluations)
            return false;
        ClimbResult climb = hill_climb(inst, std::move(start));
        ++metrics.evaluations;
        metrics.flips += climb.flips;
        if (climb.energy < metrics.best_energy)
            metrics.best_energy = climb.energy;
        if (climb.energy <= target_energy + tol)
            metrics.found = true;
        out = PopulationMember{std::move(climb.config), climb.energy};
        return true;
    };

    Population pop;
    pop.members.reserve(pop_size);
    for (int i = 0; i < pop_size; ++i) {
        PopulationMember member;
        if (!evaluate(random_configuration(n, rng), member))
            return metrics; // evaluation budget exhausted mid-initialization
        pop.members.push_back(std::move(member));
    }

    const int offspring_count = pop_size / 2;
    const int window = rtr_window(n, pop_size);
    while (!metrics.found && metrics.generations < max_generations &&
           metrics.evaluations < caps.max_evaluations) {
        if (population_converged(pop))
            break; // a fully collapsed population cannot make progress

        std::vector<SpinConfiguration> selected = tournament_select(pop, rng);
        BayesianNetworkModel model = build_model(selected);
        std::vector<SpinConfiguration> offspring = sample_model(model, offspring_count, rng);

        for (SpinConfiguration& child : offspring) {
            PopulationMember member;
            if (!evaluate(std::move(child), member))
                return metrics;
            rtr_replace(pop, member.config, member.energy, window, rng);
        }
        ++metrics.generations;
    }
    return metrics;
}

} // namespace spinglass
