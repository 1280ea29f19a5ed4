#include "core/local_search.hpp"

#include <vector>

#include "core/error.hpp"

namespace spinglass {

ClimbResult hill_climb(const SpinGlassInstance& inst, SpinConfiguration start) {
    const int n = inst.num_spins();
    ClimbResult result;
    result.config = std::move(start);
    SpinConfiguration& c = result.config;

    if (static_cast<int>(c.size()) != n)
        fail(Errc::invalid_argument, "configuration has " + std::to_string(c.size()) +
                                         " spins, instance has " + std::to_string(n));

    const std::vector<double>& j = inst.couplings();
    std::vector<double> delta(n);
    for (int k = 0; k < n; ++k)
        delta[k] = inst.delta_energy(c, k);

    for (;;) {
        int best = 0;
        double best_delta = delta[0];
        for (int k = 1; k < n; ++k) {
            if (delta[k] < best_delta) {
                best_delta = delta[k];
                best = k;
            }
        }
        if (best_delta >= 0.0)
            break;

        int8_t old_spin = c[best];
        c[best] = static_cast<int8_t>(-old_spin);
        delta[best] = -delta[best];
        ++result.flips;

        // flipping `best` shifts each neighbor's local field by
        // -2 * J_{jk} * old_spin
        int nb[4] = {inst.right(best), inst.down(best), inst.left(best), inst.up(best)};
        double jw[4] = {j[2 * best], j[2 * best + 1], j[2 * inst.left(best)],
                        j[2 * inst.up(best) + 1]};
        for (int t = 0; t < 4; ++t)
            delta[nb[t]] += 4.0 * c[nb[t]] * jw[t] * old_spin;
    }

    result.energy = inst.energy(result.config);
    return result;
}

} // namespace spinglass
