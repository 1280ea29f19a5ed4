#include "core/oracle.hpp"

#include <bit>
#include <cmath>
#include <thread>
#include <vector>

#include "core/error.hpp"

namespace spinglass {

namespace {

constexpr double kTieTolerance = 1e-9;

struct PartialResult {
    double min_energy = 0.0;
    uint64_t count = 0;
    SpinConfiguration witness;
};

// Enumerates Gray codes gray(k) = k ^ (k >> 1) for k in [begin, end), where
// bit b of the code drives spin b+1 (set bit = -1). Spin 0 stays +1.
PartialResult scan_range(const SpinGlassInstance& inst, uint64_t begin, uint64_t end) {
    const int n = inst.num_spins();
    SpinConfiguration c(n, 1);
    uint64_t code = begin ^ (begin >> 1);
    for (int b = 0; b + 1 < n; ++b)
        if (code & (1ull << b))
            c[b + 1] = -1;

    double energy = inst.energy(c);
    PartialResult r{energy, 1, c};

    auto consider = [&](double e) {
        if (e > r.min_energy + kTieTolerance)
            return;
        // recompute exactly before recording so incremental rounding
        // cannot leak into the reported minimum
        double exact = inst.energy(c);
        if (exact < r.min_energy - kTieTolerance) {
            r.min_energy = exact;
            r.count = 1;
            r.witness = c;
        } else if (std::abs(exact - r.min_energy) <= kTieTolerance) {
            if (exact < r.min_energy)
                r.min_energy = exact;
            ++r.count;
        }
    };

    // flattened neighbor/coupling tables keep the inner loop branch-free
    std::vector<int32_t> nbr(4 * n);
    std::vector<double> bond(4 * n);
    const std::vector<double>& j = inst.couplings();
    for (int k = 0; k < n; ++k) {
        nbr[4 * k + 0] = inst.right(k);
        nbr[4 * k + 1] = inst.down(k);
        nbr[4 * k + 2] = inst.left(k);
        nbr[4 * k + 3] = inst.up(k);
        bond[4 * k + 0] = j[2 * k];
        bond[4 * k + 1] = j[2 * k + 1];
        bond[4 * k + 2] = j[2 * inst.left(k)];
        bond[4 * k + 3] = j[2 * inst.up(k) + 1];
    }
    int8_t* spins = c.data();

    for (uint64_t k = begin + 1; k < end; ++k) {
        int flip = std::countr_zero(k) + 1;
        const int32_t* nb = &nbr[4 * flip];
        const double* bw = &bond[4 * flip];
        double field = bw[0] * spins[nb[0]] + bw[1] * spins[nb[1]] +
                       bw[2] * spins[nb[2]] + bw[3] * spins[nb[3]];
        energy -= 2.0 * spins[flip] * field;
        spins[flip] = static_cast<int8_t>(-spins[flip]);
        if ((k & 0xffffull) == 0)
            energy = inst.energy(c); // periodic resync against drift
        consider(energy);
    }
    return r;
}

} // namespace

GroundTruth brute_force_ground(const SpinGlassInstance& inst, int jobs) {
    const int n = inst.num_spins();
    if (n > kMaxBruteForceSpins)
        fail(Errc::too_large,
             "instance too large for brute force (N=" + std::to_string(n) + " > " +
                 std::to_string(kMaxBruteForceSpins) +
                 "): supply ground_energy in the instance file");

    const uint64_t total = 1ull << (n - 1);
    if (jobs < 1)
        jobs = 1;
    uint64_t chunk = 1ull << 20;
    uint64_t num_chunks = (total + chunk - 1) / chunk;
    int workers = static_cast<int>(std::min<uint64_t>(jobs, num_chunks));

    std::vector<PartialResult> parts;
    if (workers <= 1) {
        parts.push_back(scan_range(inst, 0, total));
    } else {
        uint64_t per = total / workers;
        parts.resize(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            uint64_t begin = per * w;
            uint64_t end = (w + 1 == workers) ? total : per * (w + 1);
            threads.emplace_back(
                [&, w, begin, end] { parts[w] = scan_range(inst, begin, end); });
        }
        for (auto& t : threads)
            t.join();
    }

    // merge in worker order so the witness is reproducible
    PartialResult best = parts[0];
    for (size_t w = 1; w < parts.size(); ++w) {
        const PartialResult& p = parts[w];
        if (p.min_energy < best.min_energy - kTieTolerance) {
            best = p;
        } else if (std::abs(p.min_energy - best.min_energy) <= kTieTolerance) {
            best.count += p.count;
            if (p.min_energy < best.min_energy)
                best.min_energy = p.min_energy;
        }
    }

    return GroundTruth{best.min_energy, 2 * best.count, std::move(best.witness)};
}

} // namespace spinglass
