#include <doctest.h>

#include "core/error.hpp"
#include "core/local_search.hpp"
#include "core/oracle.hpp"
#include "test_util.hpp"

using namespace spinglass;

namespace {

SpinGlassInstance ferro4() {
    return SpinGlassInstance(4, CouplingDistribution::plus_minus_j(), 0,
                             std::vector<double>(32, -1.0));
}

} // namespace

TEST_CASE("a local optimum is a fixed point") {
    SpinGlassInstance inst = ferro4();
    SpinConfiguration aligned(16, 1);
    ClimbResult r = hill_climb(inst, aligned);
    CHECK(r.flips == 0);
    CHECK(r.config == aligned);
    CHECK(r.energy == -32.0);
}

TEST_CASE("one bad spin takes exactly one flip") {
    SpinGlassInstance inst = ferro4();
    SpinConfiguration start(16, 1);
    start[5] = -1;
    ClimbResult r = hill_climb(inst, start);
    CHECK(r.flips == 1);
    CHECK(r.energy == -32.0);
}

TEST_CASE("climbs never beat the exact ground state and sometimes reach it") {
    SpinGlassInstance inst = generate_instance(5, CouplingDistribution::plus_minus_j(), 1234);
    GroundTruth truth = brute_force_ground(inst);
    bool reached = false;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        ClimbResult r = hill_climb(inst, testutil::random_config(25, seed));
        CHECK(r.energy >= truth.energy);
        if (r.energy == truth.energy)
            reached = true;
    }
    CHECK(reached);
}

TEST_CASE("accepted flips strictly decrease the energy") {
    SpinGlassInstance inst = generate_instance(6, CouplingDistribution::gaussian(), 99);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        SpinConfiguration c = testutil::random_config(36, seed);
        double before = inst.energy(c);
        ClimbResult r = hill_climb(inst, c);
        if (r.flips > 0)
            CHECK(r.energy < before);
        // replay flip by flip: every accepted move must improve strictly
        SpinConfiguration replay = c;
        double energy = before;
        for (uint64_t step = 0; step < r.flips; ++step) {
            int best = 0;
            double best_delta = inst.delta_energy(replay, 0);
            for (int k = 1; k < 36; ++k) {
                double d = inst.delta_energy(replay, k);
                if (d < best_delta) {
                    best_delta = d;
                    best = k;
                }
            }
            CHECK(best_delta < 0.0);
            replay[best] = static_cast<int8_t>(-replay[best]);
            energy += best_delta;
        }
        CHECK(replay == r.config);
        CHECK(energy == doctest::Approx(r.energy).epsilon(1e-9));
    }
}

TEST_CASE("results are locally optimal, deterministic and idempotent") {
    SpinGlassInstance inst = generate_instance(5, CouplingDistribution::gaussian(), 314159);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        SpinConfiguration start = testutil::random_config(25, seed);
        ClimbResult a = hill_climb(inst, start);
        ClimbResult b = hill_climb(inst, start);
        CHECK(a.config == b.config);
        CHECK(a.flips == b.flips);
        for (int k = 0; k < 25; ++k)
            CHECK(inst.delta_energy(a.config, k) >= 0.0);
        ClimbResult again = hill_climb(inst, a.config);
        CHECK(again.flips == 0);
    }
}

TEST_CASE("size mismatch rejected") {
    SpinGlassInstance inst = generate_instance(4, CouplingDistribution::gaussian(), 3);
    CHECK_THROWS_AS(hill_climb(inst, SpinConfiguration(9, 1)), Error);
}
