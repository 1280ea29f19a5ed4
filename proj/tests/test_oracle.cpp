#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/local_search.hpp"
#include "core/oracle.hpp"
#include "test_util.hpp"

using namespace spinglass;

namespace {

// deliberately plain second enumerator: loops over all 2^N configurations
// and calls the public energy routine, no Gray code, no symmetry tricks
GroundTruth plain_enumeration(const SpinGlassInstance& inst) {
    const int n = inst.num_spins();
    GroundTruth truth;
    truth.energy = 1e300;
    for (uint64_t bits = 0; bits < (1ull << n); ++bits) {
        SpinConfiguration c(n);
        for (int b = 0; b < n; ++b)
            c[b] = (bits >> b) & 1 ? 1 : -1;
        double e = inst.energy(c);
        if (e < truth.energy - 1e-9) {
            truth.energy = e;
            truth.degeneracy = 1;
            truth.witness = c;
        } else if (std::abs(e - truth.energy) <= 1e-9) {
            ++truth.degeneracy;
        }
    }
    return truth;
}

} // namespace

TEST_CASE("ferromagnet: ground -32 with the two aligned states") {
    SpinGlassInstance inst(4, CouplingDistribution::plus_minus_j(), 0,
                           std::vector<double>(32, -1.0));
    GroundTruth truth = brute_force_ground(inst);
    CHECK(truth.energy == -32.0);
    CHECK(truth.degeneracy == 2);
    CHECK(inst.energy(truth.witness) == truth.energy);
}

TEST_CASE("fully frustrated 3x3 antiferromagnet cannot satisfy every bond") {
    SpinGlassInstance inst(3, CouplingDistribution::plus_minus_j(), 0,
                           std::vector<double>(18, 1.0));
    GroundTruth truth = brute_force_ground(inst);
    CHECK(truth.energy > -18.0);
}

TEST_CASE("matches the plain enumerator on seeded instances") {
    for (uint64_t seed : {11ull, 22ull, 33ull}) {
        SpinGlassInstance pmj =
            generate_instance(4, CouplingDistribution::plus_minus_j(), seed);
        GroundTruth fast = brute_force_ground(pmj);
        GroundTruth slow = plain_enumeration(pmj);
        CHECK(fast.energy == slow.energy);
        CHECK(fast.degeneracy == slow.degeneracy);
        CHECK(pmj.energy(fast.witness) == fast.energy);
    }
    SpinGlassInstance gauss = generate_instance(3, CouplingDistribution::gaussian(), 5);
    GroundTruth fast = brute_force_ground(gauss);
    GroundTruth slow = plain_enumeration(gauss);
    CHECK(fast.energy == doctest::Approx(slow.energy).epsilon(1e-12));
    CHECK(fast.degeneracy == slow.degeneracy);
}

TEST_CASE("partitioned enumeration agrees with the single-threaded scan") {
    SpinGlassInstance inst = generate_instance(4, CouplingDistribution::gaussian(), 404);
    GroundTruth one = brute_force_ground(inst, 1);
    GroundTruth four = brute_force_ground(inst, 4);
    CHECK(one.energy == four.energy);
    CHECK(one.degeneracy == four.degeneracy);
    CHECK(one.witness == four.witness);
}

TEST_CASE("degeneracy is even and pmj grounds are even integers") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        SpinGlassInstance inst =
            generate_instance(4, CouplingDistribution::plus_minus_j(), seed);
        GroundTruth truth = brute_force_ground(inst);
        CHECK(truth.degeneracy % 2 == 0);
        long long rounded = static_cast<long long>(std::llround(truth.energy));
        CHECK(static_cast<double>(rounded) == truth.energy);
        CHECK(rounded % 2 == 0);
    }
}

TEST_CASE("oracle bounds every hill-climb result") {
    SpinGlassInstance inst = generate_instance(5, CouplingDistribution::gaussian(), 2025);
    GroundTruth truth = brute_force_ground(inst);
    for (uint64_t seed = 0; seed < 50; ++seed) {
        ClimbResult r = hill_climb(inst, testutil::random_config(25, seed));
        CHECK(r.energy >= truth.energy - 1e-9);
    }
}

TEST_CASE("lattices beyond 26 spins are rejected with guidance") {
    SpinGlassInstance inst = generate_instance(8, CouplingDistribution::plus_minus_j(), 1);
    try {
        brute_force_ground(inst);
        FAIL("expected a too-large error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::too_large);
        CHECK(std::string(e.what()).find("N=64 > 26") != std::string::npos);
        CHECK(std::string(e.what()).find("ground_energy") != std::string::npos);
    }
}
