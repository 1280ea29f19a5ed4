#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "core/error.hpp"
#include "core/harness.hpp"
#include "core/oracle.hpp"

using namespace spinglass;

namespace {

SpinGlassInstance ferro4() {
    return SpinGlassInstance(4, CouplingDistribution::plus_minus_j(), 0,
                             std::vector<double>(32, -1.0));
}

} // namespace

TEST_CASE("bisection interval logic against synthetic probes") {
    SUBCASE("immediate success pins the result at 16") {
        auto probe = [](int) { return 10; };
        BisectionResult r = bisect_minimal_population(probe);
        CHECK(r.minimal_pop == 16);
        CHECK(r.interval_low == 16);
        CHECK(r.interval_high == 16);
        REQUIRE(r.probes.size() == 1);
        CHECK(r.probes[0].pop_size == 16);
        CHECK(r.probes[0].successes == 10);
    }
    SUBCASE("threshold at 40: hand-traced probe sequence") {
        auto probe = [](int pop) { return pop >= 40 ? 10 : 4; };
        BisectionResult r = bisect_minimal_population(probe);
        // doubling: 16 F, 32 F, 64 S; bisection: 48 S, 40 S, 36 F -> (36, 40]
        CHECK(r.minimal_pop == 40);
        CHECK(r.interval_low == 36);
        CHECK(r.interval_high == 40);
        std::vector<int> pops;
        for (const Probe& p : r.probes)
            pops.push_back(p.pop_size);
        CHECK(pops == std::vector<int>{16, 32, 64, 48, 40, 36});
    }
    SUBCASE("threshold at 58 keeps probing until the ten-percent rule") {
        auto probe = [](int pop) { return pop >= 58 ? 10 : 0; };
        BisectionResult r = bisect_minimal_population(probe);
        CHECK(r.minimal_pop >= 58);
        CHECK(10 * (r.interval_high - r.interval_low) <=
              std::max(r.interval_high, 20)); // even-size floor below 20
        CHECK(r.interval_high == r.minimal_pop);
    }
    SUBCASE("the interval rule holds for every synthetic threshold") {
        for (int threshold : {18, 40, 100, 250, 1000, 5000}) {
            auto probe = [threshold](int pop) { return pop >= threshold ? 10 : 9; };
            BisectionResult r = bisect_minimal_population(probe);
            CHECK(r.minimal_pop >= threshold);
            CHECK(10 * (r.interval_high - r.interval_low) <=
                  std::max(r.interval_high, 20));
            // minimal_pop passed 10/10 and the lower end failed (when probed)
            CHECK(r.probes.back().pop_size >= 16);
            for (const Probe& p : r.probes)
                if (p.pop_size == r.minimal_pop)
                    CHECK(p.successes == 10);
        }
    }
    SUBCASE("a hopeless probe aborts the doubling phase") {
        auto probe = [](int) { return 0; };
        CHECK_THROWS_AS(bisect_minimal_population(probe), Error);
    }
}

TEST_CASE("ferromagnet bisects to the smallest population") {
    SpinGlassInstance inst = ferro4();
    BisectionResult r = bisect_population(inst, -32.0, RunCaps{}, 424242);
    CHECK(r.minimal_pop == 16);
}

TEST_CASE("bisection is reasonably stable across master seeds") {
    // stochastic sizing: rerunning with another seed stays within a factor
    // of two on at least 18 of 20 instances
    int stable = 0;
    const int instances = 20;
    for (int i = 0; i < instances; ++i) {
        SpinGlassInstance inst = generate_instance(
            5, CouplingDistribution::plus_minus_j(), derive_seed(900, std::to_string(i)));
        GroundTruth truth = brute_force_ground(inst);
        BisectionResult a = bisect_population(inst, truth.energy, RunCaps{}, 1111);
        BisectionResult b = bisect_population(inst, truth.energy, RunCaps{}, 2222);
        double ratio = static_cast<double>(std::max(a.minimal_pop, b.minimal_pop)) /
                       static_cast<double>(std::min(a.minimal_pop, b.minimal_pop));
        if (ratio <= 2.0)
            ++stable;
    }
    CHECK(stable >= 18);
}

TEST_CASE("measurement of the ferromagnet") {
    SpinGlassInstance inst = ferro4();
    MeasureResult m = measure_instance(inst, -32.0, RunCaps{}, 7);
    CHECK(m.bisection.minimal_pop == 16);
    CHECK(m.median_e_g == 16); // the initial population suffices
    CHECK(m.best_energy == -32.0);

    MeasureResult again = measure_instance(inst, -32.0, RunCaps{}, 7);
    CHECK(again.median_e_g == m.median_e_g);
    CHECK(again.median_e_l == m.median_e_l);
}

TEST_CASE("measured energies match the oracle on a seeded 5x5 batch") {
    for (uint64_t i = 0; i < 5; ++i) {
        SpinGlassInstance inst = generate_instance(
            5, CouplingDistribution::plus_minus_j(), derive_seed(3100, std::to_string(i)));
        GroundTruth truth = brute_force_ground(inst);
        MeasureResult m =
            measure_instance(inst, truth.energy, RunCaps{}, derive_seed(64, std::to_string(i)));
        CHECK(m.best_energy == truth.energy);
        CHECK(m.median_e_g >= 16);
    }
}

TEST_CASE("baseline solves the ferromagnet and respects caps") {
    SpinGlassInstance inst = ferro4();
    Rng rng(5);
    RunMetrics m = one_plus_one_run(inst, -32.0, 1000000, rng);
    CHECK(m.found);
    CHECK(m.best_energy == -32.0);
    CHECK(m.flips == 0);

    SpinGlassInstance hard = generate_instance(8, CouplingDistribution::plus_minus_j(), 1);
    Rng rng2(6);
    RunMetrics capped = one_plus_one_run(hard, -1e9, 1000, rng2);
    CHECK_FALSE(capped.found);
    CHECK(capped.evaluations == 1000);
    CHECK(std::isfinite(capped.best_energy));
}

TEST_CASE("estimated ground energies find the oracle value on small lattices") {
    for (uint64_t seed : {1ull, 2ull}) {
        SpinGlassInstance inst = generate_instance(4, CouplingDistribution::gaussian(), seed);
        GroundTruth truth = brute_force_ground(inst);
        double estimate = estimate_ground_energy(inst, RunCaps{}, 99);
        CHECK(estimate == doctest::Approx(truth.energy).epsilon(1e-9));
    }
}

TEST_CASE("batch config parsing") {
    BatchSpec spec = parse_batch_config("# comment line\n"
                                        "L = 4,5\n"
                                        "dist = mix\n"
                                        "mu_tilde = 0.6, 0.8\n"
                                        "count = 3\n"
                                        "seed = 99\n"
                                        "jobs = 2\n"
                                        "max_evals = 1e6\n"
                                        "estimate_ground = 1\n"
                                        "out = results.csv\n");
    CHECK(spec.sides == std::vector<int>{4, 5});
    CHECK(spec.kind == CouplingKind::Mixture);
    CHECK(spec.mu_tildes == std::vector<double>{0.6, 0.8});
    CHECK(spec.count == 3);
    CHECK(spec.master_seed == 99);
    CHECK(spec.jobs == 2);
    CHECK(spec.caps.max_evaluations == 1000000);
    CHECK(spec.estimate_ground);
    CHECK(spec.out_path == "results.csv");

    CHECK_THROWS_AS(parse_batch_config("bogus line\n"), Error);
    CHECK_THROWS_AS(parse_batch_config("unknown_key=3\n"), Error);
    CHECK_THROWS_AS(parse_batch_config("dist=triangular\n"), Error);
}

TEST_CASE("batch runs are reproducible and oracle-verified") {
    BatchSpec spec;
    spec.sides = {4};
    spec.kind = CouplingKind::PlusMinusJ;
    spec.count = 5;
    spec.master_seed = 7;

    BatchResult a = run_batch(spec);
    BatchResult b = run_batch(spec);
    REQUIRE(a.records.size() == 5);
    CHECK(a.instance_errors.empty());
    CHECK(records_to_csv(a.records) == records_to_csv(b.records));

    for (const InstanceRecord& r : a.records) {
        CHECK(r.verified);
        SpinGlassInstance inst =
            generate_instance(4, CouplingDistribution::plus_minus_j(),
                              derive_seed(7, "instance/" + std::to_string(r.instance_id)));
        GroundTruth truth = brute_force_ground(inst);
        CHECK(r.best_energy == truth.energy);
        CHECK(r.e_g > 0);
    }

    // two workers, same records in the same order
    spec.jobs = 2;
    BatchResult parallel = run_batch(spec);
    CHECK(records_to_csv(parallel.records) == records_to_csv(a.records));
}

TEST_CASE("large lattices without ground energies are reported, not fatal") {
    BatchSpec spec;
    spec.sides = {20};
    spec.kind = CouplingKind::PlusMinusJ;
    spec.count = 400;
    spec.master_seed = 3;

    BatchResult r = run_batch(spec);
    CHECK(r.records.empty());
    CHECK(r.instance_errors.size() == 400);
    CHECK(r.instance_errors[0].find("no ground energy") != std::string::npos);
}

TEST_CASE("ground_dir supplies targets for matching instances") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sg_ground_dir_test";
    fs::create_directories(dir);

    BatchSpec spec;
    spec.sides = {4};
    spec.kind = CouplingKind::Gaussian;
    spec.count = 2;
    spec.master_seed = 55;
    spec.ground_dir = dir.string();

    for (int i = 0; i < 2; ++i) {
        SpinGlassInstance inst =
            generate_instance(4, CouplingDistribution::gaussian(),
                              derive_seed(55, "instance/" + std::to_string(i)));
        GroundTruth truth = brute_force_ground(inst);
        inst.set_ground_energy(truth.energy);
        write_instance_file(inst,
                            (dir / ground_file_name(4, inst.distribution(), i)).string());
    }

    BatchResult r = run_batch(spec);
    REQUIRE(r.records.size() == 2);
    for (const InstanceRecord& rec : r.records)
        CHECK(rec.verified);
    fs::remove_all(dir);
}

TEST_CASE("csv shape") {
    InstanceRecord rec;
    rec.instance_id = 3;
    rec.side = 8;
    rec.dist = CouplingDistribution::mixture(0.8);
    rec.minimal_pop = 32;
    rec.e_g = 160;
    rec.e_l = 1200;
    rec.best_energy = -90.5;
    rec.verified = false;
    std::string csv = records_to_csv({rec});
    CHECK(csv == "instance_id,L,dist,mu_tilde,minimal_pop,E_G,E_L,best_energy,verified\n"
                 "3,8,mix,0.8,32,160,1200,-90.5,0\n");
}
