#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/hboa.hpp"
#include "core/instance.hpp"

namespace spinglass {

struct Probe {
    int pop_size = 0;
    int successes = 0; // out of 10; probing stops at the first failure
};

struct BisectionResult {
    int minimal_pop = 0; // upper end of the final interval, passed 10/10
    std::vector<Probe> probes;
    int interval_low = 0; // last failing size (equals high when 16 succeeds at once)
    int interval_high = 0;
};

/// Population-sizing search over an abstract probe: doubling from 16 until a
/// size wins all 10 runs, then bisection over even sizes until the interval
/// width is at most 10% of its upper end (or 2, the even-size floor).
BisectionResult bisect_minimal_population(const std::function<int(int)>& probe_successes);

/// Binds the probe to 10 independent optimizer runs per size.
BisectionResult bisect_population(const SpinGlassInstance& inst, double target_energy,
                                  const RunCaps& caps, uint64_t seed);

struct MeasureResult {
    BisectionResult bisection;
    uint64_t median_e_g = 0; // medians of the 10 confirmation runs
    uint64_t median_e_l = 0;
    double best_energy = 0.0;
};

/// Full per-instance protocol: bisection, then 10 fresh confirmation runs at
/// the minimal population. A confirmation failure triggers one bisection
/// retry; a second failure is an error.
MeasureResult measure_instance(const SpinGlassInstance& inst, double target_energy,
                               const RunCaps& caps, uint64_t seed);

/// Best energy found by a few generously sized optimizer runs; used as the
/// target for lattices too large for exhaustive search. The result is a
/// best-found value, not a verified ground energy.
double estimate_ground_energy(const SpinGlassInstance& inst, const RunCaps& caps,
                              uint64_t seed);

/// (1+1) evolution strategy baseline: one parent, offspring flips each bit
/// independently with probability 1/N and replaces the parent when not
/// worse. E_G counts offspring evaluations; E_L stays 0.
RunMetrics one_plus_one_run(const SpinGlassInstance& inst, double target_energy,
                            uint64_t max_evaluations, Rng& rng);

struct InstanceRecord {
    int instance_id = 0;
    int side = 0;
    CouplingDistribution dist;
    int minimal_pop = 0;
    uint64_t e_g = 0;
    uint64_t e_l = 0;
    double best_energy = 0.0;
    bool verified = false; // true when the target came from the oracle or a file
};

struct BatchSpec {
    std::vector<int> sides;
    CouplingKind kind = CouplingKind::PlusMinusJ;
    std::vector<double> mu_tildes; // mixture only
    int count = 0;                 // instances per (side, mu_tilde) cell
    uint64_t master_seed = 0;
    int jobs = 1;
    RunCaps caps;
    std::string ground_dir;      // optional: instance files carrying ground_energy
    bool estimate_ground = false; // allow best-found targets for large lattices
    std::string out_path;         // consumed by the CLI; empty means stdout
};

/// Plain key=value batch description: keys L, dist, mu_tilde, count, seed,
/// jobs, max_evals, ground_dir, estimate_ground, out. '#' starts a comment.
BatchSpec parse_batch_config(const std::string& text);

struct BatchResult {
    std::vector<InstanceRecord> records;      // in instance order
    std::vector<std::string> instance_errors; // instances skipped, with reasons
};

/// Runs the whole protocol over count instances per cell. Instance i of a
/// cell is generated with seed hash(master_seed, i); ground energies come
/// from ground_dir files, from the exhaustive solver when N <= 26, or from
/// best-found estimation when enabled — otherwise the instance is reported
/// in instance_errors and the batch continues. Results are deterministic and
/// ordered by instance index regardless of jobs.
BatchResult run_batch(const BatchSpec& spec, std::ostream* progress = nullptr);

std::string records_to_csv(const std::vector<InstanceRecord>& records);

/// Name of the ground_dir file consulted for a cell's instance.
std::string ground_file_name(int side, const CouplingDistribution& dist, int instance_id);

} // namespace spinglass
