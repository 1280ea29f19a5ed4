#include "spinglass.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/evd.hpp"
#include "core/harness.hpp"
#include "core/hboa.hpp"
#include "core/instance.hpp"
#include "core/local_search.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"

using namespace spinglass;

struct sg_instance {
    SpinGlassInstance impl;
};

struct sg_bisection {
    BisectionResult impl;
};

namespace {

thread_local std::string g_last_error;

sg_status to_status(Errc code) {
    switch (code) {
    case Errc::invalid_argument: return SG_ERR_INVALID_ARGUMENT;
    case Errc::parse: return SG_ERR_PARSE;
    case Errc::too_large: return SG_ERR_TOO_LARGE;
    case Errc::io: return SG_ERR_IO;
    case Errc::no_target: return SG_ERR_NO_TARGET;
    case Errc::search_failed: return SG_ERR_SEARCH_FAILED;
    case Errc::internal: return SG_ERR_INTERNAL;
    }
    return SG_ERR_INTERNAL;
}

template <typename Fn>
sg_status guarded(Fn&& fn) {
    try {
        fn();
        return SG_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SG_ERR_INTERNAL;
    }
}

sg_status invalid(const char* what) {
    g_last_error = what;
    return SG_ERR_INVALID_ARGUMENT;
}

CouplingDistribution make_distribution(const char* dist, double mu_tilde) {
    std::string name = dist ? dist : "";
    if (name == "pmj")
        return CouplingDistribution::plus_minus_j();
    if (name == "gauss")
        return CouplingDistribution::gaussian();
    if (name == "mix")
        return CouplingDistribution::mixture(mu_tilde);
    fail(Errc::invalid_argument, "unknown distribution '" + name + "' (use pmj, gauss or mix)");
}

SpinConfiguration to_config(const int8_t* spins, int num_spins) {
    return SpinConfiguration(spins, spins + num_spins);
}

RunCaps make_caps(uint64_t max_evaluations, uint32_t max_generations) {
    RunCaps caps;
    if (max_evaluations)
        caps.max_evaluations = max_evaluations;
    caps.max_generations = max_generations;
    return caps;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* sg_last_error(void) { return g_last_error.c_str(); }

sg_status sg_instance_generate(int side, const char* dist, double mu_tilde, uint64_t seed,
                               sg_instance** out) {
    if (!out)
        return invalid("out must not be NULL");
    return guarded([&] {
        *out = new sg_instance{generate_instance(side, make_distribution(dist, mu_tilde), seed)};
    });
}

sg_status sg_instance_read_file(const char* path, sg_instance** out) {
    if (!out || !path)
        return invalid("path and out must not be NULL");
    return guarded([&] { *out = new sg_instance{read_instance_file(path)}; });
}

sg_status sg_instance_write_file(const sg_instance* inst, const char* path) {
    if (!inst || !path)
        return invalid("inst and path must not be NULL");
    return guarded([&] { write_instance_file(inst->impl, path); });
}

sg_status sg_instance_parse(const char* text, sg_instance** out) {
    if (!out || !text)
        return invalid("text and out must not be NULL");
    return guarded([&] { *out = new sg_instance{parse_instance(text)}; });
}

sg_status sg_instance_to_string(const sg_instance* inst, char** out_text) {
    if (!inst || !out_text)
        return invalid("inst and out_text must not be NULL");
    return guarded([&] { *out_text = copy_string(write_instance(inst->impl)); });
}

void sg_instance_free(sg_instance* inst) { delete inst; }
void sg_string_free(char* text) { delete[] text; }

int sg_instance_side(const sg_instance* inst) { return inst ? inst->impl.side() : 0; }
int sg_instance_num_spins(const sg_instance* inst) {
    return inst ? inst->impl.num_spins() : 0;
}
int sg_instance_num_edges(const sg_instance* inst) {
    return inst ? inst->impl.num_edges() : 0;
}
uint64_t sg_instance_seed(const sg_instance* inst) { return inst ? inst->impl.seed() : 0; }

const char* sg_instance_dist(const sg_instance* inst) {
    if (!inst)
        return "";
    switch (inst->impl.distribution().kind) {
    case CouplingKind::PlusMinusJ: return "pmj";
    case CouplingKind::Gaussian: return "gauss";
    case CouplingKind::Mixture: return "mix";
    }
    return "";
}

double sg_instance_mu_tilde(const sg_instance* inst) {
    return inst ? inst->impl.distribution().mu_tilde : 0.0;
}

int sg_instance_has_ground_energy(const sg_instance* inst) {
    return inst && inst->impl.ground_energy() ? 1 : 0;
}

double sg_instance_ground_energy(const sg_instance* inst) {
    return inst && inst->impl.ground_energy() ? *inst->impl.ground_energy()
                                              : std::numeric_limits<double>::quiet_NaN();
}

sg_status sg_instance_set_ground_energy(sg_instance* inst, double energy) {
    if (!inst)
        return invalid("inst must not be NULL");
    inst->impl.set_ground_energy(energy);
    return SG_OK;
}

sg_status sg_instance_edge(const sg_instance* inst, int e, int* i, int* j, double* coupling) {
    if (!inst)
        return invalid("inst must not be NULL");
    return guarded([&] {
        int a = 0, b = 0;
        inst->impl.edge(e, a, b);
        if (i)
            *i = a;
        if (j)
            *j = b;
        if (coupling)
            *coupling = inst->impl.couplings()[e];
    });
}

sg_status sg_instance_annotate_file(const char* path, double ground_energy) {
    if (!path)
        return invalid("path must not be NULL");
    return guarded([&] { annotate_ground_energy_file(path, ground_energy); });
}

sg_status sg_energy(const sg_instance* inst, const int8_t* spins, int num_spins,
                    double* out_energy) {
    if (!inst || !spins || !out_energy)
        return invalid("inst, spins and out_energy must not be NULL");
    return guarded([&] { *out_energy = inst->impl.energy(to_config(spins, num_spins)); });
}

sg_status sg_delta_energy(const sg_instance* inst, const int8_t* spins, int num_spins,
                          int flip_index, double* out_delta) {
    if (!inst || !spins || !out_delta)
        return invalid("inst, spins and out_delta must not be NULL");
    return guarded(
        [&] { *out_delta = inst->impl.delta_energy(to_config(spins, num_spins), flip_index); });
}

sg_status sg_hill_climb(const sg_instance* inst, int8_t* spins, int num_spins,
                        uint64_t* out_flips, double* out_energy) {
    if (!inst || !spins)
        return invalid("inst and spins must not be NULL");
    return guarded([&] {
        ClimbResult r = hill_climb(inst->impl, to_config(spins, num_spins));
        std::memcpy(spins, r.config.data(), r.config.size());
        if (out_flips)
            *out_flips = r.flips;
        if (out_energy)
            *out_energy = r.energy;
    });
}

sg_status sg_brute_force_ground(const sg_instance* inst, int jobs, double* out_energy,
                                uint64_t* out_degeneracy, int8_t* out_witness) {
    if (!inst || !out_energy)
        return invalid("inst and out_energy must not be NULL");
    return guarded([&] {
        GroundTruth truth = brute_force_ground(inst->impl, jobs);
        *out_energy = truth.energy;
        if (out_degeneracy)
            *out_degeneracy = truth.degeneracy;
        if (out_witness)
            std::memcpy(out_witness, truth.witness.data(), truth.witness.size());
    });
}

sg_status sg_hboa_run(const sg_instance* inst, int pop_size, double target_energy,
                      uint64_t max_evaluations, uint32_t max_generations, uint64_t seed,
                      sg_run_metrics* out) {
    if (!inst || !out)
        return invalid("inst and out must not be NULL");
    return guarded([&] {
        Rng rng(seed);
        RunMetrics m = hboa_run(inst->impl, pop_size, target_energy,
                                make_caps(max_evaluations, max_generations), rng);
        *out = sg_run_metrics{m.evaluations, m.flips, m.found ? 1 : 0, m.best_energy,
                              m.generations};
    });
}

sg_status sg_one_plus_one_run(const sg_instance* inst, double target_energy,
                              uint64_t max_evaluations, uint64_t seed, sg_run_metrics* out) {
    if (!inst || !out)
        return invalid("inst and out must not be NULL");
    return guarded([&] {
        Rng rng(seed);
        RunMetrics m = one_plus_one_run(inst->impl, target_energy,
                                        max_evaluations ? max_evaluations : 10'000'000, rng);
        *out = sg_run_metrics{m.evaluations, m.flips, m.found ? 1 : 0, m.best_energy,
                              m.generations};
    });
}

sg_status sg_bisect_population(const sg_instance* inst, double target_energy,
                               uint64_t max_evaluations, uint32_t max_generations,
                               uint64_t seed, sg_bisection** out) {
    if (!inst || !out)
        return invalid("inst and out must not be NULL");
    return guarded([&] {
        *out = new sg_bisection{bisect_population(
            inst->impl, target_energy, make_caps(max_evaluations, max_generations), seed)};
    });
}

int sg_bisection_minimal_pop(const sg_bisection* b) { return b ? b->impl.minimal_pop : 0; }

int sg_bisection_num_probes(const sg_bisection* b) {
    return b ? static_cast<int>(b->impl.probes.size()) : 0;
}

void sg_bisection_probe(const sg_bisection* b, int index, int* pop_size, int* successes) {
    if (!b || index < 0 || index >= static_cast<int>(b->impl.probes.size()))
        return;
    if (pop_size)
        *pop_size = b->impl.probes[index].pop_size;
    if (successes)
        *successes = b->impl.probes[index].successes;
}

void sg_bisection_interval(const sg_bisection* b, int* low, int* high) {
    if (!b)
        return;
    if (low)
        *low = b->impl.interval_low;
    if (high)
        *high = b->impl.interval_high;
}

void sg_bisection_free(sg_bisection* b) { delete b; }

sg_status sg_measure_instance(const sg_instance* inst, double target_energy,
                              uint64_t max_evaluations, uint32_t max_generations,
                              uint64_t seed, sg_measurement* out) {
    if (!inst || !out)
        return invalid("inst and out must not be NULL");
    return guarded([&] {
        MeasureResult m = measure_instance(inst->impl, target_energy,
                                           make_caps(max_evaluations, max_generations), seed);
        *out = sg_measurement{m.bisection.minimal_pop, m.median_e_g, m.median_e_l,
                              m.best_energy};
    });
}

sg_status sg_estimate_ground_energy(const sg_instance* inst, uint64_t max_evaluations,
                                    uint64_t seed, double* out_energy) {
    if (!inst || !out_energy)
        return invalid("inst and out_energy must not be NULL");
    return guarded([&] {
        *out_energy = estimate_ground_energy(inst->impl, make_caps(max_evaluations, 0), seed);
    });
}

namespace {

sg_status run_batch_common(BatchSpec&& spec, const char* out_csv_path, int verbose,
                           int* out_num_records, char** out_error_listing) {
    return guarded([&] {
        BatchResult result = run_batch(spec, verbose ? &std::cerr : nullptr);
        std::ofstream out(out_csv_path, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::io, std::string("cannot open file for writing: ") + out_csv_path);
        out << records_to_csv(result.records);
        if (!out)
            fail(Errc::io, std::string("failed writing results: ") + out_csv_path);
        if (out_num_records)
            *out_num_records = static_cast<int>(result.records.size());
        if (out_error_listing) {
            std::string listing;
            for (const std::string& e : result.instance_errors) {
                listing += e;
                listing += '\n';
            }
            *out_error_listing = listing.empty() ? nullptr : copy_string(listing);
        }
    });
}

} // namespace

sg_status sg_batch_run(const sg_batch_spec* spec, const char* out_csv_path, int verbose,
                       int* out_num_records, char** out_error_listing) {
    if (!spec || !out_csv_path)
        return invalid("spec and out_csv_path must not be NULL");
    if (!spec->sides || spec->num_sides <= 0)
        return invalid("spec must name at least one lattice side");
    BatchSpec s;
    sg_status st = guarded([&] {
        s.sides.assign(spec->sides, spec->sides + spec->num_sides);
        s.kind = make_distribution(spec->dist, 0.5).kind;
        if (spec->mu_tildes && spec->num_mu_tildes > 0)
            s.mu_tildes.assign(spec->mu_tildes, spec->mu_tildes + spec->num_mu_tildes);
        s.count = spec->count;
        s.master_seed = spec->seed;
        s.jobs = spec->jobs;
        s.caps = make_caps(spec->max_evaluations, spec->max_generations);
        if (spec->ground_dir)
            s.ground_dir = spec->ground_dir;
        s.estimate_ground = spec->estimate_ground != 0;
    });
    if (st != SG_OK)
        return st;
    return run_batch_common(std::move(s), out_csv_path, verbose, out_num_records,
                            out_error_listing);
}

sg_status sg_batch_run_config(const char* config_text, const char* out_csv_path, int verbose,
                              int* out_num_records, char** out_error_listing) {
    if (!config_text || !out_csv_path)
        return invalid("config_text and out_csv_path must not be NULL");
    BatchSpec spec;
    sg_status st = guarded([&] { spec = parse_batch_config(config_text); });
    if (st != SG_OK)
        return st;
    return run_batch_common(std::move(spec), out_csv_path, verbose, out_num_records,
                            out_error_listing);
}

sg_status sg_evd_cdf(double location, double scale, double shape, double x, double* out) {
    if (!out)
        return invalid("out must not be NULL");
    return guarded([&] { *out = evd_cdf(EvdParams{location, scale, shape}, x); });
}

sg_status sg_evd_pdf(double location, double scale, double shape, double x, double* out) {
    if (!out)
        return invalid("out must not be NULL");
    return guarded([&] { *out = evd_pdf(EvdParams{location, scale, shape}, x); });
}

sg_status sg_evd_quantile(double location, double scale, double shape, double u, double* out) {
    if (!out)
        return invalid("out must not be NULL");
    return guarded([&] { *out = evd_quantile(EvdParams{location, scale, shape}, u); });
}

sg_status sg_evd_log_likelihood(double location, double scale, double shape,
                                const double* samples, int count, double* out) {
    if (!out || (!samples && count > 0))
        return invalid("samples and out must not be NULL");
    return guarded([&] {
        std::vector<double> data(samples, samples + count);
        *out = evd_log_likelihood(EvdParams{location, scale, shape}, data);
    });
}

sg_status sg_evd_sample(double location, double scale, double shape, int count, uint64_t seed,
                        double* out_samples) {
    if (!out_samples && count > 0)
        return invalid("out_samples must not be NULL");
    return guarded([&] {
        Rng rng(seed);
        std::vector<double> s = sample_evd(EvdParams{location, scale, shape}, count, rng);
        std::memcpy(out_samples, s.data(), s.size() * sizeof(double));
    });
}

sg_status sg_evd_fit_mle(const double* samples, int count, sg_evd_fit* out) {
    if (!samples || !out)
        return invalid("samples and out must not be NULL");
    return guarded([&] {
        std::vector<double> data(samples, samples + count);
        EvdFit fit = fit_mle(data);
        *out = sg_evd_fit{fit.params.location, fit.params.scale,  fit.params.shape,
                          fit.se_location,     fit.se_scale,      fit.se_shape,
                          fit.log_likelihood,  fit.sample_size};
    });
}

int sg_evd_moment_defined(double shape, int m) {
    if (m < 1)
        return 0;
    return moment_defined(shape, m) ? 1 : 0;
}

sg_status sg_fit_power_law(const double* sizes, const double* values, int count,
                           sg_power_law_fit* out) {
    if (!sizes || !values || !out)
        return invalid("sizes, values and out must not be NULL");
    return guarded([&] {
        std::vector<double> s(sizes, sizes + count), v(values, values + count);
        PowerLawFit fit = fit_power_law(s, v);
        *out = sg_power_law_fit{fit.exponent, fit.intercept, fit.r_squared, fit.se_exponent};
    });
}

} // extern "C"
