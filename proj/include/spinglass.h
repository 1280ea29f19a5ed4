/* spinglass: 2D Ising spin glass instances, a hybrid Bayesian-network
 * optimizer with deterministic local search, an exhaustive ground-state
 * solver, the population-sizing experiment harness, and extreme-value
 * statistics for the resulting run-time distributions.
 *
 * All functions returning sg_status set a thread-local message retrievable
 * through sg_last_error() on failure. Handles are opaque; every sg_*_new /
 * sg_*_create result must be released with the matching sg_*_free.
 */

#ifndef SPINGLASS_H
#define SPINGLASS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
    SG_OK = 0,
    SG_ERR_INVALID_ARGUMENT = 1, /* bad parameter or precondition */
    SG_ERR_PARSE = 2,            /* malformed file or config text */
    SG_ERR_TOO_LARGE = 3,        /* lattice beyond the exhaustive-solver bound */
    SG_ERR_IO = 4,               /* file system failure */
    SG_ERR_NO_TARGET = 5,        /* ground energy required but unavailable */
    SG_ERR_SEARCH_FAILED = 6,    /* optimizer or fitter did not converge */
    SG_ERR_INTERNAL = 7
} sg_status;

/* Thread-local message describing the most recent failure in this thread. */
const char* sg_last_error(void);

/* ------------------------------------------------------------------ */
/* instances                                                          */
/* ------------------------------------------------------------------ */

typedef struct sg_instance sg_instance;

/* dist is "pmj", "gauss" or "mix"; mu_tilde is read for "mix" only and must
 * lie in [0,1]. side must be >= 3. Equal arguments always reproduce the same
 * couplings. */
sg_status sg_instance_generate(int side, const char* dist, double mu_tilde, uint64_t seed,
                               sg_instance** out);

sg_status sg_instance_read_file(const char* path, sg_instance** out);
sg_status sg_instance_write_file(const sg_instance* inst, const char* path);
sg_status sg_instance_parse(const char* text, sg_instance** out);
/* Serialized instance text; free with sg_string_free. */
sg_status sg_instance_to_string(const sg_instance* inst, char** out_text);

void sg_instance_free(sg_instance* inst);
void sg_string_free(char* text);

int sg_instance_side(const sg_instance* inst);
int sg_instance_num_spins(const sg_instance* inst);
int sg_instance_num_edges(const sg_instance* inst);
uint64_t sg_instance_seed(const sg_instance* inst);
/* "pmj", "gauss" or "mix" */
const char* sg_instance_dist(const sg_instance* inst);
double sg_instance_mu_tilde(const sg_instance* inst);
int sg_instance_has_ground_energy(const sg_instance* inst);
double sg_instance_ground_energy(const sg_instance* inst);
sg_status sg_instance_set_ground_energy(sg_instance* inst, double energy);
/* Endpoints and strength of edge e in the canonical edge order. */
sg_status sg_instance_edge(const sg_instance* inst, int e, int* i, int* j, double* coupling);

/* Inserts or replaces the ground_energy line of an instance file in place. */
sg_status sg_instance_annotate_file(const char* path, double ground_energy);

/* spins: num_spins entries, each +1 or -1 */
sg_status sg_energy(const sg_instance* inst, const int8_t* spins, int num_spins,
                    double* out_energy);
sg_status sg_delta_energy(const sg_instance* inst, const int8_t* spins, int num_spins,
                          int flip_index, double* out_delta);

/* ------------------------------------------------------------------ */
/* local search and exhaustive ground states                          */
/* ------------------------------------------------------------------ */

/* Steepest-descent single-flip hill climber. spins is refined in place and
 * ends in a strict local optimum. */
sg_status sg_hill_climb(const sg_instance* inst, int8_t* spins, int num_spins,
                        uint64_t* out_flips, double* out_energy);

/* Exact minimum over all configurations; N = side^2 must be <= 26.
 * out_witness may be NULL; otherwise it receives num_spins entries.
 * jobs <= 0 selects single-threaded operation. */
sg_status sg_brute_force_ground(const sg_instance* inst, int jobs, double* out_energy,
                                uint64_t* out_degeneracy, int8_t* out_witness);

/* ------------------------------------------------------------------ */
/* optimizer runs                                                     */
/* ------------------------------------------------------------------ */

typedef struct sg_run_metrics {
    uint64_t evaluations; /* E_G: candidate configurations examined */
    uint64_t flips;       /* E_L: total hill-climber flips */
    int found;
    double best_energy;
    uint32_t generations;
} sg_run_metrics;

/* max_generations 0 means "number of spins". max_evaluations 0 means 10^7. */
sg_status sg_hboa_run(const sg_instance* inst, int pop_size, double target_energy,
                      uint64_t max_evaluations, uint32_t max_generations, uint64_t seed,
                      sg_run_metrics* out);

/* (1+1) evolution strategy baseline; E_L is always 0. */
sg_status sg_one_plus_one_run(const sg_instance* inst, double target_energy,
                              uint64_t max_evaluations, uint64_t seed, sg_run_metrics* out);

/* ------------------------------------------------------------------ */
/* population sizing and per-instance measurement                     */
/* ------------------------------------------------------------------ */

typedef struct sg_bisection sg_bisection;

sg_status sg_bisect_population(const sg_instance* inst, double target_energy,
                               uint64_t max_evaluations, uint32_t max_generations,
                               uint64_t seed, sg_bisection** out);
int sg_bisection_minimal_pop(const sg_bisection* b);
int sg_bisection_num_probes(const sg_bisection* b);
void sg_bisection_probe(const sg_bisection* b, int index, int* pop_size, int* successes);
void sg_bisection_interval(const sg_bisection* b, int* low, int* high);
void sg_bisection_free(sg_bisection* b);

typedef struct sg_measurement {
    int minimal_pop;
    uint64_t median_e_g; /* medians over the 10 confirmation runs */
    uint64_t median_e_l;
    double best_energy;
} sg_measurement;

/* Bisection plus 10 confirmation runs at the minimal population. */
sg_status sg_measure_instance(const sg_instance* inst, double target_energy,
                              uint64_t max_evaluations, uint32_t max_generations,
                              uint64_t seed, sg_measurement* out);

/* Best energy found by a few generously sized optimizer runs (not verified). */
sg_status sg_estimate_ground_energy(const sg_instance* inst, uint64_t max_evaluations,
                                    uint64_t seed, double* out_energy);

/* ------------------------------------------------------------------ */
/* batch experiments                                                  */
/* ------------------------------------------------------------------ */

typedef struct sg_batch_spec {
    const int* sides;        /* lattice sides, one cell per (side, mu) pair */
    int num_sides;
    const char* dist;        /* "pmj", "gauss" or "mix" */
    const double* mu_tildes; /* mixture only; may be NULL otherwise */
    int num_mu_tildes;
    int count;               /* instances per cell */
    uint64_t seed;
    int jobs;                /* <= 1: sequential */
    uint64_t max_evaluations; /* 0: 10^7 */
    uint32_t max_generations; /* 0: number of spins */
    const char* ground_dir;   /* may be NULL: directory of annotated instances */
    int estimate_ground;      /* allow best-found targets for large lattices */
} sg_batch_spec;

/* Runs the full protocol per instance and writes the results CSV
 * (instance_id,L,dist,mu_tilde,minimal_pop,E_G,E_L,best_energy,verified)
 * to out_csv_path. Instances that cannot be processed are reported in the
 * error listing and skipped; the batch continues. verbose != 0 prints one
 * progress line per instance to stderr. Identical specs produce
 * byte-identical files. */
sg_status sg_batch_run(const sg_batch_spec* spec, const char* out_csv_path, int verbose,
                       int* out_num_records, char** out_error_listing);

/* Same, but the spec comes as key=value text (keys L, dist, mu_tilde, count,
 * seed, jobs, max_evals, ground_dir, estimate_ground, out). */
sg_status sg_batch_run_config(const char* config_text, const char* out_csv_path, int verbose,
                              int* out_num_records, char** out_error_listing);

/* ------------------------------------------------------------------ */
/* extreme-value statistics                                           */
/* ------------------------------------------------------------------ */

/* Shape convention: xi < 0 is the fat-tailed (Frechet) family, xi = 0 Gumbel,
 * xi > 0 Weibull — the negation of the common GEV convention. */

typedef struct sg_evd_fit {
    double location, scale, shape;
    double se_location, se_scale, se_shape;
    double log_likelihood;
    int sample_size;
} sg_evd_fit;

sg_status sg_evd_cdf(double location, double scale, double shape, double x, double* out);
sg_status sg_evd_pdf(double location, double scale, double shape, double x, double* out);
sg_status sg_evd_quantile(double location, double scale, double shape, double u, double* out);
sg_status sg_evd_log_likelihood(double location, double scale, double shape,
                                const double* samples, int count, double* out);
sg_status sg_evd_sample(double location, double scale, double shape, int count, uint64_t seed,
                        double* out_samples);
/* Requires count >= 20 and at least two distinct values. */
sg_status sg_evd_fit_mle(const double* samples, int count, sg_evd_fit* out);
/* 1 if the m-th moment exists (for xi < 0 that means |xi| < 1/m), else 0. */
int sg_evd_moment_defined(double shape, int m);

typedef struct sg_power_law_fit {
    double exponent;
    double intercept;
    double r_squared;
    double se_exponent;
} sg_power_law_fit;

/* Least-squares line through (ln size, ln value); count >= 3, all inputs > 0. */
sg_status sg_fit_power_law(const double* sizes, const double* values, int count,
                           sg_power_law_fit* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPINGLASS_H */
