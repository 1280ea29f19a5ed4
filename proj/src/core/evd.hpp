#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"

namespace spinglass {

/// Extreme-value distribution parameters in the sign convention used
/// throughout this project: xi < 0 is the Frechet family (polynomially
/// decaying upper tail), xi = 0 is Gumbel, xi > 0 is Weibull. This is the
/// negation of the more common GEV convention, chosen so that fat-tailed
/// run-time distributions report negative shapes.
struct EvdParams {
    double location = 0.0; // mu
    double scale = 1.0;    // beta, > 0
    double shape = 0.0;    // xi

    /// Finite support endpoint: lower for xi < 0, upper for xi > 0.
    /// The support is all reals for xi = 0.
    double support_endpoint() const { return location + scale / shape; }
};

struct EvdFit {
    EvdParams params;
    double se_location = 0.0;
    double se_scale = 0.0;
    double se_shape = 0.0;
    double log_likelihood = 0.0;
    int sample_size = 0;
};

struct PowerLawFit {
    double exponent = 0.0; // slope of the log-log least-squares line
    double intercept = 0.0;
    double r_squared = 0.0;
    double se_exponent = 0.0;
};

/// H(x): the cumulative distribution. For xi != 0 the support is the open
/// half-line beyond support_endpoint(); below a Frechet lower endpoint the
/// value is 0 and above a Weibull upper endpoint it is 1. H(location) equals
/// exp(-1) for every shape.
double evd_cdf(const EvdParams& p, double x);

/// dH/dx; zero off-support.
double evd_pdf(const EvdParams& p, double x);

/// Sum of log densities (natural log); -infinity if any sample lies
/// off-support.
double evd_log_likelihood(const EvdParams& p, const std::vector<double>& samples);

/// Inverse of evd_cdf on u in (0,1).
double evd_quantile(const EvdParams& p, double u);

/// i.i.d. samples via inverse-transform sampling.
std::vector<double> sample_evd(const EvdParams& p, int count, Rng& rng);

/// Maximum-likelihood fit with standard errors from the numerically
/// differentiated observed information matrix. Requires >= 20 samples, not
/// all equal.
EvdFit fit_mle(const std::vector<double>& samples);

/// Whether the m-th moment exists: for xi < 0 (Frechet) this requires
/// |xi| < 1/m; Gumbel and Weibull have all moments.
bool moment_defined(double shape, int m);

/// (x - mu) / beta for each sample.
std::vector<double> normalize_samples(const std::vector<double>& samples, const EvdParams& p);

/// Least-squares line through (ln size, ln value); the slope is the
/// polynomial order. Requires >= 3 points, all values > 0.
PowerLawFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& values);

} // namespace spinglass
