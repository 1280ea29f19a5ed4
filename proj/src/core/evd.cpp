#include "core/evd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/instance.hpp"
#include "core/nelder_mead.hpp"

namespace spinglass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShapeZero = 1e-12; // |xi| below this uses the Gumbel limit
constexpr double kEulerMascheroni = 0.57721566490153286;

void check_scale(double scale) {
    if (!(scale > 0.0))
        fail(Errc::invalid_argument, "scale must be > 0, got " + format_shortest(scale));
}

// Internally k = -xi is the common-convention GEV shape; k > 0 is the
// fat-tailed branch.
double log_pdf_one(double location, double scale, double shape, double x) {
    double z = (x - location) / scale;
    if (std::abs(shape) < kShapeZero)
        return -std::log(scale) - z - std::exp(-z);
    double k = -shape;
    double w = 1.0 + k * z;
    if (w <= 0.0)
        return -kInf;
    double lw = std::log(w);
    double t = std::exp(-lw / k);
    return -std::log(scale) - (1.0 + 1.0 / k) * lw - t;
}

} // namespace

double evd_cdf(const EvdParams& p, double x) {
    check_scale(p.scale);
    double z = (x - p.location) / p.scale;
    if (std::abs(p.shape) < kShapeZero)
        return std::exp(-std::exp(-z));
    double k = -p.shape;
    double w = 1.0 + k * z;
    if (w <= 0.0)
        return k > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::exp(-std::log(w) / k));
}

double evd_pdf(const EvdParams& p, double x) {
    check_scale(p.scale);
    double lp = log_pdf_one(p.location, p.scale, p.shape, x);
    return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

double evd_log_likelihood(const EvdParams& p, const std::vector<double>& samples) {
    check_scale(p.scale);
    double total = 0.0;
    for (double x : samples) {
        double lp = log_pdf_one(p.location, p.scale, p.shape, x);
        if (!std::isfinite(lp))
            return -kInf; // off-support
        total += lp;
    }
    return total;
}

double evd_quantile(const EvdParams& p, double u) {
    check_scale(p.scale);
    if (!(u > 0.0 && u < 1.0))
        fail(Errc::invalid_argument, "quantile argument must lie in (0,1)");
    double z;
    if (std::abs(p.shape) < kShapeZero) {
        z = -std::log(-std::log(u));
    } else {
        double k = -p.shape;
        z = (std::pow(-std::log(u), -k) - 1.0) / k;
    }
    return p.location + p.scale * z;
}

std::vector<double> sample_evd(const EvdParams& p, int count, Rng& rng) {
    check_scale(p.scale);
    if (count < 0)
        fail(Errc::invalid_argument, "sample count must be >= 0");
    std::vector<double> out(count);
    for (double& x : out)
        x = evd_quantile(p, rng.next_open_unit());
    return out;
}

bool moment_defined(double shape, int m) {
    if (m < 1)
        fail(Errc::invalid_argument, "moment order must be >= 1");
    if (shape >= 0.0)
        return true;
    return std::abs(shape) < 1.0 / m;
}

std::vector<double> normalize_samples(const std::vector<double>& samples, const EvdParams& p) {
    check_scale(p.scale);
    std::vector<double> out;
    out.reserve(samples.size());
    for (double x : samples)
        out.push_back((x - p.location) / p.scale);
    return out;
}

namespace {

// Penalized negative log-likelihood; the penalty slopes guide the simplex
// back to the feasible region.
double penalized_nll(const std::vector<double>& theta, const std::vector<double>& samples) {
    double location = theta[0], scale = theta[1], shape = theta[2];
    if (!(scale > 1e-12))
        return 1e12 * (1.0 + (1e-12 - scale));
    if (std::abs(shape) < kShapeZero) {
        double nll = 0.0;
        for (double x : samples) {
            double z = (x - location) / scale;
            nll += std::log(scale) + z + std::exp(-z);
        }
        return nll;
    }
    double k = -shape;
    double worst = kInf;
    for (double x : samples)
        worst = std::min(worst, 1.0 + k * (x - location) / scale);
    if (worst <= 1e-10)
        return 1e10 * (1.0 + (1e-10 - worst));
    double nll = 0.0;
    for (double x : samples) {
        double lw = std::log(1.0 + k * (x - location) / scale);
        nll += std::log(scale) + (1.0 + 1.0 / k) * lw + std::exp(-lw / k);
    }
    return nll;
}

// Observed information via central differences; returns false if the
// resulting 3x3 system cannot be inverted to a positive diagonal.
bool standard_errors(const std::vector<double>& theta, const std::vector<double>& samples,
                     double rel_step, double se[3]) {
    auto f = [&](const std::vector<double>& t) { return penalized_nll(t, samples); };
    double h[3];
    for (int i = 0; i < 3; ++i)
        h[i] = rel_step * std::max(std::abs(theta[i]), 0.1);

    double f0 = f(theta);
    double hess[3][3];
    for (int i = 0; i < 3; ++i) {
        std::vector<double> tp = theta, tm = theta;
        tp[i] += h[i];
        tm[i] -= h[i];
        hess[i][i] = (f(tp) - 2.0 * f0 + f(tm)) / (h[i] * h[i]);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            std::vector<double> tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[i] += h[i];
            tpp[j] += h[j];
            tpm[i] += h[i];
            tpm[j] -= h[j];
            tmp[i] -= h[i];
            tmp[j] += h[j];
            tmm[i] -= h[i];
            tmm[j] -= h[j];
            hess[i][j] = hess[j][i] =
                (f(tpp) - f(tpm) - f(tmp) + f(tmm)) / (4.0 * h[i] * h[j]);
        }
    }

    // invert via the adjugate
    double a = hess[0][0], b = hess[0][1], c = hess[0][2];
    double d = hess[1][1], e = hess[1][2], g = hess[2][2];
    double det = a * (d * g - e * e) - b * (b * g - e * c) + c * (b * e - d * c);
    if (!std::isfinite(det) || std::abs(det) < 1e-300)
        return false;
    double inv00 = (d * g - e * e) / det;
    double inv11 = (a * g - c * c) / det;
    double inv22 = (a * d - b * b) / det;
    if (!(inv00 > 0.0 && inv11 > 0.0 && inv22 > 0.0))
        return false;
    se[0] = std::sqrt(inv00);
    se[1] = std::sqrt(inv11);
    se[2] = std::sqrt(inv22);
    return std::isfinite(se[0]) && std::isfinite(se[1]) && std::isfinite(se[2]);
}

} // namespace

EvdFit fit_mle(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 20)
        fail(Errc::invalid_argument,
             "need at least 20 samples to fit, got " + std::to_string(n));
    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : samples)
        var += (x - mean) * (x - mean);
    var /= (n - 1);
    if (!(var > 0.0))
        fail(Errc::invalid_argument, "samples are all equal; nothing to fit");

    // Gumbel moment estimates seed the simplex; a mildly fat-tailed shape
    // keeps the start interior for run-time data.
    double beta0 = std::sqrt(var) * std::sqrt(6.0) / 3.14159265358979323846;
    double mu0 = mean - kEulerMascheroni * beta0;
    std::vector<double> start = {mu0, beta0, -0.1};

    auto objective = [&](const std::vector<double>& t) { return penalized_nll(t, samples); };

    std::vector<double> best = start;
    double best_value = objective(start);
    double step_scale = 1.0;
    bool converged = false;
    Rng restart_rng(derive_seed(0x5eedf17ull, "evd-fit-restarts"));
    for (int round = 0; round < 6; ++round) {
        std::vector<double> steps = {0.2 * beta0 * step_scale, 0.2 * beta0 * step_scale,
                                     0.08 * step_scale};
        SimplexResult r = nelder_mead(objective, best, steps, 1e-11, 4000);
        if (r.value < best_value - 1e-10) {
            best = r.point;
            best_value = r.value;
            step_scale = 1.0;
        } else if (r.converged) {
            best = r.point;
            best_value = r.value;
            converged = true;
            break;
        } else {
            // perturbed restart from an independent stream
            best = r.point;
            best_value = r.value;
            for (size_t i = 0; i < best.size(); ++i)
                best[i] *= 1.0 + 0.02 * (restart_rng.next_unit() - 0.5);
            if (best[1] <= 0.0)
                best[1] = beta0;
            step_scale *= 0.5;
        }
    }
    if (!converged && best_value >= 1e9)
        fail(Errc::search_failed, "maximum-likelihood fit did not converge: objective " +
                                      format_shortest(best_value) + " after restarts");

    EvdFit fit;
    fit.params = {best[0], best[1], best[2]};
    fit.log_likelihood = -best_value;
    fit.sample_size = n;
    if (!std::isfinite(fit.log_likelihood))
        fail(Errc::search_failed, "maximum-likelihood fit produced a non-finite likelihood");

    double se[3];
    if (!standard_errors(best, samples, 1e-4, se) && !standard_errors(best, samples, 1e-3, se))
        fail(Errc::search_failed,
             "observed information matrix is singular; standard errors unavailable");
    fit.se_location = se[0];
    fit.se_scale = se[1];
    fit.se_shape = se[2];
    return fit;
}

PowerLawFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& values) {
    const size_t n = sizes.size();
    if (n != values.size())
        fail(Errc::invalid_argument, "sizes and values must have equal length");
    if (n < 3)
        fail(Errc::invalid_argument, "need at least 3 points for a power-law fit");
    for (size_t i = 0; i < n; ++i)
        if (!(sizes[i] > 0.0) || !(values[i] > 0.0))
            fail(Errc::invalid_argument, "power-law fit requires positive sizes and values");

    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = std::log(sizes[i]);
        ys[i] = std::log(values[i]);
        sx += xs[i];
        sy += ys[i];
    }
    double xbar = sx / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    if (!(sxx > 0.0))
        fail(Errc::invalid_argument, "all sizes are equal; slope is undefined");

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = ybar - fit.exponent * xbar;
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double resid = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        rss += resid * resid;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.se_exponent = n > 2 ? std::sqrt(std::max(0.0, rss / (n - 2)) / sxx) : 0.0;
    return fit;
}

} // namespace spinglass
