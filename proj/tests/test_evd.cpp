#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/evd.hpp"
#include "test_util.hpp"

using namespace spinglass;

TEST_CASE("the CDF at the location equals exp(-1) for every shape") {
    for (double xi : {-0.5, -0.1, 0.0, 0.3, 0.8}) {
        EvdParams p{10.0, 2.0, xi};
        CHECK(evd_cdf(p, 10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
}

TEST_CASE("Gumbel values") {
    EvdParams p{0.0, 1.0, 0.0};
    CHECK(evd_cdf(p, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(evd_pdf(p, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("fat-tailed branch evaluates the closed form") {
    // xi = -0.5: support starts at mu - beta/0.5 = -2; at x = 3 the inner
    // term is 1 + 0.5*3 = 2.5 and H = exp(-2.5^-2)
    EvdParams p{0.0, 1.0, -0.5};
    CHECK(evd_cdf(p, 3.0) == doctest::Approx(std::exp(-std::pow(2.5, -2.0))).epsilon(1e-12));
    CHECK(evd_cdf(p, -2.0) == 0.0);
    CHECK(evd_cdf(p, -2.5) == 0.0);
    CHECK(evd_pdf(p, -2.5) == 0.0);
    CHECK(p.support_endpoint() == doctest::Approx(-2.0));

    // Weibull branch: bounded above, value 1 beyond the endpoint
    EvdParams w{0.0, 1.0, 0.5};
    CHECK(w.support_endpoint() == doctest::Approx(2.0));
    CHECK(evd_cdf(w, 2.5) == 1.0);
    CHECK(evd_pdf(w, 2.5) == 0.0);
}

TEST_CASE("CDF is monotone and spans (0,1)") {
    for (double xi : {-0.6, -0.2, 0.0, 0.4}) {
        EvdParams p{5.0, 3.0, xi};
        double prev = -1.0;
        for (double x = -40.0; x <= 400.0; x += 0.5) {
            double h = evd_cdf(p, x);
            CHECK(h >= prev - 1e-15);
            CHECK(h >= 0.0);
            CHECK(h <= 1.0);
            prev = h;
        }
    }
}

TEST_CASE("pdf is the derivative of the CDF") {
    for (double xi : {-0.4, 0.0, 0.3}) {
        EvdParams p{0.0, 1.5, xi};
        for (double x : {-1.0, 0.0, 0.7, 2.4, 6.0}) {
            if (xi != 0.0) {
                double endpoint = p.support_endpoint();
                if (xi < 0 && x <= endpoint + 0.2)
                    continue;
                if (xi > 0 && x >= endpoint - 0.2)
                    continue;
            }
            double h = 1e-6;
            double numeric = (evd_cdf(p, x + h) - evd_cdf(p, x - h)) / (2.0 * h);
            CHECK(evd_pdf(p, x) == doctest::Approx(numeric).epsilon(1e-6));
        }
    }
}

namespace {

// composite Simpson on a quantile-spaced grid (knots follow the mass)
double simpson_between_quantiles(const EvdParams& p, double u_lo, double u_hi, int n) {
    double integral = 0.0;
    double x_left = evd_quantile(p, u_lo);
    double f_left = evd_pdf(p, x_left);
    for (int i = 1; i <= n; ++i) {
        double u = u_lo + (u_hi - u_lo) * i / n;
        double x_right = evd_quantile(p, u);
        double f_right = evd_pdf(p, x_right);
        double f_mid = evd_pdf(p, 0.5 * (x_left + x_right));
        integral += (x_right - x_left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        x_left = x_right;
        f_left = f_right;
    }
    return integral;
}

} // namespace

TEST_CASE("density integrates to one over the support") {
    EvdParams p{0.0, 1.0, -0.4};
    // steep lower shoulder and body on quantile grids; the far fat tail in
    // the substituted variable y = 1/x where the integrand is polynomial
    const double u_lo = 1e-9, u_mid = 1e-3, u_split = 0.99, u_hi = 1.0 - 1e-10;
    double shoulder = simpson_between_quantiles(p, u_lo, u_mid, 30000);
    double middle = simpson_between_quantiles(p, u_mid, u_split, 30000);

    double y_lo = 1.0 / evd_quantile(p, u_hi), y_hi = 1.0 / evd_quantile(p, u_split);
    const int steps = 30001;
    double h = (y_hi - y_lo) / (steps - 1);
    double tail = 0.0;
    for (int i = 0; i < steps; ++i) {
        double y = y_lo + i * h;
        double w = (i == 0 || i == steps - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        tail += w * evd_pdf(p, 1.0 / y) / (y * y);
    }
    tail *= h / 3.0;

    double clipped = u_lo + (1.0 - u_hi); // exact mass outside the grid
    CHECK(std::abs(shoulder + middle + tail + clipped - 1.0) < 1e-6);
}

TEST_CASE("tail decays as the stated power law") {
    // pdf(x) ~ x^-(1 - 1/xi): for xi = -0.5 the exponent is -3
    EvdParams p{0.0, 1.0, -0.5};
    double exponent = 1.0 - 1.0 / p.shape;
    double a = evd_pdf(p, 1e3) * std::pow(1e3, exponent);
    double b = evd_pdf(p, 1e4) * std::pow(1e4, exponent);
    CHECK(std::abs(a / b - 1.0) < 0.05);
}

TEST_CASE("off-support samples sink the log-likelihood") {
    EvdParams p{0.0, 1.0, -0.5};
    std::vector<double> ok{0.0, 1.0, 5.0};
    CHECK(std::isfinite(evd_log_likelihood(p, ok)));
    std::vector<double> bad{0.0, -3.0};
    CHECK(evd_log_likelihood(p, bad) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("scale must be positive") {
    EvdParams p{0.0, 0.0, -0.2};
    CHECK_THROWS_AS(evd_cdf(p, 1.0), Error);
    CHECK_THROWS_AS(evd_pdf(p, 1.0), Error);
    CHECK_THROWS_AS(evd_quantile(p, 0.5), Error);
    CHECK_THROWS_AS(normalize_samples({1.0}, p), Error);
}

TEST_CASE("quantile inverts the CDF") {
    for (double xi : {-0.5, -0.1, 0.0, 0.4}) {
        EvdParams p{3.0, 2.0, xi};
        for (double u : {1e-6, 0.1, std::exp(-1.0), 0.5, 0.9, 1.0 - 1e-6}) {
            double x = evd_quantile(p, u);
            CHECK(evd_cdf(p, x) == doctest::Approx(u).epsilon(1e-9));
        }
        CHECK(evd_quantile(p, std::exp(-1.0)) == doctest::Approx(3.0).epsilon(1e-12));
    }
    // Gumbel inverse: mu - beta * ln(-ln u)
    EvdParams g{1.0, 2.0, 0.0};
    for (double u : {0.2, 0.7}) {
        CHECK(evd_quantile(g, u) ==
              doctest::Approx(1.0 - 2.0 * std::log(-std::log(u))).epsilon(1e-12));
    }
}

TEST_CASE("sampling matches the distribution (KS at the 1% level)") {
    EvdParams p{2.0, 1.5, -0.3};
    Rng rng(2718);
    std::vector<double> samples = sample_evd(p, 100000, rng);
    double d = testutil::ks_one_sample(samples, [&](double x) { return evd_cdf(p, x); });
    CHECK(d < 0.01);
}

TEST_CASE("sampling is deterministic per seed") {
    EvdParams p{0.0, 1.0, -0.2};
    Rng a(9), b(9);
    CHECK(sample_evd(p, 100, a) == sample_evd(p, 100, b));
}

TEST_CASE("MLE recovers synthetic parameters") {
    // the inverse-CDF sampler is the independent oracle here
    EvdParams truth{100.0, 20.0, -0.4};
    Rng rng(123456);
    std::vector<double> samples = sample_evd(truth, 100000, rng);
    EvdFit fit = fit_mle(samples);
    CHECK(std::abs(fit.params.location - truth.location) / truth.location < 0.02);
    CHECK(std::abs(fit.params.scale - truth.scale) / truth.scale < 0.02);
    CHECK(std::abs(fit.params.shape - truth.shape) < 0.03);
    CHECK(fit.se_location > 0.0);
    CHECK(fit.se_scale > 0.0);
    CHECK(fit.se_shape > 0.0);
    CHECK(std::isfinite(fit.log_likelihood));
    CHECK(fit.sample_size == 100000);
}

TEST_CASE("Gumbel data fits with a near-zero shape") {
    EvdParams truth{5.0, 2.0, 0.0};
    Rng rng(777);
    std::vector<double> samples = sample_evd(truth, 100000, rng);
    EvdFit fit = fit_mle(samples);
    CHECK(std::abs(fit.params.shape) <= 0.05);
}

TEST_CASE("fit preconditions") {
    std::vector<double> few(19, 0.0);
    for (size_t i = 0; i < few.size(); ++i)
        few[i] = static_cast<double>(i);
    CHECK_THROWS_AS(fit_mle(few), Error);
    std::vector<double> flat(50, 3.0);
    CHECK_THROWS_AS(fit_mle(flat), Error);
}

TEST_CASE("fit/sample round trip stays within three standard errors") {
    EvdParams truth{50.0, 10.0, -0.35};
    int good_shape = 0, good_location = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(31337, "roundtrip/" + std::to_string(t)));
        std::vector<double> samples = sample_evd(truth, 2000, rng);
        EvdFit fit = fit_mle(samples);
        if (std::abs(fit.params.shape - truth.shape) <= 3.0 * fit.se_shape)
            ++good_shape;
        if (std::abs(fit.params.location - truth.location) <= 3.0 * fit.se_location)
            ++good_location;
    }
    CHECK(good_shape >= 19);
    CHECK(good_location >= 19);
}

TEST_CASE("moment existence criterion") {
    CHECK(moment_defined(-0.4, 2));
    CHECK_FALSE(moment_defined(-0.6, 2));
    CHECK(moment_defined(-0.6, 1)); // mean exists, variance does not
    CHECK_FALSE(moment_defined(-0.5, 2));
    CHECK(moment_defined(0.0, 1));
    CHECK(moment_defined(0.0, 7));
    CHECK(moment_defined(0.7, 4)); // bounded-tail branch keeps all moments
    CHECK_THROWS_AS(moment_defined(-0.4, 0), Error);
}

TEST_CASE("second moment stabilizes iff it exists") {
    auto second_moment_ratio = [](double xi) {
        EvdParams p{0.0, 1.0, xi};
        Rng rng(derive_seed(45, "moments"));
        double sum = 0.0;
        double at_1e4 = 0.0, at_1e6 = 0.0;
        for (int i = 1; i <= 1000000; ++i) {
            double x = evd_quantile(p, rng.next_open_unit());
            sum += x * x;
            if (i == 10000)
                at_1e4 = sum / i;
            else if (i == 1000000)
                at_1e6 = sum / i;
        }
        return at_1e6 / at_1e4;
    };
    CHECK(std::abs(second_moment_ratio(-0.4) - 1.0) <= 0.10);
    CHECK(std::abs(second_moment_ratio(-0.6) - 1.0) > 0.10);
}

TEST_CASE("normalization") {
    EvdParams p{10.0, 2.0, -0.3};
    CHECK(normalize_samples({10.0}, p) == std::vector<double>{0.0});
    CHECK(normalize_samples({14.0}, p) == std::vector<double>{2.0});

    // refitting normalized samples lands near (0, 1, same shape)
    Rng rng(5150);
    std::vector<double> samples = sample_evd(p, 20000, rng);
    EvdFit fit = fit_mle(samples);
    std::vector<double> normalized = normalize_samples(samples, fit.params);
    EvdFit refit = fit_mle(normalized);
    CHECK(std::abs(refit.params.location) <= 2.0 * refit.se_location + 1e-6);
    CHECK(std::abs(refit.params.scale - 1.0) <= 2.0 * refit.se_scale + 1e-6);
    CHECK(std::abs(refit.params.shape - fit.params.shape) <= 0.02);
}

TEST_CASE("power-law fit on exact data") {
    std::vector<double> sizes{36, 64, 100, 144};
    std::vector<double> values;
    for (double n : sizes)
        values.push_back(std::pow(n, 1.5));
    PowerLawFit fit = fit_power_law(sizes, values);
    CHECK(fit.exponent == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.se_exponent == doctest::Approx(0.0).epsilon(1e-9));

    for (size_t i = 0; i < values.size(); ++i)
        values[i] = 7.5 * sizes[i] * sizes[i];
    PowerLawFit quad = fit_power_law(sizes, values);
    CHECK(quad.exponent == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("power-law fit preconditions") {
    CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 2}), Error);
    CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, -2, 3}), Error);
    CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, 2}), Error);
}
