#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace diskperc::stats {

struct TestResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit; adjacent bins are pooled until each expected count is >= min_expected.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          double min_expected = 5.0);

/// Sample of nonnegative counts against Poisson(mean).
TestResult poisson_gof(std::span<const std::int64_t> sample, double mean);

/// Homogeneity of two histograms over the same bins.
TestResult two_sample_chi_square(std::span<const double> a, std::span<const double> b, double min_expected = 5.0);

/// One-sample Kolmogorov-Smirnov against a continuous cdf (asymptotic p-value).
TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
double kolmogorov_survival(double lambda);

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
};
MeanVar mean_var(std::span<const double> xs);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

struct LogisticFit {
    double midpoint = 0.0;       // x where p = 1/2
    double slope = 0.0;          // b; negative for decreasing curves
    double midpoint_stderr = 0.0;
    Interval midpoint_ci;        // 95% delta-method band
    bool converged = false;
};
/// Maximum-likelihood fit of p(x) = 1/(1+exp(-(a + b x))) to binomial data.
LogisticFit logistic_fit(std::span<const double> x, std::span<const std::int64_t> successes,
                         std::span<const std::int64_t> trials);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double normal_quantile(double p);
double normal_cdf(double x);
double chi_square_survival(double statistic, int dof);

}  // namespace diskperc::stats
