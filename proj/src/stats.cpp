#include "diskperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace diskperc::stats {

double chi_square_survival(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), std::max(statistic, 0.0)));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }
double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

namespace {

// Greedy left-to-right pooling; a short remainder is merged into the last kept bin.
std::vector<std::size_t> pooling_cuts(std::span<const double> expected, double min_expected) {
    std::vector<std::size_t> ends;
    double acc = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        acc += expected[k];
        if (acc >= min_expected) {
            ends.push_back(k + 1);
            acc = 0.0;
        }
    }
    if (ends.empty()) ends.push_back(expected.size());
    else ends.back() = expected.size();
    return ends;
}

}  // namespace

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected, double min_expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    const auto ends = pooling_cuts(expected, min_expected);
    TestResult r;
    std::size_t begin = 0;
    for (std::size_t end : ends) {
        double o = 0.0, e = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            o += observed[k];
            e += expected[k];
        }
        if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
        begin = end;
    }
    r.dof = static_cast<int>(ends.size()) - 1;
    r.p_value = chi_square_survival(r.statistic, r.dof);
    return r;
}

TestResult poisson_gof(std::span<const std::int64_t> sample, double mean) {
    if (sample.empty()) throw std::invalid_argument("poisson_gof: empty sample");
    const auto top = static_cast<std::size_t>(*std::max_element(sample.begin(), sample.end()));
    std::vector<double> obs(top + 2, 0.0), expd(top + 2, 0.0);
    for (auto c : sample) obs[static_cast<std::size_t>(c)] += 1.0;
    const double R = static_cast<double>(sample.size());
    if (mean <= 0.0) {
        // degenerate law: everything must be zero
        TestResult r;
        r.p_value = top == 0 ? 1.0 : 0.0;
        return r;
    }
    const boost::math::poisson_distribution<double> pois(mean);
    for (std::size_t k = 0; k <= top; ++k) expd[k] = R * boost::math::pdf(pois, static_cast<double>(k));
    expd[top + 1] = R * boost::math::cdf(boost::math::complement(pois, static_cast<double>(top)));
    return chi_square_gof(obs, expd);
}

TestResult two_sample_chi_square(std::span<const double> a, std::span<const double> b, double min_expected) {
    if (a.size() != b.size()) throw std::invalid_argument("two_sample_chi_square: size mismatch");
    const double na = std::accumulate(a.begin(), a.end(), 0.0);
    const double nb = std::accumulate(b.begin(), b.end(), 0.0);
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("two_sample_chi_square: empty histogram");
    const double frac = std::min(na, nb) / (na + nb);
    std::vector<double> pooled(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) pooled[k] = (a[k] + b[k]) * frac;
    const auto ends = pooling_cuts(pooled, min_expected);

    TestResult r;
    std::size_t begin = 0;
    for (std::size_t end : ends) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            sa += a[k];
            sb += b[k];
        }
        const double tot = sa + sb;
        if (tot > 0.0) {
            const double ea = tot * na / (na + nb);
            const double eb = tot * nb / (na + nb);
            r.statistic += (sa - ea) * (sa - ea) / ea + (sb - eb) * (sb - eb) / eb;
        }
        begin = end;
    }
    r.dof = static_cast<int>(ends.size()) - 1;
    r.p_value = chi_square_survival(r.statistic, r.dof);
    return r;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double F = cdf(sample[k]);
        d = std::max({d, (static_cast<double>(k) + 1.0) / n - F, F - static_cast<double>(k) / n});
    }
    TestResult r;
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);  // Stephens' small-sample correction
    return r;
}

MeanVar mean_var(std::span<const double> xs) {
    MeanVar m;
    if (xs.empty()) return m;
    const double n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / (n - 1.0);
    m.stderr_mean = std::sqrt(m.variance / n);
    return m;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LogisticFit logistic_fit(std::span<const double> x, std::span<const std::int64_t> successes,
                         std::span<const std::int64_t> trials) {
    if (x.size() != successes.size() || x.size() != trials.size() || x.size() < 2)
        throw std::invalid_argument("logistic_fit: need >= 2 matched points");
    Eigen::Vector2d beta(0.0, 0.0);
    Eigen::Matrix2d info = Eigen::Matrix2d::Identity();
    LogisticFit fit;
    // Newton-Raphson with step halving on the log-likelihood.
    auto loglik = [&](const Eigen::Vector2d& bt) {
        double ll = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double eta = bt[0] + bt[1] * x[i];
            const double k = static_cast<double>(successes[i]);
            const double n = static_cast<double>(trials[i]);
            // log p = -log(1+e^{-eta}), log(1-p) = -log(1+e^{eta})
            ll += -k * std::log1p(std::exp(-eta)) - (n - k) * std::log1p(std::exp(eta));
        }
        return ll;
    };
    double ll = loglik(beta);
    for (int it = 0; it < 200; ++it) {
        Eigen::Vector2d grad = Eigen::Vector2d::Zero();
        info.setZero();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double eta = beta[0] + beta[1] * x[i];
            const double p = 1.0 / (1.0 + std::exp(-eta));
            const double n = static_cast<double>(trials[i]);
            const Eigen::Vector2d f(1.0, x[i]);
            grad += (static_cast<double>(successes[i]) - n * p) * f;
            info += n * p * (1 - p) * f * f.transpose();
        }
        Eigen::Vector2d step = (info + 1e-12 * Eigen::Matrix2d::Identity()).ldlt().solve(grad);
        double t = 1.0;
        Eigen::Vector2d next = beta + step;
        double ll_next = loglik(next);
        while (ll_next < ll - 1e-12 && t > 1e-6) {
            t *= 0.5;
            next = beta + t * step;
            ll_next = loglik(next);
        }
        beta = next;
        const double gain = ll_next - ll;
        ll = ll_next;
        if (std::abs(gain) < 1e-12 && step.norm() * t < 1e-10) {
            fit.converged = true;
            break;
        }
    }
    fit.slope = beta[1];
    if (beta[1] == 0.0) return fit;
    fit.midpoint = -beta[0] / beta[1];
    const Eigen::Matrix2d cov = info.inverse();
    // d(-a/b) = (-1/b, a/b^2)
    const Eigen::Vector2d g(-1.0 / beta[1], beta[0] / (beta[1] * beta[1]));
    fit.midpoint_stderr = std::sqrt(std::max(0.0, g.dot(cov * g)));
    fit.midpoint_ci = {fit.midpoint - 1.959963984540054 * fit.midpoint_stderr,
                       fit.midpoint + 1.959963984540054 * fit.midpoint_stderr};
    return fit;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

}  // namespace diskperc::stats
