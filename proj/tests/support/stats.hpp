#pragma once

// Shared statistics helpers for the test binaries: moments, chi-square
// survival function, and the two-sample Kolmogorov-Smirnov test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace test_stats {

inline double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v)
{
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// P(Chi2_dof > x)
inline double chi2_sf(double x, double dof)
{
    if (x <= 0.0)
        return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

// Pearson chi-square statistic against expected counts; bins with
// expectation below min_expected must have been merged by the caller.
inline double chi2_statistic(const std::vector<double>& observed,
                             const std::vector<double>& expected)
{
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi2_statistic: length mismatch");
    double t = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        t += d * d / expected[i];
    }
    return t;
}

inline double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// Asymptotic two-sided p-value with the Stephens small-sample correction;
// n_eff = n*m/(n+m) for the two-sample case.
inline double ks_pvalue(double d, double n_eff)
{
    const double rn = std::sqrt(n_eff);
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double sign = (k & 1) ? 1.0 : -1.0;
        sum += 2.0 * sign * std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
    }
    return std::clamp(sum, 0.0, 1.0);
}

}
