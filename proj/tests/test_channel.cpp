#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pes/channel.hpp"
#include "pes/model.hpp"
#include "pes/quadrature.hpp"
#include "pes/rng.hpp"
#include "support/stats.hpp"

using namespace pes;

TEST_CASE("density spot values")
{
    // Evaluated externally at 30 digits from the closed form
    // (2/s2) sqrt(y/x) exp(-2(x+y)/s2) I1(4 sqrt(xy)/s2).
    struct Ref {
        double y, x, s2, value;
    };
    const Ref refs[] = {
        {1.0, 1.0, 0.1, 1.2496445814888412},
        {0.5, 1.0, 0.1, 0.1882166164933097},
        {2.0, 1.0, 0.5, 0.32624428474072041},
        {0.3, 0.0, 0.2, 1.4936120510359185},
        {1.2, 0.8, 0.05, 0.43636440287400317},
        {1.0, 1.0, 0.001, 12.614479799311011},
    };
    for (const Ref& r : refs) {
        CAPTURE(r.y);
        CAPTURE(r.x);
        CHECK(channel_density(r.y, Eigenvalue{r.x}, ChannelParams{r.s2}) ==
              doctest::Approx(r.value).epsilon(1e-12));
    }
}

TEST_CASE("log density agrees with the density and survives deep tails")
{
    const ChannelParams params{0.05};
    for (const double y : {0.01, 0.4, 1.0, 2.5}) {
        const double lin = channel_density(y, Eigenvalue{0.9}, params);
        const double lg = channel_log_density(y, Eigenvalue{0.9}, params);
        CHECK(std::exp(lg) == doctest::Approx(lin).epsilon(1e-12));
    }
    // Far tail: the linear density underflows to zero but the log form
    // stays finite and strongly negative.
    const double lg_tail = channel_log_density(30.0, Eigenvalue{0.1}, ChannelParams{0.002});
    CHECK(std::isfinite(lg_tail));
    CHECK(lg_tail < -1e4);
    CHECK(channel_log_density(0.0, Eigenvalue{1.0}, params) ==
          -std::numeric_limits<double>::infinity());
    CHECK(channel_density(0.0, Eigenvalue{1.0}, params) == 0.0);
}

TEST_CASE("zero eigenvalue limit")
{
    const ChannelParams params{0.2};
    for (const double y : {0.05, 0.2, 0.7}) {
        const double expect = 4.0 * y / (0.2 * 0.2) * std::exp(-2.0 * y / 0.2);
        CHECK(channel_density(y, Eigenvalue{0.0}, params) ==
              doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("density normalizes over the output axis")
{
    for (const double x : {0.0, 0.5, 1.0}) {
        for (const double s2 : {0.05, 0.3}) {
            const ChannelParams params{s2};
            const double hi = x + s2 + 30.0 * std::sqrt(x * s2 + s2 * s2);
            const auto r = integrate(
                [&](double y) { return channel_density(y, Eigenvalue{x}, params); }, 0.0, hi);
            CHECK(r.converged);
            CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("sampler moments match the law")
{
    // E = x + s2, Var = s2^2/2 + x s2.
    const ChannelParams params{0.1};
    const Eigenvalue x{0.8};
    std::mt19937_64 rng = stream_rng(42, 0, 0);
    std::vector<double> draws(200000);
    for (double& d : draws)
        d = channel_sample(x, params, rng);
    const double m = test_stats::mean(draws);
    const double v = test_stats::variance(draws);
    const double em = 0.8 + 0.1;
    const double ev = 0.1 * 0.1 / 2.0 + 0.8 * 0.1;
    CHECK(m == doctest::Approx(em).epsilon(0.005));
    CHECK(v == doctest::Approx(ev).epsilon(0.03));
    for (double d : draws)
        CHECK(d >= 0.0);
}

TEST_CASE("sampler tracks the density in distribution")
{
    // Light goodness-of-fit: 1e5 draws against equal-probability bins of
    // the density computed by quadrature.
    const ChannelParams params{0.15};
    const Eigenvalue x{0.6};
    constexpr std::size_t n = 100000;
    constexpr std::size_t bins = 40;

    const double hi = 0.6 + 0.15 + 30.0 * std::sqrt(0.6 * 0.15 + 0.15 * 0.15);
    std::vector<double> edges(bins + 1, 0.0);
    edges[bins] = hi;
    // Crude inverse-CDF by bisection on the integral for interior edges.
    for (std::size_t b = 1; b < bins; ++b) {
        const double target = static_cast<double>(b) / bins;
        double lo = 0.0, up = hi;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + up);
            const double c = integrate([&](double y) {
                                 return channel_density(y, x, params);
                             }, 0.0, mid).value;
            (c < target ? lo : up) = mid;
        }
        edges[b] = 0.5 * (lo + up);
    }

    std::vector<double> observed(bins, 0.0);
    std::mt19937_64 rng = stream_rng(7, 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = channel_sample(x, params, rng);
        const auto it = std::upper_bound(edges.begin(), edges.end(), d);
        const std::size_t b = std::min<std::size_t>(
            bins - 1, static_cast<std::size_t>(it - edges.begin()) - 1);
        observed[b] += 1.0;
    }
    const std::vector<double> expected(bins, static_cast<double>(n) / bins);
    const double stat = test_stats::chi2_statistic(observed, expected);
    const double p = test_stats::chi2_sf(stat, static_cast<double>(bins - 1));
    CHECK(p > 0.001);
}

TEST_CASE("sampler determinism and argument validation")
{
    const ChannelParams params{0.1};
    std::mt19937_64 a = stream_rng(9, 2, 3);
    std::mt19937_64 b = stream_rng(9, 2, 3);
    for (int i = 0; i < 16; ++i)
        CHECK(channel_sample(Eigenvalue{1.0}, params, a) ==
              channel_sample(Eigenvalue{1.0}, params, b));

    std::mt19937_64 rng = stream_rng(1, 0, 0);
    CHECK_THROWS(channel_sample(Eigenvalue{1.0}, ChannelParams{0.0}, rng));
    CHECK_THROWS(channel_density(-0.5, Eigenvalue{1.0}, params));
}
