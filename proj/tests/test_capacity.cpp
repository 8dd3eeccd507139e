#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pes/capacity.hpp"
#include "pes/channel.hpp"
#include "pes/model.hpp"

using namespace pes;

namespace {

double total_variation(const InputDistribution& a, const InputDistribution& b)
{
    double tv = 0.0;
    for (std::size_t i = 0; i < a.probs.size(); ++i)
        tv += std::abs(a.probs[i] - b.probs[i]);
    return 0.5 * tv;
}

}

TEST_CASE("mutual information basics")
{
    const Constellation c = make_constellation({Eigenvalue{0.0}, Eigenvalue{1.0}}, Eigenvalue{1.0});
    const InputDistribution u = uniform_distribution(2);

    // Nearly noiseless: one full bit gets through.
    CHECK(mutual_information(u, c, ChannelParams{1e-4}) == doctest::Approx(1.0).epsilon(1e-6));
    // Heavy noise: well under a bit.
    CHECK(mutual_information(u, c, ChannelParams{20.0}) < 0.3);
    // Degenerate input carries nothing.
    CHECK(mutual_information(make_distribution({1.0, 0.0}), c, ChannelParams{0.1}) ==
          doctest::Approx(0.0).epsilon(1e-9));

    const DensityTable table(c, ChannelParams{0.1});
    CHECK(table.mutual_information(u) ==
          doctest::Approx(mutual_information(u, c, ChannelParams{0.1})).epsilon(1e-10));
}

TEST_CASE("divergences reconstruct the mutual information")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const ChannelParams params{0.25};
    const DensityTable table(c, params);
    const InputDistribution d = make_distribution({0.4, 0.3, 0.2, 0.1});
    const std::vector<double> div = table.divergences(d);
    REQUIRE(div.size() == 4);
    double mi_nats = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        mi_nats += d.probs[k] * div[k];
    CHECK(mi_nats / std::log(2.0) ==
          doctest::Approx(table.mutual_information(d)).epsilon(1e-9));
}

TEST_CASE("bit conditional entropy matches the symbol posterior for one-bit labels")
{
    const Constellation c = make_constellation({Eigenvalue{0.0}, Eigenvalue{0.9}}, Eigenvalue{0.9});
    const ChannelParams params{0.3};
    const DensityTable table(c, params);
    const InputDistribution d = make_distribution({0.6, 0.4});
    const std::vector<std::uint32_t> labels = {0u, 1u};
    const double hxy = entropy_bits(d) - table.mutual_information(d);
    CHECK(table.bit_conditional_entropy(d, labels, 0, 1) ==
          doctest::Approx(hxy).epsilon(1e-9));
}

TEST_CASE("time scaled mutual information definitions")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    const ChannelParams params{0.1};
    const InputDistribution d = make_distribution({0.1, 0.4, 0.3, 0.2});
    const double per_symbol = mutual_information(d, c, params);
    CHECK(time_scaled_mi(d, c, t, params) ==
          doctest::Approx(per_symbol / average_symbol_interval(d, t)).epsilon(1e-12));
    CHECK(uniform_time_scaled_mi(c, t, params) ==
          doctest::Approx(time_scaled_mi(uniform_distribution(4), c, t, params))
              .epsilon(1e-12));
}

TEST_CASE("noiseless closed form: golden ratio and a three-duration oracle")
{
    // Durations (1, 2): r is the golden ratio, rate log2(phi).
    PulseTiming t12;
    t12.delta = 0.005;
    t12.durations = {1.0, 2.0};
    const CapacityResult g = noiseless_capacity(t12);
    CHECK(g.converged);
    CHECK(g.rate == doctest::Approx(0.6942419136306173).epsilon(1e-12));
    CHECK(g.distribution.probs[0] == doctest::Approx(0.61803398874989485).epsilon(1e-12));
    CHECK(g.distribution.probs[1] == doctest::Approx(0.38196601125010515).epsilon(1e-12));

    // Durations (1, 2, 3): root of x + x^2 + x^3 = 1 in x = 1/r.
    PulseTiming t123;
    t123.delta = 0.005;
    t123.durations = {1.0, 2.0, 3.0};
    const CapacityResult h = noiseless_capacity(t123);
    CHECK(h.rate == doctest::Approx(0.87914642160663817).epsilon(1e-12));
    CHECK(h.distribution.probs[0] == doctest::Approx(0.54368901269207636).epsilon(1e-12));
    CHECK(h.distribution.probs[1] == doctest::Approx(0.29559774252208477).epsilon(1e-12));
    CHECK(h.distribution.probs[2] == doctest::Approx(0.16071324478583887).epsilon(1e-12));

    // Root identity and the entropy-rate identity hold to solver precision.
    double part = 0.0, hx = 0.0, tbar = 0.0;
    const double r = std::exp2(h.rate);
    for (std::size_t k = 0; k < 3; ++k) {
        part += std::pow(r, -t123.durations[k]);
        hx -= h.distribution.probs[k] * std::log2(h.distribution.probs[k]);
        tbar += h.distribution.probs[k] * t123.durations[k];
    }
    CHECK(std::abs(part - 1.0) < 1e-12);
    CHECK(hx / tbar == doctest::Approx(h.rate).epsilon(1e-12));
    CHECK(h.avg_interval == doctest::Approx(tbar).epsilon(1e-12));

    // Duplicate durations are rejected by default, accepted explicitly.
    PulseTiming dup;
    dup.delta = 0.005;
    dup.durations = {2.0, 1.0, 2.0};
    CHECK_THROWS(noiseless_capacity(dup));
    const CapacityResult d = noiseless_capacity(dup, true);
    CHECK(d.converged);
    CHECK(d.distribution.probs[0] == doctest::Approx(d.distribution.probs[2]).epsilon(1e-12));
}

TEST_CASE("optimizer approaches the noiseless law at high SNR")
{
    // Two nonzero points with durations (T, 2T): the tilted solution is the
    // golden-ratio split regardless of T.
    const Constellation c = make_constellation({Eigenvalue{0.5}, Eigenvalue{1.0}}, Eigenvalue{1.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    const CapacityResult noiseless = noiseless_capacity(t);
    const CapacityResult opt = optimize_distribution(c, t, ChannelParams{1e-4});
    CHECK(opt.converged);
    CHECK(total_variation(opt.distribution, noiseless.distribution) < 0.01);
    CHECK(opt.rate == doctest::Approx(noiseless.rate).epsilon(5e-3));
    // Internal consistency of the reported fields.
    CHECK(opt.rate ==
          doctest::Approx(opt.mi_bits_per_symbol / opt.avg_interval).epsilon(1e-9));
}

TEST_CASE("optimizer collapses to on-off keying in heavy noise")
{
    const Constellation c = linear_constellation(4, Eigenvalue{1.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    const CapacityResult opt = optimize_distribution(c, t, ChannelParams{8.0});
    CHECK(opt.converged);
    REQUIRE(opt.distribution.probs.size() == 4);
    CHECK(opt.distribution.probs[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(opt.distribution.probs[3] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(opt.distribution.probs[1] < 0.02);
    CHECK(opt.distribution.probs[2] < 0.02);
}

TEST_CASE("optimized rate dominates heuristic inputs")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    const ChannelParams params{0.2};
    const CapacityResult opt = optimize_distribution(c, t, params);
    CHECK(opt.converged);
    CHECK(opt.rate >= uniform_time_scaled_mi(c, t, params) - 1e-9);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> p(4);
        double s = 0.0;
        for (double& v : p)
            s += (v = u(rng));
        for (double& v : p)
            v /= s;
        CHECK(opt.rate >= time_scaled_mi(make_distribution(p), c, t, params) - 1e-7);
    }
}
