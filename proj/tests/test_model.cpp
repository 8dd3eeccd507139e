#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pes/model.hpp"

using namespace pes;

TEST_CASE("constellation validation")
{
    CHECK_THROWS(make_constellation({Eigenvalue{1.0}}, Eigenvalue{2.0}));
    CHECK_THROWS(make_constellation({Eigenvalue{1.0}, Eigenvalue{0.5}}, Eigenvalue{2.0}));
    CHECK_THROWS(make_constellation({Eigenvalue{-0.1}, Eigenvalue{1.0}}, Eigenvalue{2.0}));
    CHECK_THROWS(make_constellation({Eigenvalue{1.0}, Eigenvalue{3.0}}, Eigenvalue{2.0}));
    CHECK_THROWS(make_constellation({Eigenvalue{0.0}, Eigenvalue{1.0}}, Eigenvalue{0.0}));
    const Constellation c = make_constellation({Eigenvalue{0.0}, Eigenvalue{1.0}}, Eigenvalue{2.0});
    CHECK(c.size() == 2);
    CHECK(c.lambda_max.im == 2.0);
}

TEST_CASE("linear constellation spans zero to the peak")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    REQUIRE(c.size() == 4);
    CHECK(c.points[0].im == doctest::Approx(0.0));
    CHECK(c.points[1].im == doctest::Approx(2.0 / 3.0));
    CHECK(c.points[2].im == doctest::Approx(4.0 / 3.0));
    CHECK(c.points[3].im == doctest::Approx(2.0));
    CHECK_THROWS(linear_constellation(1, Eigenvalue{2.0}));
}

TEST_CASE("subsets preserve order and the peak constraint")
{
    const Constellation base = linear_constellation(8, Eigenvalue{2.0});
    const Constellation sub = make_subset(base, {0, 3, 7});
    REQUIRE(sub.size() == 3);
    CHECK(sub.points[1].im == doctest::Approx(base.points[3].im));
    CHECK(sub.lambda_max.im == base.lambda_max.im);
    CHECK_THROWS(make_subset(base, {3, 3}));
    CHECK_THROWS(make_subset(base, {5, 8}));
}

TEST_CASE("pulse width closed form")
{
    // ln(2/delta - 1) / (2 im), digits from an external evaluation.
    CHECK(pulse_width(Eigenvalue{1.0}, 0.005) ==
          doctest::Approx(2.9944807084449317).epsilon(1e-15));
    CHECK(pulse_width(Eigenvalue{2.0}, 0.005) ==
          doctest::Approx(1.4972403542224659).epsilon(1e-15));
    CHECK(pulse_width(Eigenvalue{0.5}, 1e-4) ==
          doctest::Approx(9.9034375512860863).epsilon(1e-15));
    CHECK(pulse_width(Eigenvalue{1.0}, 1e-5) ==
          doctest::Approx(6.1030338227588368).epsilon(1e-15));

    // Scaling: doubling the eigenvalue halves the duration.
    const double t1 = pulse_width(Eigenvalue{0.7}, 1e-3);
    const double t2 = pulse_width(Eigenvalue{1.4}, 1e-3);
    CHECK(t1 == doctest::Approx(2.0 * t2).epsilon(1e-14));

    CHECK_THROWS(pulse_width(Eigenvalue{0.0}, 0.005));
    CHECK_THROWS(pulse_width(Eigenvalue{1.0}, 0.0));
    CHECK_THROWS(pulse_width(Eigenvalue{1.0}, 1.0));
}

TEST_CASE("timing table gives the zero symbol the shortest slot")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    REQUIRE(t.durations.size() == 4);
    CHECK(t.durations[0] == doctest::Approx(pulse_width(Eigenvalue{2.0}, 0.005)));
    CHECK(t.durations[1] == doctest::Approx(pulse_width(Eigenvalue{2.0 / 3.0}, 0.005)));
    CHECK(t.durations[3] == doctest::Approx(pulse_width(Eigenvalue{2.0}, 0.005)));
    // Nonzero durations decrease with the eigenvalue.
    CHECK(t.durations[1] > t.durations[2]);
    CHECK(t.durations[2] > t.durations[3]);
}

TEST_CASE("guard condition")
{
    // delta/(2-delta) for delta=0.005 is about 2.5e-3.
    CHECK(guard_condition_holds(Eigenvalue{1.0}, 0.005, 0.01));
    CHECK_FALSE(guard_condition_holds(Eigenvalue{1.0}, 0.005, 1e-3));
    CHECK_THROWS(guard_condition_holds(Eigenvalue{1.0}, 0.0, 0.01));
}

TEST_CASE("distribution validation and entropy")
{
    CHECK_THROWS(make_distribution({0.5, 0.6}));
    CHECK_THROWS(make_distribution({-0.1, 1.1}));
    const InputDistribution u = uniform_distribution(8);
    CHECK(entropy_bits(u) == doctest::Approx(3.0).epsilon(1e-14));
    const InputDistribution d = make_distribution({0.5, 0.25, 0.25});
    CHECK(entropy_bits(d) == doctest::Approx(1.5).epsilon(1e-14));
    // Zero masses contribute nothing.
    const InputDistribution z = make_distribution({1.0, 0.0});
    CHECK(entropy_bits(z) == doctest::Approx(0.0));
}

TEST_CASE("average interval and SNR")
{
    const Constellation c = make_constellation({Eigenvalue{0.0}, Eigenvalue{1.0}}, Eigenvalue{1.0});
    const PulseTiming t = make_pulse_timing(c, 0.005);
    const InputDistribution d = make_distribution({0.25, 0.75});
    const double tbar = average_symbol_interval(d, t);
    CHECK(tbar == doctest::Approx(pulse_width(Eigenvalue{1.0}, 0.005)));

    const ChannelParams params{0.1};
    CHECK(snr_linear(d, c, params) == doctest::Approx(4.0 * 0.75 / 0.1).epsilon(1e-14));
    CHECK(snr_db(d, c, params) ==
          doctest::Approx(10.0 * std::log10(30.0)).epsilon(1e-12));
    CHECK_THROWS(snr_linear(uniform_distribution(3), c, params));
    CHECK_THROWS(snr_linear(d, c, ChannelParams{0.0}));
}
