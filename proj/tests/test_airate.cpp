#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pes/airate.hpp"
#include "pes/capacity.hpp"
#include "pes/model.hpp"
#include "pes/shaping.hpp"

using namespace pes;

TEST_CASE("bit conditional entropy bridges the free and table forms")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const ChannelParams params{0.2};
    const InputDistribution prior = make_distribution({0.4, 0.3, 0.2, 0.1});
    const auto labels = gray_labels(4);
    const DensityTable table(c, params);
    for (std::size_t bit = 0; bit < 2; ++bit) {
        const double free_form = bit_conditional_entropy(bit, c, labels, prior, params);
        const double table_form = table.bit_conditional_entropy(prior, labels, bit, 2);
        CHECK(free_form == doctest::Approx(table_form).epsilon(1e-9));
        CHECK(free_form >= 0.0);
        CHECK(free_form <= 1.0 + 1e-12);
    }
}

TEST_CASE("bit entropies vanish in the noiseless limit and saturate in noise")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const auto labels = gray_labels(4);
    const InputDistribution u = uniform_distribution(4);
    for (std::size_t bit = 0; bit < 2; ++bit) {
        CHECK(bit_conditional_entropy(bit, c, labels, u, ChannelParams{1e-5}) < 1e-3);
        CHECK(bit_conditional_entropy(bit, c, labels, u, ChannelParams{50.0}) > 0.5);
    }
}

TEST_CASE("rate breakdown recombines per the time-sharing formula")
{
    const Constellation c = linear_constellation(8, Eigenvalue{2.0});
    const PulseTiming timing = make_pulse_timing(c, 0.005);
    const ChannelParams params{0.15};
    const PesFrameSpec spec = build_frame_spec(c, 0.5, params, timing);
    const CapacityResult opt = optimize_distribution(c, timing, params);
    const RateBreakdown rb = achievable_rate_pes(spec, opt.distribution, params, timing);

    REQUIRE(rb.info_bit_entropies.size() == spec.m_bits);
    REQUIRE(rb.parity_bit_entropies.size() == spec.m_par_bits);
    CHECK(rb.hx == doctest::Approx(entropy_bits(opt.distribution)).epsilon(1e-12));

    double info_term = rb.hx;
    for (const double h : rb.info_bit_entropies)
        info_term -= h;
    double par_term = static_cast<double>(spec.m_par_bits);
    for (const double h : rb.parity_bit_entropies)
        par_term -= h;
    const double rts = spec.time_share_ratio;
    const double expect = rts * info_term + (1.0 - rts) * par_term;
    CHECK(rb.r_ts == doctest::Approx(rts).epsilon(1e-12));
    CHECK(rb.r_ps_per_symbol == doctest::Approx(std::max(0.0, expect)).epsilon(1e-10));

    const PulseTiming par_timing = make_pulse_timing(spec.parity_constellation, timing.delta);
    const double t_info = average_symbol_interval(opt.distribution, timing);
    const double t_par =
        average_symbol_interval(uniform_distribution(spec.parity_constellation.size()),
                                par_timing);
    const double tbar = rts * t_info + (1.0 - rts) * t_par;
    CHECK(rb.avg_interval == doctest::Approx(tbar).epsilon(1e-10));
    CHECK(rb.r_ps_per_time == doctest::Approx(rb.r_ps_per_symbol / tbar).epsilon(1e-10));
    CHECK_FALSE(rb.clamped);
}

TEST_CASE("hopeless noise clamps the combination at zero")
{
    // Uniform input cannot go negative (each bit entropy is at most one),
    // so drive the clamp with a skewed input: its bit marginals carry more
    // entropy than the joint once the channel output is useless.
    const Constellation c = linear_constellation(4, Eigenvalue{1.0});
    const PulseTiming timing = make_pulse_timing(c, 0.005);
    const ChannelParams params{200.0};
    const PesFrameSpec spec = build_frame_spec(c, 0.25, params, timing);
    const RateBreakdown rb = achievable_rate_pes(
        spec, make_distribution({0.94, 0.02, 0.02, 0.02}), params, timing);
    CHECK(rb.clamped);
    CHECK(rb.r_ps_per_symbol == 0.0);
    CHECK(rb.r_ps_per_time == 0.0);
}

TEST_CASE("time share grows with the code rate")
{
    const Constellation c = linear_constellation(8, Eigenvalue{2.0});
    const PulseTiming timing = make_pulse_timing(c, 0.005);
    const ChannelParams params{0.1};
    double prev = -1.0;
    for (const double rc : {0.25, 0.5, 0.75, 0.9}) {
        const PesFrameSpec spec = build_frame_spec(c, rc, params, timing);
        CHECK(spec.time_share_ratio > prev);
        prev = spec.time_share_ratio;
    }
    // All of the frame is information when the code does not expand.
    const PesFrameSpec full = build_frame_spec(c, 1.0, params, timing);
    CHECK(full.time_share_ratio == doctest::Approx(1.0));
}

TEST_CASE("achievable rate never exceeds the optimized capacity")
{
    const Constellation c = linear_constellation(4, Eigenvalue{2.0});
    const PulseTiming timing = make_pulse_timing(c, 0.005);
    for (const double s2 : {0.05, 0.3, 1.5}) {
        const ChannelParams params{s2};
        const CapacityResult opt = optimize_distribution(c, timing, params);
        REQUIRE(opt.converged);
        for (const double rc : {0.5, 0.9}) {
            const PesFrameSpec spec = build_frame_spec(c, rc, params, timing);
            const RateBreakdown rb =
                achievable_rate_pes(spec, opt.distribution, params, timing);
            CHECK(rb.r_ps_per_time <= opt.rate + 1e-6);
        }
    }
}
