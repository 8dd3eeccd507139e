#include "pes/airate.hpp"

#include <algorithm>
#include <stdexcept>

#include "pes/capacity.hpp"

namespace pes {

double bit_conditional_entropy(std::size_t bit, const Constellation& c,
                               const std::vector<std::uint32_t>& labels,
                               const InputDistribution& prior, const ChannelParams& params)
{
    std::size_t label_bits = 0;
    while ((std::size_t{1} << label_bits) < c.size())
        ++label_bits;
    return DensityTable(c, params).bit_conditional_entropy(prior, labels, bit, label_bits);
}

RateBreakdown achievable_rate_pes(const PesFrameSpec& spec, const InputDistribution& shaped,
                                  const ChannelParams& params, const PulseTiming& info_timing)
{
    if (shaped.probs.size() != spec.info_constellation.size())
        throw std::invalid_argument("achievable_rate_pes: prior length mismatch");

    RateBreakdown out;
    out.hx = entropy_bits(shaped);
    out.r_ts = spec.time_share_ratio;

    const DensityTable info_table(spec.info_constellation, params);
    const std::vector<std::uint32_t> info_labels = gray_labels(spec.info_constellation.size());
    double info_loss = 0.0;
    for (std::size_t b = 0; b < spec.m_bits; ++b) {
        const double h = info_table.bit_conditional_entropy(shaped, info_labels, b, spec.m_bits);
        out.info_bit_entropies.push_back(h);
        info_loss += h;
    }

    const DensityTable par_table(spec.parity_constellation, params);
    const std::vector<std::uint32_t> par_labels = gray_labels(spec.parity_constellation.size());
    const InputDistribution par_uniform = uniform_distribution(spec.parity_constellation.size());
    double par_loss = 0.0;
    for (std::size_t b = 0; b < spec.m_par_bits; ++b) {
        const double h =
            par_table.bit_conditional_entropy(par_uniform, par_labels, b, spec.m_par_bits);
        out.parity_bit_entropies.push_back(h);
        par_loss += h;
    }

    const double raw = out.r_ts * (out.hx - info_loss) +
                       (1.0 - out.r_ts) * (static_cast<double>(spec.m_par_bits) - par_loss);
    out.clamped = raw < 0.0;
    out.r_ps_per_symbol = std::max(raw, 0.0);

    const PulseTiming par_timing = make_pulse_timing(spec.parity_constellation, info_timing.delta);
    out.avg_interval = out.r_ts * average_symbol_interval(shaped, info_timing) +
                       (1.0 - out.r_ts) * average_symbol_interval(par_uniform, par_timing);
    out.r_ps_per_time = out.r_ps_per_symbol / out.avg_interval;
    return out;
}

}
