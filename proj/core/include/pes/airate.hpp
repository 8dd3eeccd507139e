#pragma once

#include <cstdint>
#include <vector>

#include "pes/model.hpp"
#include "pes/shaping.hpp"

namespace pes {

struct RateBreakdown {
    double hx = 0.0;  // entropy of the shaped distribution, bits
    std::vector<double> info_bit_entropies;    // H(X^B_i | Y^B_i), shaped prior
    std::vector<double> parity_bit_entropies;  // same, uniform prior on the parity alphabet
    double r_ts = 0.0;
    double r_ps_per_symbol = 0.0;
    double r_ps_per_time = 0.0;
    double avg_interval = 0.0;  // time-shared average symbol interval
    bool clamped = false;       // the combination went negative and was clamped to zero
};

// Conditional entropy of one label bit given the channel output, in bits.
// labels are the Gray labels in force; the prior is the shaped (info) or
// uniform (parity) distribution.
double bit_conditional_entropy(std::size_t bit, const Constellation& c,
                               const std::vector<std::uint32_t>& labels,
                               const InputDistribution& prior, const ChannelParams& params);

// Bit-metric achievable rate of the time-shared scheme: the shaped block
// contributes H(X) minus its bit-level conditional entropies, the parity
// block contributes the uniform bit-metric rate of the parity alphabet,
// weighted by the time-sharing ratio. The per-time variant divides by the
// average symbol interval of the time-shared frame.
RateBreakdown achievable_rate_pes(const PesFrameSpec& spec, const InputDistribution& shaped,
                                  const ChannelParams& params, const PulseTiming& info_timing);

}
