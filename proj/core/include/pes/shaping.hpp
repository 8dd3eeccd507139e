#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pes/model.hpp"

namespace pes {

// Integer symbol-count vector realized by one shaped block.
struct Composition {
    std::vector<std::uint64_t> counts;
    std::uint64_t block_len = 0;
};

// Integer counts of total n_s minimizing the KL divergence of the
// realized type from dist: largest-remainder rounding refined by local
// single-unit moves.
Composition quantize_composition(const InputDistribution& dist, std::uint64_t n_s);

// Number of uniform input bits the matcher consumes per block:
// floor(log2 of the multiset permutation count of the composition).
std::uint64_t ccdm_input_bits(const Composition& comp);

// Constant-composition distribution matcher. Bits (MSB first) index a
// multiset permutation of the composition in lexicographic order; the
// mapping is exact over big integers, so encode/decode round-trip
// bit-exactly and every output carries the composition verbatim.
std::vector<std::uint32_t> ccdm_encode(const std::vector<std::uint8_t>& bits,
                                       const Composition& comp);

// Inverse of ccdm_encode. Throws if the sequence does not match the
// composition exactly (the signal used to flag residual decoding errors
// upstream).
std::vector<std::uint8_t> ccdm_decode(const std::vector<std::uint32_t>& symbols,
                                      const Composition& comp);

// Reflected binary labels for an alphabet of m points (m a power of two):
// labels of adjacent points differ in exactly one bit.
std::vector<std::uint32_t> gray_labels(std::size_t m);

// Per-symbol label bits, MSB first, concatenated in symbol order.
std::vector<std::uint8_t> binary_image(const std::vector<std::uint32_t>& symbols, std::size_t m);

// Inverse of binary_image.
std::vector<std::uint32_t> label_symbols(const std::vector<std::uint8_t>& bits, std::size_t m);

// Greedy search for the uniform-input parity sub-alphabet: starting from
// the two extreme points, repeatedly place the candidate maximizing the
// uniform-input time-scaled mutual information, keep the best set seen,
// and prune all remaining candidates at or above the placed point.
Constellation parity_constellation_search(const Constellation& c, const PulseTiming& timing,
                                          const ChannelParams& params);

// Restrict a parity alphabet to the largest power-of-two size not above
// it, keeping both extreme points and maximizing the uniform-input
// time-scaled mutual information; ties prefer larger eigenvalues.
Constellation truncate_to_power_of_two(const Constellation& parity, double delta,
                                       const ChannelParams& params);

struct PesFrameSpec {
    Constellation info_constellation;
    Constellation parity_constellation;
    std::size_t m_bits = 0;      // log2 of the info alphabet size
    std::size_t m_par_bits = 0;  // log2 of the parity alphabet size
    double code_rate = 0.0;
    double time_share_ratio = 0.0;
};

// Runs the parity search and truncation and evaluates the time-sharing
// ratio between shaped information symbols and uniform parity symbols.
PesFrameSpec build_frame_spec(const Constellation& c, double code_rate,
                              const ChannelParams& params, const PulseTiming& timing);

struct PesFrame {
    std::vector<std::uint32_t> info_symbols;    // indices into info_constellation
    std::vector<std::uint32_t> parity_symbols;  // indices into parity_constellation
    std::string ordering;
};

// Maps parity bits onto the parity alphabet and concatenates the blocks.
PesFrame assemble_frame(const std::vector<std::uint32_t>& info_symbols,
                        const std::vector<std::uint8_t>& parity_bits, const PesFrameSpec& spec);

}
