#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pes/model.hpp"
#include "pes/shaping.hpp"

namespace pes {

// Sparse binary parity-check matrix with the systematic encoding data
// identified at load: Gaussian elimination with pivots chosen from the
// rightmost columns leaves the info bits in the leading positions for
// codes whose trailing square submatrix is invertible.
struct ParityCheckMatrix {
    std::size_t n = 0;  // codeword bits (columns)
    std::size_t m = 0;  // checks (rows)
    std::vector<std::vector<std::uint32_t>> check_vars;  // per check, ascending
    std::vector<std::vector<std::uint32_t>> var_checks;  // per bit, ascending

    // pivot_cols[r] is the codeword position produced by reduced row r;
    // parity_masks[r] packs that row's support over the free positions.
    std::vector<std::uint32_t> pivot_cols;
    std::vector<std::uint32_t> free_cols;
    std::vector<std::vector<std::uint64_t>> parity_masks;

    std::size_t k() const { return n - m; }
};

// Parses and validates the conventional alist text layout and computes
// the systematic form. Malformed input, inconsistent adjacency, and rank
// deficiency are reported, not repaired.
ParityCheckMatrix load_code(std::istream& in);
ParityCheckMatrix load_code_file(const std::string& path);

// Codeword with info bits in the free positions (leading positions for
// staircase-style codes) satisfying every check of the matrix.
std::vector<std::uint8_t> encode_systematic(const std::vector<std::uint8_t>& info,
                                            const ParityCheckMatrix& code);

bool syndrome_ok(const std::vector<std::uint8_t>& codeword, const ParityCheckMatrix& code);

// Bit LLRs for a received frame, info symbols first, then parity symbols.
// Info symbols are demapped against the shaped prior on the full info
// alphabet, parity symbols against a uniform prior on the parity
// alphabet. psi_im = 0 marks an absent pulse and is handled through the
// analytic small-output limit of the channel law. Positive LLR favors
// bit 0; values saturate at llr_cap.
std::vector<double> demap_bit_llrs(const std::vector<double>& psi_im,
                                   std::size_t n_info_symbols, const PesFrameSpec& spec,
                                   const InputDistribution& shaped_prior,
                                   const ChannelParams& params, double llr_cap = 40.0);

// Bit LLRs for a sequence drawn from a single alphabet under a common
// prior; serves the fixed-interval reference chain where every symbol
// carries code bits.
std::vector<double> demap_alphabet_bit_llrs(const std::vector<double>& psi_im,
                                            const Constellation& c,
                                            const InputDistribution& prior,
                                            const ChannelParams& params, double llr_cap = 40.0);

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    bool converged = false;
    std::size_t iterations = 0;
};

// Flooding-schedule sum-product decoding; stops early once the hard
// decision satisfies all checks.
DecodeResult bp_decode(const std::vector<double>& llrs, const ParityCheckMatrix& code,
                       std::size_t max_iter = 50);

}
