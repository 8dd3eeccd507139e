#include "pes/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pes/channel.hpp"

namespace pes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long read_int(std::istream& in, const char* what)
{
    long v;
    if (!(in >> v))
        throw std::runtime_error(std::string("malformed alist: missing ") + what);
    return v;
}

// Reduced row echelon form over GF(2) with pivot columns scanned right to
// left, so parity ends up in the trailing positions whenever the trailing
// square submatrix is invertible.
void systematic_form(ParityCheckMatrix& code)
{
    const std::size_t words = (code.n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(code.m, std::vector<std::uint64_t>(words, 0));
    for (std::size_t r = 0; r < code.m; ++r)
        for (std::uint32_t c : code.check_vars[r])
            rows[r][c / 64] |= 1ULL << (c % 64);

    std::vector<std::int64_t> pivot_row_of_col(code.n, -1);
    std::vector<bool> row_used(code.m, false);
    std::size_t rank = 0;
    for (std::size_t col_i = 0; col_i < code.n && rank < code.m; ++col_i) {
        const std::size_t col = code.n - 1 - col_i;
        const std::size_t w = col / 64;
        const std::uint64_t bit = 1ULL << (col % 64);
        std::size_t pivot = code.m;
        for (std::size_t r = 0; r < code.m; ++r) {
            if (!row_used[r] && (rows[r][w] & bit)) {
                pivot = r;
                break;
            }
        }
        if (pivot == code.m)
            continue;
        row_used[pivot] = true;
        pivot_row_of_col[col] = static_cast<std::int64_t>(pivot);
        ++rank;
        for (std::size_t r = 0; r < code.m; ++r) {
            if (r != pivot && (rows[r][w] & bit))
                for (std::size_t q = 0; q < words; ++q)
                    rows[r][q] ^= rows[pivot][q];
        }
    }
    if (rank < code.m)
        throw std::runtime_error("alist: parity-check matrix is rank deficient");

    code.pivot_cols.clear();
    code.free_cols.clear();
    for (std::uint32_t c = 0; c < code.n; ++c) {
        if (pivot_row_of_col[c] >= 0)
            code.pivot_cols.push_back(c);
        else
            code.free_cols.push_back(c);
    }

    // index of each free column within the packed info word
    std::vector<std::uint32_t> free_index(code.n, 0);
    for (std::size_t i = 0; i < code.free_cols.size(); ++i)
        free_index[code.free_cols[i]] = static_cast<std::uint32_t>(i);

    const std::size_t k_words = (code.k() + 63) / 64;
    code.parity_masks.assign(code.m, std::vector<std::uint64_t>(k_words, 0));
    for (std::size_t i = 0; i < code.pivot_cols.size(); ++i) {
        const std::size_t r = static_cast<std::size_t>(pivot_row_of_col[code.pivot_cols[i]]);
        auto& mask = code.parity_masks[i];
        for (std::uint32_t c : code.free_cols)
            if (rows[r][c / 64] & (1ULL << (c % 64)))
                mask[free_index[c] / 64] |= 1ULL << (free_index[c] % 64);
    }
}

}

ParityCheckMatrix load_code(std::istream& in)
{
    ParityCheckMatrix code;
    const long n = read_int(in, "column count");
    const long m = read_int(in, "row count");
    if (n <= 0 || m <= 0 || m >= n)
        throw std::runtime_error("malformed alist: invalid dimensions");
    code.n = static_cast<std::size_t>(n);
    code.m = static_cast<std::size_t>(m);

    const long max_col = read_int(in, "max column degree");
    const long max_row = read_int(in, "max row degree");
    if (max_col <= 0 || max_row <= 0)
        throw std::runtime_error("malformed alist: invalid maximum degrees");

    std::vector<long> col_deg(code.n), row_deg(code.m);
    for (auto& d : col_deg) {
        d = read_int(in, "column degree");
        if (d < 0 || d > max_col)
            throw std::runtime_error("malformed alist: column degree out of range");
    }
    for (auto& d : row_deg) {
        d = read_int(in, "row degree");
        if (d < 0 || d > max_row)
            throw std::runtime_error("malformed alist: row degree out of range");
    }

    code.var_checks.assign(code.n, {});
    code.check_vars.assign(code.m, {});
    for (std::size_t c = 0; c < code.n; ++c) {
        for (long i = 0; i < max_col; ++i) {
            const long r = read_int(in, "column adjacency entry");
            if (r == 0)
                continue;  // padding
            if (r < 1 || r > static_cast<long>(code.m))
                throw std::runtime_error("malformed alist: row index out of range");
            code.var_checks[c].push_back(static_cast<std::uint32_t>(r - 1));
        }
        if (code.var_checks[c].size() != static_cast<std::size_t>(col_deg[c]))
            throw std::runtime_error("malformed alist: column adjacency contradicts degree");
    }
    for (std::size_t r = 0; r < code.m; ++r) {
        for (long i = 0; i < max_row; ++i) {
            const long c = read_int(in, "row adjacency entry");
            if (c == 0)
                continue;
            if (c < 1 || c > static_cast<long>(code.n))
                throw std::runtime_error("malformed alist: column index out of range");
            code.check_vars[r].push_back(static_cast<std::uint32_t>(c - 1));
        }
        if (code.check_vars[r].size() != static_cast<std::size_t>(row_deg[r]))
            throw std::runtime_error("malformed alist: row adjacency contradicts degree");
    }

    // the two adjacency blocks must describe the same matrix
    std::vector<std::vector<std::uint32_t>> from_cols(code.m);
    for (std::size_t c = 0; c < code.n; ++c)
        for (std::uint32_t r : code.var_checks[c])
            from_cols[r].push_back(static_cast<std::uint32_t>(c));
    for (std::size_t r = 0; r < code.m; ++r) {
        std::vector<std::uint32_t> sorted_row = code.check_vars[r];
        std::sort(sorted_row.begin(), sorted_row.end());
        if (from_cols[r] != sorted_row)
            throw std::runtime_error("malformed alist: adjacency blocks disagree");
        code.check_vars[r] = std::move(sorted_row);
    }
    for (auto& vc : code.var_checks)
        std::sort(vc.begin(), vc.end());

    systematic_form(code);
    return code;
}

ParityCheckMatrix load_code_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open alist file: " + path);
    return load_code(in);
}

std::vector<std::uint8_t> encode_systematic(const std::vector<std::uint8_t>& info,
                                            const ParityCheckMatrix& code)
{
    if (info.size() != code.k())
        throw std::invalid_argument("encode_systematic: info length mismatch");
    const std::size_t k_words = (code.k() + 63) / 64;
    std::vector<std::uint64_t> packed(k_words, 0);
    for (std::size_t i = 0; i < info.size(); ++i)
        if (info[i])
            packed[i / 64] |= 1ULL << (i % 64);

    std::vector<std::uint8_t> codeword(code.n, 0);
    for (std::size_t i = 0; i < code.free_cols.size(); ++i)
        codeword[code.free_cols[i]] = info[i];
    for (std::size_t r = 0; r < code.pivot_cols.size(); ++r) {
        std::uint64_t acc = 0;
        const auto& mask = code.parity_masks[r];
        for (std::size_t w = 0; w < k_words; ++w)
            acc ^= mask[w] & packed[w];
        codeword[code.pivot_cols[r]] =
            static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return codeword;
}

bool syndrome_ok(const std::vector<std::uint8_t>& codeword, const ParityCheckMatrix& code)
{
    if (codeword.size() != code.n)
        throw std::invalid_argument("syndrome_ok: codeword length mismatch");
    for (const auto& row : code.check_vars) {
        unsigned acc = 0;
        for (std::uint32_t c : row)
            acc ^= codeword[c];
        if (acc & 1)
            return false;
    }
    return true;
}

namespace {

// log sum of prior-weighted conditional likelihoods over the label set
// selected by (mask, value); returns -inf when the set carries no prior mass
double demap_side(const std::vector<double>& log_weights,
                  const std::vector<std::uint32_t>& labels, std::uint32_t mask, bool value)
{
    double peak = -kInf;
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (((labels[k] & mask) != 0) == value)
            peak = std::max(peak, log_weights[k]);
    if (std::isinf(peak))
        return -kInf;
    double acc = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (((labels[k] & mask) != 0) == value)
            acc += std::exp(log_weights[k] - peak);
    return peak + std::log(acc);
}

void demap_symbol(double y, const Constellation& c, const std::vector<double>& log_prior,
                  const std::vector<std::uint32_t>& labels, std::size_t bits_per,
                  const ChannelParams& params, double llr_cap, std::vector<double>& out)
{
    std::vector<double> log_w(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (std::isinf(log_prior[k])) {
            log_w[k] = -kInf;
            continue;
        }
        if (y > 0.0) {
            log_w[k] = log_prior[k] + channel_log_density(y, c.points[k], params);
        } else {
            // absent pulse: the common factor of the small-output limit of
            // the channel law cancels in the ratio, leaving the weight
            // exp(-2 im / sigma2)
            log_w[k] = log_prior[k] - 2.0 * c.points[k].im / params.sigma2;
        }
    }
    for (std::size_t b = 0; b < bits_per; ++b) {
        const std::uint32_t mask = 1u << (bits_per - 1 - b);
        const double l0 = demap_side(log_w, labels, mask, false);
        const double l1 = demap_side(log_w, labels, mask, true);
        double llr;
        if (std::isinf(l0) && std::isinf(l1))
            llr = 0.0;
        else if (std::isinf(l1))
            llr = llr_cap;
        else if (std::isinf(l0))
            llr = -llr_cap;
        else
            llr = std::clamp(l0 - l1, -llr_cap, llr_cap);
        out.push_back(llr);
    }
}

}

std::vector<double> demap_bit_llrs(const std::vector<double>& psi_im,
                                   std::size_t n_info_symbols, const PesFrameSpec& spec,
                                   const InputDistribution& shaped_prior,
                                   const ChannelParams& params, double llr_cap)
{
    if (psi_im.size() < n_info_symbols)
        throw std::invalid_argument("demap_bit_llrs: fewer observations than info symbols");
    if (shaped_prior.probs.size() != spec.info_constellation.size())
        throw std::invalid_argument("demap_bit_llrs: prior length mismatch");

    const std::vector<std::uint32_t> info_labels = gray_labels(spec.info_constellation.size());
    const std::vector<std::uint32_t> par_labels = gray_labels(spec.parity_constellation.size());

    std::vector<double> info_log_prior(shaped_prior.probs.size());
    for (std::size_t k = 0; k < shaped_prior.probs.size(); ++k)
        info_log_prior[k] = shaped_prior.probs[k] > 0.0 ? std::log(shaped_prior.probs[k]) : -kInf;
    const std::vector<double> par_log_prior(
        spec.parity_constellation.size(),
        -std::log(static_cast<double>(spec.parity_constellation.size())));

    std::vector<double> llrs;
    llrs.reserve(n_info_symbols * spec.m_bits +
                 (psi_im.size() - n_info_symbols) * spec.m_par_bits);
    for (std::size_t i = 0; i < n_info_symbols; ++i)
        demap_symbol(psi_im[i], spec.info_constellation, info_log_prior, info_labels,
                     spec.m_bits, params, llr_cap, llrs);
    for (std::size_t i = n_info_symbols; i < psi_im.size(); ++i)
        demap_symbol(psi_im[i], spec.parity_constellation, par_log_prior, par_labels,
                     spec.m_par_bits, params, llr_cap, llrs);
    return llrs;
}

std::vector<double> demap_alphabet_bit_llrs(const std::vector<double>& psi_im,
                                            const Constellation& c,
                                            const InputDistribution& prior,
                                            const ChannelParams& params, double llr_cap)
{
    if (prior.probs.size() != c.size())
        throw std::invalid_argument("demap_alphabet_bit_llrs: prior length mismatch");
    std::size_t bits_per = 0;
    while ((std::size_t{1} << bits_per) < c.size())
        ++bits_per;
    if ((std::size_t{1} << bits_per) != c.size())
        throw std::invalid_argument("demap_alphabet_bit_llrs: alphabet size not a power of two");

    const std::vector<std::uint32_t> labels = gray_labels(c.size());
    std::vector<double> log_prior(prior.probs.size());
    for (std::size_t k = 0; k < prior.probs.size(); ++k)
        log_prior[k] = prior.probs[k] > 0.0 ? std::log(prior.probs[k]) : -kInf;

    std::vector<double> llrs;
    llrs.reserve(psi_im.size() * bits_per);
    for (const double y : psi_im)
        demap_symbol(y, c, log_prior, labels, bits_per, params, llr_cap, llrs);
    return llrs;
}

DecodeResult bp_decode(const std::vector<double>& llrs, const ParityCheckMatrix& code,
                       std::size_t max_iter)
{
    if (llrs.size() != code.n)
        throw std::invalid_argument("bp_decode: llr length mismatch");

    DecodeResult result;
    result.bits.resize(code.n);
    auto hard_decide = [&](const std::vector<double>& totals) {
        for (std::size_t v = 0; v < code.n; ++v)
            result.bits[v] = totals[v] < 0.0 ? 1 : 0;
    };

    std::vector<double> totals(llrs);
    hard_decide(totals);
    if (syndrome_ok(result.bits, code)) {
        result.converged = true;
        result.iterations = 0;
        return result;
    }

    // edge storage in check-major order
    std::vector<std::size_t> edge_begin(code.m + 1, 0);
    for (std::size_t r = 0; r < code.m; ++r)
        edge_begin[r + 1] = edge_begin[r] + code.check_vars[r].size();
    const std::size_t n_edges = edge_begin[code.m];
    std::vector<double> v2c(n_edges), c2v(n_edges, 0.0);

    for (std::size_t r = 0; r < code.m; ++r)
        for (std::size_t e = edge_begin[r], i = 0; e < edge_begin[r + 1]; ++e, ++i)
            v2c[e] = std::clamp(llrs[code.check_vars[r][i]], -40.0, 40.0);

    std::vector<double> fwd, bwd;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        // check update with exclusion by forward/backward tanh products
        for (std::size_t r = 0; r < code.m; ++r) {
            const std::size_t deg = edge_begin[r + 1] - edge_begin[r];
            fwd.assign(deg + 1, 1.0);
            bwd.assign(deg + 1, 1.0);
            for (std::size_t i = 0; i < deg; ++i)
                fwd[i + 1] = fwd[i] * std::tanh(0.5 * v2c[edge_begin[r] + i]);
            for (std::size_t i = deg; i > 0; --i)
                bwd[i - 1] = bwd[i] * std::tanh(0.5 * v2c[edge_begin[r] + i - 1]);
            for (std::size_t i = 0; i < deg; ++i) {
                const double prod = std::clamp(fwd[i] * bwd[i + 1],
                                               -0.999999999999999, 0.999999999999999);
                c2v[edge_begin[r] + i] = 2.0 * std::atanh(prod);
            }
        }

        // variable update
        totals.assign(llrs.begin(), llrs.end());
        for (std::size_t r = 0; r < code.m; ++r)
            for (std::size_t e = edge_begin[r], i = 0; e < edge_begin[r + 1]; ++e, ++i)
                totals[code.check_vars[r][i]] += c2v[e];
        for (std::size_t r = 0; r < code.m; ++r)
            for (std::size_t e = edge_begin[r], i = 0; e < edge_begin[r + 1]; ++e, ++i)
                v2c[e] = std::clamp(totals[code.check_vars[r][i]] - c2v[e], -40.0, 40.0);

        hard_decide(totals);
        result.iterations = iter;
        if (syndrome_ok(result.bits, code)) {
            result.converged = true;
            return result;
        }
    }
    result.converged = false;
    return result;
}

}
