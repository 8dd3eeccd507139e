#include "pes/shaping.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <gmpxx.h>

#include "pes/capacity.hpp"

namespace pes {

namespace {

double type_kl(const std::vector<std::uint64_t>& counts, const std::vector<double>& p,
               std::uint64_t n)
{
    double kl = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0)
            continue;
        const double f = static_cast<double>(counts[k]) / static_cast<double>(n);
        kl += f * std::log(f / p[k]);
    }
    return kl;
}

mpz_class multiset_count(const Composition& comp)
{
    mpz_class n;
    mpz_fac_ui(n.get_mpz_t(), static_cast<unsigned long>(comp.block_len));
    for (std::uint64_t c : comp.counts) {
        if (c < 2)
            continue;
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(c));
        mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), f.get_mpz_t());
    }
    return n;
}

void check_composition(const Composition& comp)
{
    if (comp.block_len == 0)
        throw std::invalid_argument("composition: empty block");
    std::uint64_t total = 0;
    for (std::uint64_t c : comp.counts)
        total += c;
    if (total != comp.block_len)
        throw std::invalid_argument("composition: counts do not sum to the block length");
}

}

Composition quantize_composition(const InputDistribution& dist, std::uint64_t n_s)
{
    if (n_s == 0)
        throw std::invalid_argument("quantize_composition: block length must be positive");
    const std::vector<double>& p = dist.probs;
    const std::size_t m = p.size();

    Composition comp;
    comp.block_len = n_s;
    comp.counts.assign(m, 0);

    std::uint64_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> remainders;
    for (std::size_t k = 0; k < m; ++k) {
        if (p[k] <= 0.0)
            continue;
        const double exact = p[k] * static_cast<double>(n_s);
        comp.counts[k] = static_cast<std::uint64_t>(std::floor(exact));
        assigned += comp.counts[k];
        remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_s; ++i)
        if (p[remainders[i % remainders.size()].second] > 0.0) {
            ++comp.counts[remainders[i % remainders.size()].second];
            ++assigned;
        }

    // Local refinement: move single units while the KL of the type improves.
    bool improved = true;
    double best = type_kl(comp.counts, p, n_s);
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (comp.counts[i] == 0)
                continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j || p[j] <= 0.0)
                    continue;
                --comp.counts[i];
                ++comp.counts[j];
                const double kl = type_kl(comp.counts, p, n_s);
                if (kl + 1e-15 < best) {
                    best = kl;
                    improved = true;
                } else {
                    ++comp.counts[i];
                    --comp.counts[j];
                }
            }
        }
    }
    return comp;
}

std::uint64_t ccdm_input_bits(const Composition& comp)
{
    check_composition(comp);
    const mpz_class n = multiset_count(comp);
    // sizeinbase(n, 2) is exactly floor(log2 n) + 1 for n >= 1
    return mpz_sizeinbase(n.get_mpz_t(), 2) - 1;
}

std::vector<std::uint32_t> ccdm_encode(const std::vector<std::uint8_t>& bits,
                                       const Composition& comp)
{
    check_composition(comp);
    const std::uint64_t k_s = ccdm_input_bits(comp);
    if (bits.size() != k_s)
        throw std::invalid_argument("ccdm_encode: expected " + std::to_string(k_s) +
                                    " bits, got " + std::to_string(bits.size()));

    mpz_class rank = 0;
    for (std::uint8_t b : bits) {
        rank <<= 1;
        if (b)
            rank += 1;
    }

    std::vector<std::uint64_t> counts = comp.counts;
    mpz_class remaining = multiset_count(comp);
    std::uint64_t n_rem = comp.block_len;

    std::vector<std::uint32_t> out;
    out.reserve(comp.block_len);
    mpz_class head;
    for (std::uint64_t pos = 0; pos < comp.block_len; ++pos) {
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[j] == 0)
                continue;
            // permutations of the remainder that start with symbol j
            head = remaining * static_cast<unsigned long>(counts[j]);
            mpz_divexact_ui(head.get_mpz_t(), head.get_mpz_t(),
                            static_cast<unsigned long>(n_rem));
            if (rank < head) {
                out.push_back(static_cast<std::uint32_t>(j));
                remaining = head;
                --counts[j];
                --n_rem;
                break;
            }
            rank -= head;
        }
    }
    return out;
}

std::vector<std::uint8_t> ccdm_decode(const std::vector<std::uint32_t>& symbols,
                                      const Composition& comp)
{
    check_composition(comp);
    if (symbols.size() != comp.block_len)
        throw std::invalid_argument("ccdm_decode: sequence length mismatch");
    std::vector<std::uint64_t> seen(comp.counts.size(), 0);
    for (std::uint32_t s : symbols) {
        if (s >= comp.counts.size())
            throw std::invalid_argument("ccdm_decode: symbol out of range");
        ++seen[s];
    }
    if (seen != comp.counts)
        throw std::invalid_argument("ccdm_decode: composition mismatch");

    std::vector<std::uint64_t> counts = comp.counts;
    mpz_class remaining = multiset_count(comp);
    std::uint64_t n_rem = comp.block_len;

    mpz_class rank = 0;
    mpz_class head;
    for (std::uint32_t s : symbols) {
        for (std::uint32_t j = 0; j < s; ++j) {
            if (counts[j] == 0)
                continue;
            head = remaining * static_cast<unsigned long>(counts[j]);
            mpz_divexact_ui(head.get_mpz_t(), head.get_mpz_t(),
                            static_cast<unsigned long>(n_rem));
            rank += head;
        }
        head = remaining * static_cast<unsigned long>(counts[s]);
        mpz_divexact_ui(head.get_mpz_t(), head.get_mpz_t(), static_cast<unsigned long>(n_rem));
        remaining = head;
        --counts[s];
        --n_rem;
    }

    const std::uint64_t k_s = ccdm_input_bits(comp);
    std::vector<std::uint8_t> bits(k_s, 0);
    for (std::uint64_t i = 0; i < k_s; ++i)
        bits[k_s - 1 - i] = mpz_tstbit(rank.get_mpz_t(), i) ? 1 : 0;
    return bits;
}

std::vector<std::uint32_t> gray_labels(std::size_t m)
{
    if (m < 2 || !std::has_single_bit(m))
        throw std::invalid_argument("gray_labels: alphabet size must be a power of two");
    std::vector<std::uint32_t> labels(m);
    for (std::size_t i = 0; i < m; ++i)
        labels[i] = static_cast<std::uint32_t>(i ^ (i >> 1));
    return labels;
}

std::vector<std::uint8_t> binary_image(const std::vector<std::uint32_t>& symbols, std::size_t m)
{
    const std::vector<std::uint32_t> labels = gray_labels(m);
    const std::size_t bits_per = std::bit_width(m) - 1;
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * bits_per);
    for (std::uint32_t s : symbols) {
        if (s >= m)
            throw std::invalid_argument("binary_image: symbol out of range");
        const std::uint32_t g = labels[s];
        for (std::size_t b = 0; b < bits_per; ++b)
            bits.push_back((g >> (bits_per - 1 - b)) & 1u);
    }
    return bits;
}

std::vector<std::uint32_t> label_symbols(const std::vector<std::uint8_t>& bits, std::size_t m)
{
    if (m < 2 || !std::has_single_bit(m))
        throw std::invalid_argument("label_symbols: alphabet size must be a power of two");
    const std::size_t bits_per = std::bit_width(m) - 1;
    if (bits.size() % bits_per != 0)
        throw std::invalid_argument("label_symbols: bit count not divisible by bits per symbol");
    std::vector<std::uint32_t> symbols;
    symbols.reserve(bits.size() / bits_per);
    for (std::size_t i = 0; i < bits.size(); i += bits_per) {
        std::uint32_t g = 0;
        for (std::size_t b = 0; b < bits_per; ++b)
            g = (g << 1) | (bits[i + b] ? 1u : 0u);
        // inverse reflected-binary map via prefix xor
        std::uint32_t v = g;
        for (std::uint32_t shift = 1; shift < bits_per; shift <<= 1)
            v ^= v >> shift;
        symbols.push_back(v);
    }
    return symbols;
}

namespace {

double subset_uniform_tsmi(const Constellation& base, const std::vector<std::size_t>& idx,
                           double delta, const ChannelParams& params)
{
    const Constellation sub = make_subset(base, idx);
    const PulseTiming timing = make_pulse_timing(sub, delta);
    return uniform_time_scaled_mi(sub, timing, params);
}

}

Constellation parity_constellation_search(const Constellation& c, const PulseTiming& timing,
                                          const ChannelParams& params)
{
    const std::size_t m = c.size();
    const double delta = timing.delta;

    std::vector<std::size_t> placed = {0, m - 1};
    std::vector<std::size_t> best_set = placed;
    double best_tsmi = subset_uniform_tsmi(c, placed, delta, params);

    std::vector<std::size_t> unplaced;
    for (std::size_t i = 1; i + 1 < m; ++i)
        unplaced.push_back(i);

    while (!unplaced.empty()) {
        std::size_t pick = 0;
        double pick_tsmi = -1.0;
        for (std::size_t i : unplaced) {
            std::vector<std::size_t> trial = placed;
            trial.insert(std::lower_bound(trial.begin(), trial.end(), i), i);
            const double v = subset_uniform_tsmi(c, trial, delta, params);
            // strict improvement keeps the earlier (smaller) candidate on ties
            if (v > pick_tsmi) {
                pick_tsmi = v;
                pick = i;
            }
        }
        placed.insert(std::lower_bound(placed.begin(), placed.end(), pick), pick);
        if (pick_tsmi > best_tsmi) {
            best_tsmi = pick_tsmi;
            best_set = placed;
        }
        const double pick_im = c.points[pick].im;
        std::erase_if(unplaced, [&](std::size_t i) { return c.points[i].im >= pick_im; });
    }
    return make_subset(c, best_set);
}

namespace {

void interior_combinations(std::size_t avail, std::size_t choose,
                           std::vector<std::vector<std::size_t>>& out)
{
    // combinations of {1..avail} of the given size, generated so that sets
    // leaning on larger indices come first (ties in the caller then keep
    // the larger-eigenvalue subset)
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t next) -> void {
        if (cur.size() == choose) {
            out.push_back(cur);
            return;
        }
        if (next == 0 || cur.size() + next < choose)
            return;
        cur.push_back(next);
        self(self, next - 1);
        cur.pop_back();
        self(self, next - 1);
    };
    rec(rec, avail);
}

}

Constellation truncate_to_power_of_two(const Constellation& parity, double delta,
                                       const ChannelParams& params)
{
    const std::size_t p = parity.size();
    if (p < 2)
        throw std::invalid_argument("truncate_to_power_of_two: need at least two points");
    if (std::has_single_bit(p))
        return parity;
    const std::size_t target = std::bit_floor(p);

    std::vector<std::vector<std::size_t>> interiors;
    interior_combinations(p - 2, target - 2, interiors);

    std::vector<std::size_t> best;
    double best_tsmi = -1.0;
    for (const std::vector<std::size_t>& interior : interiors) {
        std::vector<std::size_t> idx = {0};
        for (auto it = interior.rbegin(); it != interior.rend(); ++it)
            idx.push_back(*it);
        idx.push_back(p - 1);
        std::sort(idx.begin(), idx.end());
        const double v = subset_uniform_tsmi(parity, idx, delta, params);
        if (v > best_tsmi) {
            best_tsmi = v;
            best = idx;
        }
    }
    return make_subset(parity, best);
}

PesFrameSpec build_frame_spec(const Constellation& c, double code_rate,
                              const ChannelParams& params, const PulseTiming& timing)
{
    if (!std::has_single_bit(c.size()))
        throw std::invalid_argument("build_frame_spec: alphabet size must be a power of two");
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw std::invalid_argument("build_frame_spec: code rate must be in (0,1]");

    PesFrameSpec spec;
    spec.info_constellation = c;
    spec.parity_constellation =
        truncate_to_power_of_two(parity_constellation_search(c, timing, params),
                                 timing.delta, params);
    spec.m_bits = std::bit_width(c.size()) - 1;
    spec.m_par_bits = std::bit_width(spec.parity_constellation.size()) - 1;
    spec.code_rate = code_rate;

    const double m = static_cast<double>(spec.m_bits);
    const double m_par = static_cast<double>(spec.m_par_bits);
    spec.time_share_ratio =
        code_rate * m_par / (m * (1.0 - code_rate) + code_rate * m_par);
    return spec;
}

PesFrame assemble_frame(const std::vector<std::uint32_t>& info_symbols,
                        const std::vector<std::uint8_t>& parity_bits, const PesFrameSpec& spec)
{
    if (parity_bits.size() % spec.m_par_bits != 0)
        throw std::invalid_argument("assemble_frame: parity bits not divisible by symbol size");
    PesFrame frame;
    frame.info_symbols = info_symbols;
    frame.parity_symbols = label_symbols(parity_bits, spec.parity_constellation.size());
    frame.ordering = "info-then-parity";
    return frame;
}

}
