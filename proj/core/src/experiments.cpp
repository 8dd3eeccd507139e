#include "pes/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pes/airate.hpp"
#include "pes/capacity.hpp"
#include "pes/channel.hpp"
#include "pes/fec.hpp"
#include "pes/rng.hpp"
#include "pes/shaping.hpp"

namespace pes {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& key)
{
    const char* b = s.c_str();
    char* e = nullptr;
    errno = 0;
    const double v = std::strtod(b, &e);
    if (e == b || *e != '\0' || errno == ERANGE)
        throw std::invalid_argument("config key " + key + ": invalid number '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& key)
{
    const char* b = s.c_str();
    char* e = nullptr;
    errno = 0;
    const long long v = std::strtoll(b, &e, 10);
    if (e == b || *e != '\0' || errno == ERANGE)
        throw std::invalid_argument("config key " + key + ": invalid integer '" + s + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(',', pos);
        const std::string item = trim(s.substr(pos, next == std::string::npos ? next : next - pos));
        if (!item.empty())
            out.push_back(item);
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}

Config Config::from_string(const std::string& text)
{
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (!cfg.kv_.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key " + key);
    }
    return cfg;
}

Config Config::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

bool Config::has(const std::string& key) const
{
    return kv_.find(key) != kv_.end();
}

std::string Config::fetch(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw std::invalid_argument("missing config key: " + key);
    if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end())
        consumed_.push_back(key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const
{
    return fetch(key);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    return has(key) ? fetch(key) : fallback;
}

double Config::get_double(const std::string& key) const
{
    return parse_double(fetch(key), key);
}

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const
{
    return parse_int(fetch(key), key);
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key))
        return fallback;
    std::string v = fetch(key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw std::invalid_argument("config key " + key + ": invalid boolean '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const
{
    const auto items = split_list(fetch(key));
    if (items.empty())
        throw std::invalid_argument("config key " + key + ": empty list");
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& s : items)
        out.push_back(parse_double(s, key));
    return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const
{
    const auto items = split_list(fetch(key));
    if (items.empty())
        throw std::invalid_argument("config key " + key + ": empty list");
    std::vector<std::int64_t> out;
    out.reserve(items.size());
    for (const auto& s : items)
        out.push_back(parse_int(s, key));
    return out;
}

void Config::check_consumed() const
{
    std::string unknown;
    for (const auto& [key, value] : kv_) {
        (void)value;
        if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end()) {
            if (!unknown.empty())
                unknown += ", ";
            unknown += key;
        }
    }
    if (!unknown.empty())
        throw std::invalid_argument("unknown config keys: " + unknown);
}

namespace {

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    if (n == 0)
        return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0)
        hw = 1;
    unsigned w = workers == 0 ? hw : workers;
    w = static_cast<unsigned>(std::min<std::size_t>(w, n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err)
                        err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

struct BaseSetup {
    Constellation c;
    PulseTiming timing;
    double delta = 0.0;
    std::size_t m = 0;
    double lambda_max = 0.0;
};

BaseSetup load_base(const Config& cfg)
{
    BaseSetup base;
    const std::int64_t m = cfg.get_int("constellation.m");
    if (m < 2 || m > 65536)
        throw std::invalid_argument("constellation.m out of range");
    base.m = static_cast<std::size_t>(m);
    base.lambda_max = cfg.get_double("constellation.lambda_max");
    base.delta = cfg.get_double("pulse.delta");
    base.c = linear_constellation(base.m, Eigenvalue{base.lambda_max});
    base.timing = make_pulse_timing(base.c, base.delta);
    return base;
}

double uniform_mean_im(const Constellation& c)
{
    double acc = 0.0;
    for (const Eigenvalue& p : c.points)
        acc += p.im;
    return acc / static_cast<double>(c.size());
}

struct GridPoint {
    double snr_db = 0.0;
    double sigma2 = 0.0;
};

std::vector<GridPoint> resolve_grid(const Config& cfg, double e_ref)
{
    const bool has_snr = cfg.has("grid.snr_db");
    const bool has_s2 = cfg.has("grid.sigma2");
    if (has_snr == has_s2)
        throw std::invalid_argument("config must set exactly one of grid.snr_db and grid.sigma2");
    std::vector<GridPoint> pts;
    if (has_snr) {
        for (const double snr : cfg.get_double_list("grid.snr_db"))
            pts.push_back({snr, 4.0 * e_ref / std::pow(10.0, snr / 10.0)});
    } else {
        for (const double s2 : cfg.get_double_list("grid.sigma2")) {
            if (!(s2 > 0.0))
                throw std::invalid_argument("grid.sigma2 entries must be positive");
            pts.push_back({10.0 * std::log10(4.0 * e_ref / s2), s2});
        }
    }
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i].snr_db > pts[i - 1].snr_db))
            throw std::invalid_argument("SNR grid must be strictly increasing");
    return pts;
}

OptimizeOptions solver_options(const Config& cfg)
{
    OptimizeOptions opt;
    opt.tol = cfg.get_double("solver.tol", opt.tol);
    opt.quad_tol = cfg.get_double("solver.quad_tol", opt.quad_tol);
    return opt;
}

Constellation baseline_constellation(std::size_t m, double lambda_max)
{
    std::vector<Eigenvalue> pts(m);
    for (std::size_t i = 0; i < m; ++i)
        pts[i].im = lambda_max * static_cast<double>(i + 1) / static_cast<double>(m);
    return make_constellation(std::move(pts), Eigenvalue{lambda_max});
}

}

CapacityReport run_capacity_sweep(const Config& cfg, std::uint64_t seed, unsigned workers)
{
    (void)seed; // the solver path is deterministic
    cfg.get_int("seed", 1);
    const BaseSetup base = load_base(cfg);
    std::vector<std::int64_t> m_list;
    if (cfg.has("sweep.m_list"))
        m_list = cfg.get_int_list("sweep.m_list");
    for (const std::int64_t m : m_list)
        if (m < 2 || static_cast<std::size_t>(m) > base.m)
            throw std::invalid_argument("sweep.m_list entries must lie in [2, constellation.m]");
    const std::vector<GridPoint> grid = resolve_grid(cfg, uniform_mean_im(base.c));
    const OptimizeOptions opt = solver_options(cfg);
    cfg.check_consumed();

    const std::vector<std::size_t> baseline_sizes =
        m_list.empty() ? std::vector<std::size_t>{base.m} : [&] {
            std::vector<std::size_t> v;
            for (const std::int64_t m : m_list)
                v.push_back(static_cast<std::size_t>(m));
            return v;
        }();

    std::vector<std::vector<CapacityRow>> per_point(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const ChannelParams params{grid[i].sigma2};
        std::vector<CapacityRow>& rows = per_point[i];

        const CapacityResult star = optimize_distribution(base.c, base.timing, params, opt);
        rows.push_back({grid[i].snr_db, grid[i].sigma2, base.m, "cstar", star.rate,
                        star.mi_bits_per_symbol, star.avg_interval, star.converged});

        for (const std::int64_t m_raw : m_list) {
            const auto m = static_cast<std::size_t>(m_raw);
            const Constellation c = linear_constellation(m, Eigenvalue{base.lambda_max});
            const PulseTiming timing = make_pulse_timing(c, base.delta);
            const CapacityResult res = optimize_distribution(c, timing, params, opt);
            rows.push_back({grid[i].snr_db, grid[i].sigma2, m, "shaped-m" + std::to_string(m),
                            res.rate, res.mi_bits_per_symbol, res.avg_interval, res.converged});
        }

        for (const std::size_t m : baseline_sizes) {
            const Constellation c = baseline_constellation(m, base.lambda_max);
            const double t_fixed = pulse_width(c.points[0], base.delta);
            const InputDistribution uniform = uniform_distribution(m);
            const double mi = mutual_information(uniform, c, params);
            rows.push_back({grid[i].snr_db, grid[i].sigma2, m, "baseline-m" + std::to_string(m),
                            mi / t_fixed, mi, t_fixed, true});
        }
    });

    CapacityReport report;
    for (const auto& rows : per_point)
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

AirReport run_air_sweep(const Config& cfg, std::uint64_t seed, unsigned workers)
{
    (void)seed;
    cfg.get_int("seed", 1);
    const BaseSetup base = load_base(cfg);
    const std::vector<double> rates = cfg.get_double_list("code.rates");
    for (const double rc : rates)
        if (!(rc > 0.0) || rc > 1.0)
            throw std::invalid_argument("code.rates entries must lie in (0, 1]");
    const std::vector<GridPoint> grid = resolve_grid(cfg, uniform_mean_im(base.c));
    const OptimizeOptions opt = solver_options(cfg);
    cfg.check_consumed();

    std::vector<std::vector<AirRow>> per_point(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const ChannelParams params{grid[i].sigma2};
        const CapacityResult cap = optimize_distribution(base.c, base.timing, params, opt);
        for (const double rc : rates) {
            const PesFrameSpec spec = build_frame_spec(base.c, rc, params, base.timing);
            const RateBreakdown br = achievable_rate_pes(spec, cap.distribution, params,
                                                         base.timing);
            per_point[i].push_back({grid[i].snr_db, rc, br.r_ts, br.r_ps_per_symbol,
                                    br.r_ps_per_time, cap.rate});
        }
    });

    AirReport report;
    for (const auto& rows : per_point)
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

ParityReport run_parity_search(const Config& cfg, std::uint64_t seed, unsigned workers)
{
    (void)seed;
    cfg.get_int("seed", 1);
    const BaseSetup base = load_base(cfg);
    const std::vector<GridPoint> grid = resolve_grid(cfg, uniform_mean_im(base.c));
    cfg.check_consumed();

    std::vector<ParityRow> rows(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const ChannelParams params{grid[i].sigma2};
        const Constellation raw = parity_constellation_search(base.c, base.timing, params);
        const Constellation fin = truncate_to_power_of_two(raw, base.delta, params);
        const double tsmi =
            uniform_time_scaled_mi(fin, make_pulse_timing(fin, base.delta), params);
        std::string ims;
        for (const Eigenvalue& p : fin.points) {
            if (!ims.empty())
                ims += ';';
            ims += g17(p.im);
        }
        rows[i] = {grid[i].snr_db, grid[i].sigma2, raw.size(), fin.size(), ims, tsmi};
    });

    ParityReport report;
    report.rows = std::move(rows);
    return report;
}

namespace {

struct FrameOutcome {
    std::uint64_t errors = 0;
    std::uint64_t merged = 0;
    std::uint64_t mismatches = 0;
    std::uint64_t absences = 0;
};

struct ChunkTotals {
    std::uint64_t frames = 0;
    FrameOutcome sum;
};

// Frames are processed in fixed-size chunks so the stopping decision, and
// with it the emitted report, does not depend on the worker count.
ChunkTotals run_chunked(std::uint64_t max_frames, std::uint64_t target_errors,
                        std::uint64_t chunk, unsigned workers,
                        const std::function<FrameOutcome(std::uint64_t)>& frame_fn)
{
    ChunkTotals totals;
    while (totals.frames < max_frames && totals.sum.errors < target_errors) {
        const std::uint64_t n = std::min<std::uint64_t>(chunk, max_frames - totals.frames);
        std::vector<FrameOutcome> out(n);
        parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
            out[i] = frame_fn(totals.frames + i);
        });
        for (const FrameOutcome& o : out) {
            totals.sum.errors += o.errors;
            totals.sum.merged += o.merged;
            totals.sum.mismatches += o.mismatches;
            totals.sum.absences += o.absences;
        }
        totals.frames += n;
    }
    return totals;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits)
        b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

struct PesSystem {
    PesFrameSpec spec;
    Composition comp;
    InputDistribution prior; // empirical composition frequencies
    std::size_t n_s = 0;
    std::size_t n_par = 0;
    std::size_t k_s = 0;
    std::vector<std::uint32_t> par_to_base; // parity index -> base constellation index
    double rate_per_time = 0.0;
    double rate_per_symbol = 0.0;
    double avg_interval = 0.0;
};

PesSystem build_pes_system(const BaseSetup& base, const ParityCheckMatrix& code,
                           const ChannelParams& design, const OptimizeOptions& opt)
{
    PesSystem sys;
    const double rc = static_cast<double>(code.k()) / static_cast<double>(code.n);
    sys.spec = build_frame_spec(base.c, rc, design, base.timing);
    if (code.k() % sys.spec.m_bits != 0)
        throw std::invalid_argument("code info bits are not a whole number of info symbols");
    if ((code.n - code.k()) % sys.spec.m_par_bits != 0)
        throw std::invalid_argument("code parity bits are not a whole number of parity symbols");
    sys.n_s = code.k() / sys.spec.m_bits;
    sys.n_par = (code.n - code.k()) / sys.spec.m_par_bits;

    const CapacityResult cap = optimize_distribution(base.c, base.timing, design, opt);
    sys.comp = quantize_composition(cap.distribution, sys.n_s);
    sys.k_s = ccdm_input_bits(sys.comp);

    std::vector<double> probs(sys.comp.counts.size());
    for (std::size_t k = 0; k < probs.size(); ++k)
        probs[k] = static_cast<double>(sys.comp.counts[k]) / static_cast<double>(sys.n_s);
    sys.prior = make_distribution(std::move(probs));

    sys.par_to_base.resize(sys.spec.parity_constellation.size());
    for (std::size_t j = 0; j < sys.spec.parity_constellation.size(); ++j) {
        const double im = sys.spec.parity_constellation.points[j].im;
        std::size_t found = base.c.size();
        for (std::size_t i = 0; i < base.c.size(); ++i)
            if (base.c.points[i].im == im)
                found = i;
        if (found == base.c.size())
            throw std::logic_error("parity alphabet point missing from the base constellation");
        sys.par_to_base[j] = static_cast<std::uint32_t>(found);
    }

    const PulseTiming par_timing = make_pulse_timing(sys.spec.parity_constellation, base.delta);
    const double tbar_par = average_symbol_interval(
        uniform_distribution(sys.spec.parity_constellation.size()), par_timing);
    double shaped_time = 0.0;
    for (std::size_t k = 0; k < sys.comp.counts.size(); ++k)
        shaped_time += static_cast<double>(sys.comp.counts[k]) * base.timing.durations[k];
    const double total_time = shaped_time + static_cast<double>(sys.n_par) * tbar_par;
    const double total_syms = static_cast<double>(sys.n_s + sys.n_par);
    sys.rate_per_time = static_cast<double>(sys.k_s) / total_time;
    sys.rate_per_symbol = static_cast<double>(sys.k_s) / total_syms;
    sys.avg_interval = total_time / total_syms;
    return sys;
}

struct PesTxFrame {
    std::vector<std::uint8_t> data;
    PesFrame frame;
};

PesTxFrame pes_transmit(const PesSystem& sys, const ParityCheckMatrix& code,
                        std::mt19937_64& rng)
{
    PesTxFrame tx;
    tx.data = random_bits(sys.k_s, rng);
    const std::vector<std::uint32_t> symbols = ccdm_encode(tx.data, sys.comp);
    const std::vector<std::uint8_t> info_bits =
        binary_image(symbols, sys.spec.info_constellation.size());
    const std::vector<std::uint8_t> cw = encode_systematic(info_bits, code);
    std::vector<std::uint8_t> parity(code.m);
    for (std::size_t r = 0; r < code.m; ++r)
        parity[r] = cw[code.pivot_cols[r]];
    tx.frame = assemble_frame(symbols, parity, sys.spec);
    return tx;
}

std::uint64_t pes_receive(const PesSystem& sys, const ParityCheckMatrix& code,
                          const ChannelParams& params, const std::vector<double>& psi,
                          const std::vector<std::uint8_t>& data, double llr_cap,
                          std::size_t bp_iters)
{
    const std::vector<double> frame_llrs =
        demap_bit_llrs(psi, sys.n_s, sys.spec, sys.prior, params, llr_cap);
    std::vector<double> cw_llrs(code.n, 0.0);
    for (std::size_t i = 0; i < code.k(); ++i)
        cw_llrs[code.free_cols[i]] = frame_llrs[i];
    for (std::size_t r = 0; r < code.m; ++r)
        cw_llrs[code.pivot_cols[r]] = frame_llrs[code.k() + r];
    const DecodeResult dec = bp_decode(cw_llrs, code, bp_iters);

    std::vector<std::uint8_t> info_hat(code.k());
    for (std::size_t i = 0; i < code.k(); ++i)
        info_hat[i] = dec.bits[code.free_cols[i]];
    const std::vector<std::uint32_t> sym_hat =
        label_symbols(info_hat, sys.spec.info_constellation.size());

    std::vector<std::uint64_t> counts(sys.comp.counts.size(), 0);
    for (const std::uint32_t s : sym_hat)
        ++counts[s];
    if (counts != sys.comp.counts) {
        // unrecoverable frame: score it as the all-zero decision
        std::uint64_t errors = 0;
        for (const std::uint8_t b : data)
            errors += b;
        return errors;
    }
    const std::vector<std::uint8_t> data_hat = ccdm_decode(sym_hat, sys.comp);
    std::uint64_t errors = 0;
    for (std::size_t b = 0; b < data.size(); ++b)
        errors += data[b] != data_hat[b];
    return errors;
}

struct BaselineSystem {
    Constellation c;
    double t_fixed = 0.0;
    std::size_t bits_per = 0;
    std::size_t n_sym = 0;
    InputDistribution uniform;
    double rate_per_time = 0.0;
    double rate_per_symbol = 0.0;
};

BaselineSystem build_baseline_system(const BaseSetup& base, const ParityCheckMatrix& code)
{
    BaselineSystem sys;
    sys.c = baseline_constellation(base.m, base.lambda_max);
    sys.t_fixed = pulse_width(sys.c.points[0], base.delta);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < base.m)
        ++bits;
    if ((std::size_t{1} << bits) != base.m)
        throw std::invalid_argument("baseline constellation size must be a power of two");
    sys.bits_per = bits;
    if (code.n % bits != 0)
        throw std::invalid_argument("code length is not a whole number of baseline symbols");
    sys.n_sym = code.n / bits;
    sys.uniform = uniform_distribution(base.m);
    sys.rate_per_symbol = static_cast<double>(code.k()) / static_cast<double>(sys.n_sym);
    sys.rate_per_time = sys.rate_per_symbol / sys.t_fixed;
    return sys;
}

std::uint64_t baseline_mc_frame(const BaselineSystem& sys, const ParityCheckMatrix& code,
                                const ChannelParams& params, double llr_cap,
                                std::size_t bp_iters, std::mt19937_64& rng)
{
    const std::vector<std::uint8_t> data = random_bits(code.k(), rng);
    const std::vector<std::uint8_t> cw = encode_systematic(data, code);
    const std::vector<std::uint32_t> syms = label_symbols(cw, sys.c.size());
    std::vector<double> psi(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i)
        psi[i] = channel_sample(sys.c.points[syms[i]], params, rng);
    const std::vector<double> llrs =
        demap_alphabet_bit_llrs(psi, sys.c, sys.uniform, params, llr_cap);
    const DecodeResult dec = bp_decode(llrs, code, bp_iters);
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < code.k(); ++i)
        errors += dec.bits[code.free_cols[i]] != data[i];
    return errors;
}

constexpr std::uint64_t kMcChunk = 256;
constexpr std::uint64_t kSsfmChunk = 16;

}

McReport run_mc_ber(const Config& cfg, std::uint64_t seed, unsigned workers)
{
    cfg.get_int("seed", 1);
    const BaseSetup base = load_base(cfg);
    const ParityCheckMatrix code = load_code_file(cfg.get_string("code.file"));
    const std::string system = cfg.get_string("mc.system", "pes");
    if (system != "pes" && system != "baseline")
        throw std::invalid_argument("mc.system must be pes or baseline");
    const auto max_frames = static_cast<std::uint64_t>(cfg.get_int("mc.max_frames", 100000));
    const auto target_errors = static_cast<std::uint64_t>(cfg.get_int("mc.target_errors", 100));
    const double llr_cap = cfg.get_double("demap.llr_cap", 40.0);
    const auto bp_iters = static_cast<std::size_t>(cfg.get_int("bp.max_iter", 50));
    const OptimizeOptions opt = solver_options(cfg);
    std::optional<double> design_sigma2;
    if (cfg.has("shaping.design_sigma2"))
        design_sigma2 = cfg.get_double("shaping.design_sigma2");
    const std::vector<GridPoint> grid = resolve_grid(cfg, uniform_mean_im(base.c));
    cfg.check_consumed();

    McReport report;

    if (system == "baseline") {
        const BaselineSystem sys = build_baseline_system(base, code);
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const ChannelParams params{grid[p].sigma2};
            const ChunkTotals totals = run_chunked(
                max_frames, target_errors, kMcChunk, workers, [&](std::uint64_t f) {
                    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(p), f);
                    return FrameOutcome{
                        baseline_mc_frame(sys, code, params, llr_cap, bp_iters, rng), 0, 0, 0};
                });
            const double bits =
                static_cast<double>(totals.frames) * static_cast<double>(code.k());
            report.rows.push_back({grid[p].snr_db,
                                   bits > 0.0 ? static_cast<double>(totals.sum.errors) / bits
                                              : 0.0,
                                   totals.frames, totals.sum.errors, sys.rate_per_time,
                                   sys.rate_per_symbol, sys.t_fixed});
        }
        return report;
    }

    std::optional<PesSystem> fixed_sys;
    if (design_sigma2.has_value())
        fixed_sys = build_pes_system(base, code, ChannelParams{*design_sigma2}, opt);

    for (std::size_t p = 0; p < grid.size(); ++p) {
        const ChannelParams params{grid[p].sigma2};
        const PesSystem sys =
            fixed_sys.has_value() ? *fixed_sys : build_pes_system(base, code, params, opt);
        const ChunkTotals totals = run_chunked(
            max_frames, target_errors, kMcChunk, workers, [&](std::uint64_t f) {
                std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(p), f);
                const PesTxFrame tx = pes_transmit(sys, code, rng);
                std::vector<double> psi(sys.n_s + sys.n_par);
                for (std::size_t i = 0; i < sys.n_s; ++i)
                    psi[i] = channel_sample(base.c.points[tx.frame.info_symbols[i]], params, rng);
                for (std::size_t j = 0; j < sys.n_par; ++j)
                    psi[sys.n_s + j] = channel_sample(
                        sys.spec.parity_constellation.points[tx.frame.parity_symbols[j]], params,
                        rng);
                return FrameOutcome{
                    pes_receive(sys, code, params, psi, tx.data, llr_cap, bp_iters), 0, 0, 0};
            });
        const double bits = static_cast<double>(totals.frames) * static_cast<double>(sys.k_s);
        report.rows.push_back({grid[p].snr_db,
                               bits > 0.0 ? static_cast<double>(totals.sum.errors) / bits : 0.0,
                               totals.frames, totals.sum.errors, sys.rate_per_time,
                               sys.rate_per_symbol, sys.avg_interval});
    }
    return report;
}

namespace {

FiberParams load_fiber(const Config& cfg)
{
    FiberParams fiber;
    fiber.span_length_km = cfg.get_double("fiber.span_length_km", fiber.span_length_km);
    fiber.beta2_ps2_km = cfg.get_double("fiber.beta2_ps2_km", fiber.beta2_ps2_km);
    fiber.gamma_per_w_km = cfg.get_double("fiber.gamma_per_w_km", fiber.gamma_per_w_km);
    fiber.alpha_db_km = cfg.get_double("fiber.alpha_db_km", fiber.alpha_db_km);
    fiber.length_km = cfg.get_double("fiber.length_km", fiber.length_km);
    fiber.phonon_occupancy = cfg.get_double("fiber.kt", fiber.phonon_occupancy);
    fiber.photon_energy_j = cfg.get_double("fiber.photon_energy_j", fiber.photon_energy_j);
    const std::string amp = cfg.get_string("fiber.amplification", "distributed");
    if (amp == "distributed")
        fiber.amplification = Amplification::distributed_raman;
    else if (amp == "lumped")
        fiber.amplification = Amplification::lumped_edfa;
    else
        throw std::invalid_argument("fiber.amplification must be distributed or lumped");
    return fiber;
}

}

McReport run_ssfm_ber(const Config& cfg, std::uint64_t seed, unsigned workers)
{
    cfg.get_int("seed", 1);
    const BaseSetup base = load_base(cfg);
    const ParityCheckMatrix code = load_code_file(cfg.get_string("code.file"));
    const std::string system = cfg.get_string("mc.system", "pes");
    if (system != "pes" && system != "baseline")
        throw std::invalid_argument("mc.system must be pes or baseline");
    const auto max_frames = static_cast<std::uint64_t>(cfg.get_int("mc.max_frames", 200));
    const auto target_errors = static_cast<std::uint64_t>(cfg.get_int("mc.target_errors", 100));
    const double llr_cap = cfg.get_double("demap.llr_cap", 40.0);
    const auto bp_iters = static_cast<std::size_t>(cfg.get_int("bp.max_iter", 50));
    const OptimizeOptions opt = solver_options(cfg);
    const FiberParams fiber_base = load_fiber(cfg);
    const double dt = cfg.get_double("ssfm.dt", 0.01);
    const double step_km = cfg.get_double("ssfm.step_km", 0.1);
    const auto guard_slots = static_cast<std::size_t>(cfg.get_int("ssfm.guard_slots", 2));
    const bool noiseless = cfg.get_bool("ssfm.noiseless", false);
    std::optional<double> theta_cfg;
    if (cfg.has("detector.theta"))
        theta_cfg = cfg.get_double("detector.theta");
    std::optional<double> delta_t_cfg;
    if (cfg.has("detector.delta_t"))
        delta_t_cfg = cfg.get_double("detector.delta_t");

    const bool has_len = cfg.has("grid.lengths_km");
    const bool has_kt = cfg.has("grid.kt");
    if (has_len == has_kt)
        throw std::invalid_argument(
            "ssfm config must set exactly one of grid.lengths_km and grid.kt");
    std::vector<FiberParams> points;
    if (has_len) {
        for (const double l : cfg.get_double_list("grid.lengths_km")) {
            FiberParams f = fiber_base;
            f.length_km = l;
            points.push_back(f);
        }
    } else {
        for (const double kt : cfg.get_double_list("grid.kt")) {
            FiberParams f = fiber_base;
            f.phonon_occupancy = kt;
            points.push_back(f);
        }
    }
    cfg.check_consumed();

    const double e_ref = uniform_mean_im(base.c);
    const double noise_cutoff = 10.0 * base.c.points.back().im;
    McReport report;
    report.mode = "ssfm";

    for (std::size_t p = 0; p < points.size(); ++p) {
        const FiberParams& fiber = points[p];
        const NormalizationMap map = make_normalization(fiber);
        const ChannelParams params{map.sigma2};
        const double snr = 10.0 * std::log10(4.0 * e_ref / map.sigma2);

        if (system == "baseline") {
            const BaselineSystem sys = build_baseline_system(base, code);
            const PulseTiming fixed_timing{base.delta,
                                           std::vector<double>(base.m, sys.t_fixed)};
            const ChunkTotals totals = run_chunked(
                max_frames, target_errors, kSsfmChunk, workers, [&](std::uint64_t f) {
                    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(p), f);
                    const std::vector<std::uint8_t> data = random_bits(code.k(), rng);
                    const std::vector<std::uint8_t> cw = encode_systematic(data, code);
                    const std::vector<std::uint32_t> syms = label_symbols(cw, sys.c.size());
                    const FrameWaveform fw =
                        synthesize_frame(syms, sys.c, fixed_timing, dt, guard_slots);
                    const WaveformGrid rx =
                        ssfm_propagate(fw.grid, fiber, map, noiseless ? nullptr : &rng,
                                       step_km, noise_cutoff);
                    FrameOutcome out;
                    std::vector<double> psi(syms.size(), 0.0);
                    for (std::size_t i = 0; i < syms.size(); ++i) {
                        WaveformGrid w;
                        w.dt = rx.dt;
                        const double lo = static_cast<double>(i) * sys.t_fixed;
                        const double hi = lo + sys.t_fixed;
                        const auto b = std::min(rx.samples.size(),
                                                static_cast<std::size_t>(std::max(
                                                    0.0, std::ceil((lo - rx.t0) / rx.dt))));
                        const auto e = std::min(rx.samples.size(),
                                                static_cast<std::size_t>(std::max(
                                                    0.0, std::ceil((hi - rx.t0) / rx.dt))));
                        if (b >= e) {
                            ++out.absences;
                            continue;
                        }
                        w.t0 = rx.t0 + rx.dt * static_cast<double>(b);
                        w.samples.assign(rx.samples.begin() + static_cast<std::ptrdiff_t>(b),
                                         rx.samples.begin() + static_cast<std::ptrdiff_t>(e));
                        const auto point = forward_nft_eigenvalue(w, sys.c.lambda_max.im);
                        if (point.has_value())
                            psi[i] = point->eigenvalue.imag();
                        else
                            ++out.absences;
                    }
                    const std::vector<double> llrs =
                        demap_alphabet_bit_llrs(psi, sys.c, sys.uniform, params, llr_cap);
                    const DecodeResult dec = bp_decode(llrs, code, bp_iters);
                    for (std::size_t i = 0; i < code.k(); ++i)
                        out.errors += dec.bits[code.free_cols[i]] != data[i];
                    return out;
                });
            const double bits =
                static_cast<double>(totals.frames) * static_cast<double>(code.k());
            report.rows.push_back({snr,
                                   bits > 0.0 ? static_cast<double>(totals.sum.errors) / bits
                                              : 0.0,
                                   totals.frames, totals.sum.errors, sys.rate_per_time,
                                   sys.rate_per_symbol, sys.t_fixed});
            report.merged_windows += totals.sum.merged;
            report.slot_mismatches += totals.sum.mismatches;
            report.absences += totals.sum.absences;
            continue;
        }

        const PesSystem sys = build_pes_system(base, code, params, opt);
        const double theta = theta_cfg.value_or(default_threshold(base.c));
        const double delta_t = delta_t_cfg.value_or(0.1 * base.timing.durations.back());
        const ChunkTotals totals = run_chunked(
            max_frames, target_errors, kSsfmChunk, workers, [&](std::uint64_t f) {
                std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(p), f);
                const PesTxFrame tx = pes_transmit(sys, code, rng);
                std::vector<std::uint32_t> seq = tx.frame.info_symbols;
                seq.reserve(sys.n_s + sys.n_par);
                for (const std::uint32_t j : tx.frame.parity_symbols)
                    seq.push_back(sys.par_to_base[j]);
                const FrameWaveform fw =
                    synthesize_frame(seq, base.c, base.timing, dt, guard_slots);
                const WaveformGrid rx =
                    ssfm_propagate(fw.grid, fiber, map, noiseless ? nullptr : &rng, step_km,
                                   noise_cutoff);
                const SymbolDetection det =
                    detect_symbol_sequence(rx, fw.frame_duration, base.c, base.timing, theta,
                                           delta_t, seq.size());
                FrameOutcome out;
                out.merged = det.merged_windows;
                out.mismatches = det.slot_mismatches;
                out.absences = det.absences;
                out.errors = pes_receive(sys, code, params, det.psi_im, tx.data, llr_cap,
                                         bp_iters);
                return out;
            });
        const double bits = static_cast<double>(totals.frames) * static_cast<double>(sys.k_s);
        report.rows.push_back({snr,
                               bits > 0.0 ? static_cast<double>(totals.sum.errors) / bits : 0.0,
                               totals.frames, totals.sum.errors, sys.rate_per_time,
                               sys.rate_per_symbol, sys.avg_interval});
        report.merged_windows += totals.sum.merged;
        report.slot_mismatches += totals.sum.mismatches;
        report.absences += totals.sum.absences;
    }
    return report;
}

std::vector<double> ssfm_eigenvalue_samples(const SsfmSampleSetup& setup, std::size_t n_pulses,
                                            std::uint64_t seed, unsigned workers)
{
    if (!(setup.lambda.im > 0.0))
        throw std::invalid_argument("ssfm_eigenvalue_samples: eigenvalue must be positive");
    if (setup.pulses_per_frame == 0 || n_pulses == 0)
        throw std::invalid_argument("ssfm_eigenvalue_samples: nothing to sample");

    const NormalizationMap map = make_normalization(setup.fiber);
    const Constellation c =
        make_constellation({Eigenvalue{0.0}, setup.lambda}, setup.lambda);
    const PulseTiming timing = make_pulse_timing(c, setup.delta);
    const double theta = setup.theta.value_or(default_threshold(c));
    const double delta_t = setup.delta_t.value_or(0.1 * timing.durations.back());
    const std::vector<std::uint32_t> seq(setup.pulses_per_frame, 1u);
    const FrameWaveform clean = synthesize_frame(seq, c, timing, setup.dt, setup.guard_slots);
    const double noise_cutoff = setup.noise_cutoff.value_or(10.0 * setup.lambda.im);

    std::vector<double> samples;
    std::uint64_t frame = 0;
    constexpr std::uint64_t kChunk = 32;
    const std::uint64_t frame_cap =
        64 + 8 * ((n_pulses + setup.pulses_per_frame - 1) / setup.pulses_per_frame);
    while (samples.size() < n_pulses) {
        if (frame >= frame_cap)
            throw std::runtime_error(
                "ssfm_eigenvalue_samples: detection loses too many pulses to reach the "
                "requested sample count");
        std::vector<std::vector<double>> per_frame(kChunk);
        parallel_for(kChunk, workers, [&](std::size_t i) {
            std::mt19937_64 rng = stream_rng(seed, 0, frame + i);
            const WaveformGrid rx = ssfm_propagate(clean.grid, setup.fiber, map, &rng,
                                                   setup.step_km, noise_cutoff);
            const SymbolDetection det = detect_symbol_sequence(
                rx, clean.frame_duration, c, timing, theta, delta_t, 0);
            for (std::size_t s = 0; s < det.psi_im.size(); ++s)
                if (det.hard_symbols[s] == 1u && det.psi_im[s] > 0.0)
                    per_frame[i].push_back(det.psi_im[s]);
        });
        for (const auto& v : per_frame)
            samples.insert(samples.end(), v.begin(), v.end());
        frame += kChunk;
    }
    samples.resize(n_pulses);
    return samples;
}

namespace {

void preamble(std::ostream& out, const char* mode, const Config& cfg, std::uint64_t seed)
{
    out << "# mode: " << mode << "\n";
    out << "# seed: " << seed << "\n";
    for (const auto& [key, value] : cfg.entries())
        out << "# config: " << key << "=" << value << "\n";
}

}

void write_csv(std::ostream& out, const CapacityReport& report, const Config& cfg,
               std::uint64_t seed)
{
    preamble(out, "capacity", cfg, seed);
    out << "snr_db,sigma2,m,system,rate_per_time,mi_per_symbol,avg_interval,converged\n";
    for (const CapacityRow& r : report.rows)
        out << g17(r.snr_db) << ',' << g17(r.sigma2) << ',' << r.m << ',' << r.system << ','
            << g17(r.rate_per_time) << ',' << g17(r.mi_per_symbol) << ',' << g17(r.avg_interval)
            << ',' << (r.converged ? 1 : 0) << "\n";
}

void write_csv(std::ostream& out, const AirReport& report, const Config& cfg, std::uint64_t seed)
{
    preamble(out, "air", cfg, seed);
    out << "snr_db,code_rate,r_ts,r_ps_per_symbol,r_ps_per_time,capacity_per_time\n";
    for (const AirRow& r : report.rows)
        out << g17(r.snr_db) << ',' << g17(r.code_rate) << ',' << g17(r.r_ts) << ','
            << g17(r.r_ps_per_symbol) << ',' << g17(r.r_ps_per_time) << ','
            << g17(r.capacity_per_time) << "\n";
}

void write_csv(std::ostream& out, const ParityReport& report, const Config& cfg,
               std::uint64_t seed)
{
    preamble(out, "parity", cfg, seed);
    out << "snr_db,sigma2,m_par_raw,m_par,parity_im,uniform_tsmi\n";
    for (const ParityRow& r : report.rows)
        out << g17(r.snr_db) << ',' << g17(r.sigma2) << ',' << r.m_par_raw << ',' << r.m_par
            << ',' << r.parity_im << ',' << g17(r.uniform_tsmi) << "\n";
}

void write_csv(std::ostream& out, const McReport& report, const Config& cfg, std::uint64_t seed)
{
    preamble(out, report.mode.c_str(), cfg, seed);
    out << "# detector: merged=" << report.merged_windows
        << " mismatches=" << report.slot_mismatches << " absences=" << report.absences << "\n";
    out << "snr_db,ber,frames,bit_errors,rate_per_time,rate_per_symbol,avg_interval\n";
    for (const McRow& r : report.rows)
        out << g17(r.snr_db) << ',' << g17(r.ber) << ',' << r.frames << ',' << r.bit_errors
            << ',' << g17(r.rate_per_time) << ',' << g17(r.rate_per_symbol) << ','
            << g17(r.avg_interval) << "\n";
}

int run_mode(const std::string& mode, const std::string& config_path,
             const std::string& out_path, std::optional<std::uint64_t> seed_override,
             unsigned workers)
{
    const Config cfg = Config::from_file(config_path);
    const std::uint64_t seed =
        seed_override.has_value() ? *seed_override
                                  : static_cast<std::uint64_t>(cfg.get_int("seed", 1));

    std::ostringstream buf;
    if (mode == "capacity") {
        write_csv(buf, run_capacity_sweep(cfg, seed, workers), cfg, seed);
    } else if (mode == "air") {
        write_csv(buf, run_air_sweep(cfg, seed, workers), cfg, seed);
    } else if (mode == "parity") {
        write_csv(buf, run_parity_search(cfg, seed, workers), cfg, seed);
    } else if (mode == "mc") {
        write_csv(buf, run_mc_ber(cfg, seed, workers), cfg, seed);
    } else if (mode == "ssfm") {
        write_csv(buf, run_ssfm_ber(cfg, seed, workers), cfg, seed);
    } else {
        throw std::invalid_argument("unknown mode: " + mode);
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + out_path);
    out << buf.str();
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing output file: " + out_path);
    return 0;
}

}
