#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pes/model.hpp"
#include "pes/waveform.hpp"

namespace pes {

// Flat key=value run description. '#' starts a comment, whitespace around
// keys and values is ignored, dotted keys express sections. Every key must
// be consumed by the run that loads the file; unknown keys fail validation.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;

    // throws if any key was never consumed by a getter
    void check_consumed() const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
    mutable std::vector<std::string> consumed_;

    std::string fetch(const std::string& key) const;
};

struct CapacityRow {
    double snr_db = 0.0;
    double sigma2 = 0.0;
    std::size_t m = 0;
    std::string system;
    double rate_per_time = 0.0;
    double mi_per_symbol = 0.0;
    double avg_interval = 0.0;
    bool converged = false;
};

struct CapacityReport {
    std::vector<CapacityRow> rows;
};

struct AirRow {
    double snr_db = 0.0;
    double code_rate = 0.0;
    double r_ts = 0.0;
    double r_ps_per_symbol = 0.0;
    double r_ps_per_time = 0.0;
    double capacity_per_time = 0.0;
};

struct AirReport {
    std::vector<AirRow> rows;
};

struct ParityRow {
    double snr_db = 0.0;
    double sigma2 = 0.0;
    std::size_t m_par_raw = 0;
    std::size_t m_par = 0;
    std::string parity_im; // ';'-joined eigenvalues of the final alphabet
    double uniform_tsmi = 0.0;
};

struct ParityReport {
    std::vector<ParityRow> rows;
};

struct McRow {
    double snr_db = 0.0;
    double ber = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    double rate_per_time = 0.0;
    double rate_per_symbol = 0.0;
    double avg_interval = 0.0;
};

struct McReport {
    std::string mode = "mc";  // "mc" or "ssfm", echoed in the output preamble
    std::vector<McRow> rows;
    // detector bookkeeping, nonzero only for the physical-layer chain
    std::uint64_t merged_windows = 0;
    std::uint64_t slot_mismatches = 0;
    std::uint64_t absences = 0;
};

CapacityReport run_capacity_sweep(const Config& cfg, std::uint64_t seed, unsigned workers);
AirReport run_air_sweep(const Config& cfg, std::uint64_t seed, unsigned workers);
ParityReport run_parity_search(const Config& cfg, std::uint64_t seed, unsigned workers);
McReport run_mc_ber(const Config& cfg, std::uint64_t seed, unsigned workers);
McReport run_ssfm_ber(const Config& cfg, std::uint64_t seed, unsigned workers);

void write_csv(std::ostream& out, const CapacityReport& report, const Config& cfg,
               std::uint64_t seed);
void write_csv(std::ostream& out, const AirReport& report, const Config& cfg, std::uint64_t seed);
void write_csv(std::ostream& out, const ParityReport& report, const Config& cfg,
               std::uint64_t seed);
void write_csv(std::ostream& out, const McReport& report, const Config& cfg, std::uint64_t seed);

// Loads the config, runs the named mode (capacity | air | parity | mc |
// ssfm) and writes the CSV report to out_path. seed_override, when set,
// wins over the config's seed key. Returns 0 on success; failures throw.
int run_mode(const std::string& mode, const std::string& config_path,
             const std::string& out_path, std::optional<std::uint64_t> seed_override,
             unsigned workers);

// Physical-layer sampling harness for model validation: propagates frames
// of identical solitons and extracts the received Im{lambda} of each pulse
// through the detection pipeline.
struct SsfmSampleSetup {
    FiberParams fiber;
    Eigenvalue lambda;
    double delta = 0.005;
    double dt = 0.01;
    double step_km = 0.25;
    std::size_t pulses_per_frame = 32;
    std::size_t guard_slots = 2;
    std::optional<double> theta;   // default: 75% of the clean amplitude
    std::optional<double> delta_t; // default: 10% of the slot duration
    // Amplifier noise bandwidth (normalized angular frequency). The default
    // is five times the soliton bandwidth scale 2 Im{lambda}.
    std::optional<double> noise_cutoff;
};

std::vector<double> ssfm_eigenvalue_samples(const SsfmSampleSetup& setup, std::size_t n_pulses,
                                            std::uint64_t seed, unsigned workers);

}
