#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pes/model.hpp"

namespace pes {

enum class Amplification { distributed_raman, lumped_edfa };

// Physical fiber-link description. beta2 must be negative (focusing
// regime); for lumped amplification the span length must divide the total
// length.
struct FiberParams {
    double span_length_km = 80.0;
    double beta2_ps2_km = -21.137;
    double gamma_per_w_km = 1.4;
    double alpha_db_km = 0.2;
    double length_km = 3200.0;
    double phonon_occupancy = 1.13;
    double photon_energy_j = 1.28e-19;
    Amplification amplification = Amplification::distributed_raman;
};

// Conversion between laboratory units and the normalized evolution
// variables: t = tau / time_scale, z = l / distance, q = u * amplitude_scale.
struct NormalizationMap {
    double time_scale_s = 0.0;    // sqrt(|beta2| L / 2)
    double distance_km = 0.0;     // L
    double amplitude_scale = 0.0; // sqrt(gamma L / 2), applied to the field in sqrt(W)
    double sigma2 = 0.0;          // normalized received-noise density
    double alpha_per_km = 0.0;    // power attenuation, ln units
};

NormalizationMap make_normalization(const FiberParams& fiber);

// Complex envelope on a uniform grid in normalized units.
struct WaveformGrid {
    std::vector<std::complex<double>> samples;
    double dt = 0.0;
    double t0 = 0.0;
    double bandwidth_hz = 0.0; // physical two-sided width, reporting only

    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double duration() const { return dt * static_cast<double>(samples.size()); }
    double energy() const;
};

// Envelope in laboratory units: field in sqrt(W) on a grid in seconds.
struct PhysicalWaveform {
    std::vector<std::complex<double>> samples;
    double dt_s = 0.0;
    double t0_s = 0.0;
};

WaveformGrid normalize(const PhysicalWaveform& u, const NormalizationMap& map);
PhysicalWaveform denormalize(const WaveformGrid& q, const NormalizationMap& map);

// Soliton pulse 2 Im{lambda} sech(2 Im{lambda} t) sampled on a symmetric
// window of at least the requested length, centered at t = 0. The sample
// count is rounded up to a power of two; the window must cover the
// transmit support at cutoff delta. lambda = 0 yields the zero waveform.
WaveformGrid soliton_waveform(Eigenvalue lambda, double window, double dt, double delta);

// Pulse train for a symbol sequence: each symbol occupies its own slot
// per the timing table with the pulse centered in the slot, plus the
// requested number of empty guard slots on each side. The grid is padded
// with trailing zeros to a power-of-two length.
struct FrameWaveform {
    WaveformGrid grid;
    // Combined duration of the data slots. The grid itself starts one guard
    // earlier (t0 = -guard) and extends one guard past the last slot before
    // the power-of-two padding.
    double frame_duration = 0.0;
};

FrameWaveform synthesize_frame(const std::vector<std::uint32_t>& symbols, const Constellation& c,
                               const PulseTiming& timing, double dt,
                               std::size_t guard_slots = 1);

// Symmetric split-step integration over the full link described by the
// fiber parameters. Distributed-Raman mode propagates lossless with noise
// injected continuously; lumped-EDFA mode attenuates along each span and
// restores the power at the span boundary where the amplifier noise
// enters. The in-band noise density matches the normalization map's sigma2
// per quadrature in both modes. Pass a null rng for noiseless propagation.
//
// noise_cutoff restricts the injected noise to normalized angular
// frequencies |w| <= noise_cutoff, mimicking the finite amplifier
// bandwidth. Nonpositive values (or cutoffs at and beyond the grid
// Nyquist limit) inject white noise across the whole grid band. Band
// limiting keeps the eigenvalue statistics independent of the grid
// resolution; choose a cutoff several times the widest soliton bandwidth
// so the signal-noise interaction is unaffected.
WaveformGrid ssfm_propagate(const WaveformGrid& grid, const FiberParams& fiber,
                            const NormalizationMap& map, std::mt19937_64* rng,
                            double step_km = 0.1, double noise_cutoff = 0.0);

// Scattering data at a located zero of a(lambda) on the positive
// imaginary axis.
struct SpectralPoint {
    std::complex<double> a_coeff;
    std::complex<double> a_derivative; // da/dlambda
    std::complex<double> eigenvalue;
};

// Transfer-matrix computation of a(j xi) for xi in (0, 1.5 search_max],
// followed by Newton refinement of the sign-change bracket with the
// largest xi. Returns nothing when no zero exists in the scan range.
std::optional<SpectralPoint> forward_nft_eigenvalue(const WaveformGrid& window,
                                                    double search_max);

struct DetectionWindow {
    double t_begin = 0.0;
    double t_end = 0.0;
};

struct DetectionResult {
    std::vector<DetectionWindow> windows;
    std::size_t merged = 0; // soliton-spacing violations resolved by merging
};

// Scans |q(t)| for threshold crossings and emits each pulse interval
// extended by delta_t on both sides. Overlapping extended windows merge
// and are counted as diagnostics.
DetectionResult threshold_detect(const WaveformGrid& grid, double theta, double delta_t);

// 75% of the lowest nonzero constellation amplitude.
double default_threshold(const Constellation& c);

// Receiver pipeline for one frame: threshold detection, per-window
// eigenvalue extraction, and sequential slot reconstruction. Gaps between
// windows are segmented into zero-symbol slots; pulse slots take the
// duration of the nearest constellation point. psi_im carries the raw
// extracted Im{lambda} per slot with absent pulses reported as zero.
struct SymbolDetection {
    std::vector<double> psi_im;
    std::vector<std::uint32_t> hard_symbols;
    std::size_t merged_windows = 0;
    std::size_t absences = 0;       // windows with no discrete eigenvalue
    std::size_t slot_mismatches = 0;
};

SymbolDetection detect_symbol_sequence(const WaveformGrid& grid, double frame_duration,
                                       const Constellation& c, const PulseTiming& timing,
                                       double theta, double delta_t,
                                       std::size_t expected_symbols = 0);

}
