#pragma once

#include <cstddef>
#include <vector>

namespace pes {

// Discrete eigenvalue of the focusing Zakharov-Shabat problem. The
// information-bearing quantity is the imaginary part; the real part is
// zero by construction for the pulses considered here.
struct Eigenvalue {
    double im = 0.0;
};

// Ordered eigenvalue alphabet together with its peak constraint.
struct Constellation {
    std::vector<Eigenvalue> points;
    Eigenvalue lambda_max;

    std::size_t size() const { return points.size(); }
};

// Validates: at least two points, strictly ascending, nonnegative, none
// above the peak constraint.
Constellation make_constellation(std::vector<Eigenvalue> points, Eigenvalue lambda_max);

// Sub-alphabet picked by ascending indices; keeps the peak constraint of
// the base constellation.
Constellation make_subset(const Constellation& base, const std::vector<std::size_t>& indices);

// M points spaced linearly from zero to lambda_max inclusive.
Constellation linear_constellation(std::size_t m, Eigenvalue lambda_max);

// Transmit duration of the soliton carrying eigenvalue lambda, defined as
// the support containing all but a fraction delta of the pulse energy.
double pulse_width(Eigenvalue lambda, double delta);

// Per-symbol transmit durations for a constellation at cutoff delta. The
// zero eigenvalue transmits nothing but occupies the slot of the largest
// (shortest-pulse) constellation point.
struct PulseTiming {
    double delta = 0.0;
    std::vector<double> durations;
};

PulseTiming make_pulse_timing(const Constellation& c, double delta);

// Residual inter-symbol energy leakage test for the truncated pulses: the
// leaked fraction delta/(2-delta) must stay below the given threshold.
// The quantity is independent of the eigenvalue; the parameter is kept so
// call sites read naturally per symbol.
bool guard_condition_holds(Eigenvalue lambda, double delta, double threshold);

// Probability mass function aligned with a constellation.
struct InputDistribution {
    std::vector<double> probs;
};

InputDistribution make_distribution(std::vector<double> probs);
InputDistribution uniform_distribution(std::size_t m);

double average_symbol_interval(const InputDistribution& dist, const PulseTiming& timing);

// Normalized received-noise spectral density.
struct ChannelParams {
    double sigma2 = 0.0;
};

// 4 E[im] / sigma2 for the given input distribution.
double snr_linear(const InputDistribution& dist, const Constellation& c, const ChannelParams& params);
double snr_db(const InputDistribution& dist, const Constellation& c, const ChannelParams& params);

double entropy_bits(const InputDistribution& dist);

}
