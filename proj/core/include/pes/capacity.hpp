#pragma once

#include <cstdint>
#include <vector>

#include "pes/model.hpp"
#include "pes/quadrature.hpp"

namespace pes {

// Frozen quadrature grids for every conditional output density of a
// constellation, with all cross densities tabulated at the nodes. The
// grids are built once per (constellation, sigma2) pair; the optimizer
// then re-evaluates mutual-information integrals cheaply while only the
// input distribution changes.
class DensityTable {
public:
    DensityTable(const Constellation& c, const ChannelParams& params, double abs_tol = 1e-11);

    std::size_t size() const { return m_; }
    double sigma2() const { return sigma2_; }

    // Mutual information in bits per symbol under the given input pmf.
    double mutual_information(const InputDistribution& dist) const;

    // Relative entropies D_k = D(p(.|x_k) || q) in nats, q being the
    // output mixture under dist. Entries for zero-probability symbols can
    // be +infinity when the mixture has no mass on their support.
    std::vector<double> divergences(const InputDistribution& dist) const;

    // H(X^bit | Y) in bits for the label bit at the given position
    // (position 0 is the first bit a symbol contributes to the stream),
    // with labels[k] the integer label of constellation point k.
    double bit_conditional_entropy(const InputDistribution& prior,
                                   const std::vector<std::uint32_t>& labels,
                                   std::size_t bit, std::size_t label_bits) const;

private:
    std::size_t m_ = 0;
    double sigma2_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<std::size_t> owner_begin_;  // m_+1 offsets into nodes_
    std::vector<double> dens_;              // m_ x nodes_.size(), row major
    std::vector<double> log_dens_;

    double mixture_log(const InputDistribution& dist, std::size_t node) const;
};

double mutual_information(const InputDistribution& dist, const Constellation& c,
                          const ChannelParams& params);

double time_scaled_mi(const InputDistribution& dist, const Constellation& c,
                      const PulseTiming& timing, const ChannelParams& params);

double uniform_time_scaled_mi(const Constellation& c, const PulseTiming& timing,
                              const ChannelParams& params);

struct SolverState {
    double tilt = 0.0;           // exponent of the tilted maximizer, nats per time
    double partition = 0.0;      // sum of exp(-tilt * T_k) at the solution
    double ratio_iterate = 0.0;  // final fractional-programming value, bits per time
    std::size_t iterations = 0;
};

struct CapacityResult {
    InputDistribution distribution;
    double rate = 0.0;  // bits per normalized time unit
    double mi_bits_per_symbol = 0.0;
    double avg_interval = 0.0;
    SolverState state;
    bool converged = false;
};

struct OptimizeOptions {
    double tol = 1e-8;             // outer stopping: |I - s T| < tol * T
    std::size_t max_outer = 100;
    std::size_t max_inner = 10000;
    double inner_rel_change = 1e-9;
    double prob_floor = 1e-12;     // final truncation of negligible masses
    double quad_tol = 1e-11;
};

// Capacity-achieving input distribution under per-symbol durations:
// outer fractional-programming iteration on the rate s, inner
// Blahut-Arimoto maximization of I(p) - s * T(p) with the duration cost
// folded into the update as an exponential tilt.
CapacityResult optimize_distribution(const Constellation& c, const PulseTiming& timing,
                                     const ChannelParams& params, const OptimizeOptions& opt = {});

// Noiseless closed form: rate log2(r) with r the unique positive root of
// sum_k x^(-T_k) = 1, achieved by P_k = r^(-T_k). Duplicate durations are
// rejected unless explicitly allowed (the closed form stays valid, but
// the standing assumption is distinct durations).
CapacityResult noiseless_capacity(const PulseTiming& timing, bool allow_duplicate_durations = false);

}
