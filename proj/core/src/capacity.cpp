#include "pes/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pes/channel.hpp"

namespace pes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Output range carrying all but ~1e-15 of the conditional mass. The
// conditional is a scaled noncentral chi-square; the bound follows from
// its subexponential tail with mean x + s2 and variance s2^2/2 + x s2.
void conditional_range(double x, double s2, double& lo, double& hi)
{
    const double spread = 19.0 * s2 + 3.0 * s2 * std::sqrt(4.0 + 8.0 * x / s2);
    lo = std::max(0.0, x - spread);
    hi = x + spread;
}

}

DensityTable::DensityTable(const Constellation& c, const ChannelParams& params, double abs_tol)
    : m_(c.size()), sigma2_(params.sigma2)
{
    if (!(params.sigma2 > 0.0))
        throw std::invalid_argument("density table: sigma2 must be positive");

    QuadratureOptions opt;
    opt.abs_tol = abs_tol;
    opt.rel_tol = abs_tol;
    opt.max_segments = 2000;

    owner_begin_.assign(m_ + 1, 0);
    for (std::size_t k = 0; k < m_; ++k) {
        const double x = c.points[k].im;
        double lo = 0.0, hi = 0.0;
        conditional_range(x, sigma2_, lo, hi);
        const double mean = x + sigma2_;
        const double sd = std::sqrt(0.5 * sigma2_ * sigma2_ + x * sigma2_);
        std::vector<double> bp = {lo, mean - 8.0 * sd, mean - 2.0 * sd, mean,
                                  mean + 2.0 * sd, mean + 8.0 * sd, hi};
        for (double& b : bp)
            b = std::clamp(b, lo, hi);
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

        const Eigenvalue lambda{x};
        QuadratureGrid grid = build_grid(
            [&](double y) { return channel_density(y, lambda, params); }, bp, opt);
        if (!grid.converged)
            throw std::runtime_error("density table: conditional quadrature did not converge, "
                                     "error estimate " + std::to_string(grid.error_estimate));
        nodes_.insert(nodes_.end(), grid.nodes.begin(), grid.nodes.end());
        weights_.insert(weights_.end(), grid.weights.begin(), grid.weights.end());
        owner_begin_[k + 1] = nodes_.size();
    }

    const std::size_t n = nodes_.size();
    dens_.resize(m_ * n);
    log_dens_.resize(m_ * n);
    for (std::size_t j = 0; j < m_; ++j) {
        const Eigenvalue lambda = c.points[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double l = channel_log_density(nodes_[i], lambda, params);
            log_dens_[j * n + i] = l;
            dens_[j * n + i] = std::isinf(l) ? 0.0 : std::exp(l);
        }
    }
}

double DensityTable::mixture_log(const InputDistribution& dist, std::size_t node) const
{
    const std::size_t n = nodes_.size();
    double q = 0.0;
    for (std::size_t j = 0; j < m_; ++j)
        q += dist.probs[j] * dens_[j * n + node];
    if (q > 0.0)
        return std::log(q);
    // All contributions underflowed; redo the sum in the log domain.
    double peak = -kInf;
    for (std::size_t j = 0; j < m_; ++j)
        if (dist.probs[j] > 0.0)
            peak = std::max(peak, std::log(dist.probs[j]) + log_dens_[j * n + node]);
    if (std::isinf(peak))
        return -kInf;
    double acc = 0.0;
    for (std::size_t j = 0; j < m_; ++j)
        if (dist.probs[j] > 0.0)
            acc += std::exp(std::log(dist.probs[j]) + log_dens_[j * n + node] - peak);
    return peak + std::log(acc);
}

std::vector<double> DensityTable::divergences(const InputDistribution& dist) const
{
    if (dist.probs.size() != m_)
        throw std::invalid_argument("density table: distribution length mismatch");
    const std::size_t n = nodes_.size();
    std::vector<double> lnq(n);
    for (std::size_t i = 0; i < n; ++i)
        lnq[i] = mixture_log(dist, i);

    std::vector<double> d(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
        double acc = 0.0;
        for (std::size_t i = owner_begin_[k]; i < owner_begin_[k + 1]; ++i) {
            const double p = dens_[k * n + i];
            if (p <= 0.0)
                continue;
            if (std::isinf(lnq[i])) {
                acc = kInf;
                break;
            }
            acc += weights_[i] * p * (log_dens_[k * n + i] - lnq[i]);
        }
        d[k] = acc;
    }
    return d;
}

double DensityTable::mutual_information(const InputDistribution& dist) const
{
    const std::vector<double> d = divergences(dist);
    double nats = 0.0;
    for (std::size_t k = 0; k < m_; ++k)
        if (dist.probs[k] > 0.0)
            nats += dist.probs[k] * d[k];
    nats = std::max(nats, 0.0);
    return nats / std::numbers::ln2_v<double>;
}

double DensityTable::bit_conditional_entropy(const InputDistribution& prior,
                                             const std::vector<std::uint32_t>& labels,
                                             std::size_t bit, std::size_t label_bits) const
{
    if (prior.probs.size() != m_ || labels.size() != m_)
        throw std::invalid_argument("density table: labels/prior length mismatch");
    if (bit >= label_bits)
        throw std::invalid_argument("density table: bit index out of range");
    const std::size_t n = nodes_.size();
    const std::uint32_t mask = 1u << (label_bits - 1 - bit);

    double h_nats = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
        if (prior.probs[k] <= 0.0)
            continue;
        const bool bk = (labels[k] & mask) != 0;
        double acc = 0.0;
        for (std::size_t i = owner_begin_[k]; i < owner_begin_[k + 1]; ++i) {
            const double pk = dens_[k * n + i];
            if (pk <= 0.0)
                continue;
            double same = 0.0, total = 0.0;
            for (std::size_t j = 0; j < m_; ++j) {
                const double w = prior.probs[j] * dens_[j * n + i];
                total += w;
                if (((labels[j] & mask) != 0) == bk)
                    same += w;
            }
            double log_post;
            if (total > 0.0 && same > 0.0) {
                log_post = std::log(same / total);
            } else {
                // Underflowed mixture; the posterior of the own bit value
                // is dominated by the own conditional, which makes the
                // log posterior effectively zero.
                log_post = 0.0;
            }
            acc += weights_[i] * pk * log_post;
        }
        h_nats -= prior.probs[k] * acc;
    }
    h_nats = std::max(h_nats, 0.0);
    return h_nats / std::numbers::ln2_v<double>;
}

double mutual_information(const InputDistribution& dist, const Constellation& c,
                          const ChannelParams& params)
{
    return DensityTable(c, params).mutual_information(dist);
}

double time_scaled_mi(const InputDistribution& dist, const Constellation& c,
                      const PulseTiming& timing, const ChannelParams& params)
{
    return mutual_information(dist, c, params) / average_symbol_interval(dist, timing);
}

double uniform_time_scaled_mi(const Constellation& c, const PulseTiming& timing,
                              const ChannelParams& params)
{
    return time_scaled_mi(uniform_distribution(c.size()), c, timing, params);
}

CapacityResult optimize_distribution(const Constellation& c, const PulseTiming& timing,
                                     const ChannelParams& params, const OptimizeOptions& opt)
{
    if (c.size() < 2)
        throw std::invalid_argument("optimize_distribution: need at least two points");
    if (!(opt.tol > 0.0))
        throw std::invalid_argument("optimize_distribution: tol must be positive");
    const DensityTable table(c, params, opt.quad_tol);
    const std::size_t m = c.size();
    const double ln2 = std::numbers::ln2_v<double>;

    InputDistribution p = uniform_distribution(m);
    double mi = table.mutual_information(p);
    double tbar = average_symbol_interval(p, timing);
    double s = mi / tbar;

    CapacityResult result;
    result.converged = false;

    std::size_t outer = 0;
    for (outer = 1; outer <= opt.max_outer; ++outer) {
        // Inner Blahut-Arimoto pass for the tilted objective I - s*ln2*T.
        const double s_nats = s * ln2;
        double f_prev = -kInf;
        for (std::size_t inner = 0; inner < opt.max_inner; ++inner) {
            const std::vector<double> d = table.divergences(p);
            double f = 0.0;
            double peak = -kInf;
            for (std::size_t k = 0; k < m; ++k) {
                if (p.probs[k] <= 0.0)
                    continue;
                const double e = d[k] - s_nats * timing.durations[k];
                f += p.probs[k] * e;
                peak = std::max(peak, std::log(p.probs[k]) + e);
            }
            double norm = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (p.probs[k] <= 0.0)
                    continue;
                const double e = d[k] - s_nats * timing.durations[k];
                p.probs[k] = std::exp(std::log(p.probs[k]) + e - peak);
                norm += p.probs[k];
            }
            for (double& q : p.probs)
                q /= norm;
            if (std::abs(f - f_prev) <= opt.inner_rel_change * std::max(1.0, std::abs(f)))
                break;
            f_prev = f;
        }
        mi = table.mutual_information(p);
        tbar = average_symbol_interval(p, timing);
        if (std::abs(mi - s * tbar) < opt.tol * tbar) {
            result.converged = true;
            break;
        }
        s = mi / tbar;
    }

    // Drop negligible masses and refresh the summary values.
    double norm = 0.0;
    for (double& q : p.probs) {
        if (q < opt.prob_floor)
            q = 0.0;
        norm += q;
    }
    for (double& q : p.probs)
        q /= norm;
    mi = table.mutual_information(p);
    tbar = average_symbol_interval(p, timing);

    result.distribution = std::move(p);
    result.mi_bits_per_symbol = mi;
    result.avg_interval = tbar;
    result.rate = mi / tbar;
    result.state.ratio_iterate = result.rate;
    result.state.tilt = result.rate * ln2;
    result.state.iterations = std::min(outer, opt.max_outer);
    result.state.partition = 0.0;
    for (double t : timing.durations)
        result.state.partition += std::exp(-result.state.tilt * t);
    return result;
}

CapacityResult noiseless_capacity(const PulseTiming& timing, bool allow_duplicate_durations)
{
    const std::vector<double>& t = timing.durations;
    if (t.size() < 2)
        throw std::invalid_argument("noiseless_capacity: need at least two durations");
    double t_max = 0.0;
    for (double ti : t) {
        if (!(ti > 0.0))
            throw std::invalid_argument("noiseless_capacity: durations must be positive");
        t_max = std::max(t_max, ti);
    }
    if (!allow_duplicate_durations) {
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j)
                if (std::abs(t[i] - t[j]) <= 1e-12 * t_max)
                    throw std::invalid_argument("noiseless_capacity: duplicate durations");
    }

    // Root of phi(u) = sum exp(-T_k u) - 1 in u = ln x. phi is convex and
    // decreasing with phi(0) = M-1 > 0, so Newton from u = 0 approaches
    // the root monotonically from the left.
    double u = 0.0;
    std::size_t iters = 0;
    for (; iters < 200; ++iters) {
        double phi = -1.0;
        double dphi = 0.0;
        for (double ti : t) {
            const double e = std::exp(-ti * u);
            phi += e;
            dphi -= ti * e;
        }
        const double step = phi / dphi;
        u -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, u))
            break;
    }

    std::vector<double> probs(t.size());
    double partition = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        probs[k] = std::exp(-u * t[k]);
        partition += probs[k];
    }
    for (double& p : probs)
        p /= partition;

    CapacityResult result;
    result.distribution = InputDistribution{std::move(probs)};
    result.mi_bits_per_symbol = entropy_bits(result.distribution);
    result.avg_interval = average_symbol_interval(result.distribution, timing);
    result.rate = u / std::numbers::ln2_v<double>;
    result.state.tilt = u;
    result.state.partition = partition;
    result.state.ratio_iterate = result.rate;
    result.state.iterations = iters;
    result.converged = true;
    return result;
}

}
