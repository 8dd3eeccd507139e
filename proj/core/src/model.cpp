#include "pes/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pes {

Constellation make_constellation(std::vector<Eigenvalue> points, Eigenvalue lambda_max)
{
    if (points.size() < 2)
        throw std::invalid_argument("constellation: need at least two points");
    if (!(lambda_max.im > 0.0))
        throw std::invalid_argument("constellation: lambda_max must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].im >= 0.0))
            throw std::invalid_argument("constellation: eigenvalues must be nonnegative");
        if (i > 0 && !(points[i].im > points[i - 1].im))
            throw std::invalid_argument("constellation: points must be strictly ascending");
        if (points[i].im > lambda_max.im)
            throw std::invalid_argument("constellation: point exceeds lambda_max");
    }
    return Constellation{std::move(points), lambda_max};
}

Constellation make_subset(const Constellation& base, const std::vector<std::size_t>& indices)
{
    std::vector<Eigenvalue> pts;
    pts.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= base.size())
            throw std::invalid_argument("subset: index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("subset: indices must be strictly ascending");
        pts.push_back(base.points[indices[i]]);
    }
    return make_constellation(std::move(pts), base.lambda_max);
}

Constellation linear_constellation(std::size_t m, Eigenvalue lambda_max)
{
    if (m < 2)
        throw std::invalid_argument("linear_constellation: need at least two points");
    std::vector<Eigenvalue> pts(m);
    for (std::size_t i = 0; i < m; ++i)
        pts[i].im = lambda_max.im * static_cast<double>(i) / static_cast<double>(m - 1);
    pts.back().im = lambda_max.im;
    return make_constellation(std::move(pts), lambda_max);
}

double pulse_width(Eigenvalue lambda, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("pulse_width: delta must be in (0,1)");
    if (!(lambda.im > 0.0))
        throw std::domain_error("pulse_width: eigenvalue must be positive");
    return std::log(2.0 / delta - 1.0) / (2.0 * lambda.im);
}

PulseTiming make_pulse_timing(const Constellation& c, double delta)
{
    const double largest = c.points.back().im;
    if (!(largest > 0.0))
        throw std::invalid_argument("pulse_timing: largest eigenvalue must be positive");
    PulseTiming t;
    t.delta = delta;
    t.durations.reserve(c.size());
    const double zero_slot = pulse_width(Eigenvalue{largest}, delta);
    for (const Eigenvalue& p : c.points)
        t.durations.push_back(p.im > 0.0 ? pulse_width(p, delta) : zero_slot);
    return t;
}

bool guard_condition_holds(Eigenvalue /*lambda*/, double delta, double threshold)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("guard_condition_holds: delta must be in (0,1)");
    return delta / (2.0 - delta) < threshold;
}

InputDistribution make_distribution(std::vector<double> probs)
{
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw std::invalid_argument("distribution: probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("distribution: probabilities must sum to one");
    return InputDistribution{std::move(probs)};
}

InputDistribution uniform_distribution(std::size_t m)
{
    if (m == 0)
        throw std::invalid_argument("uniform_distribution: empty support");
    return InputDistribution{std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

double average_symbol_interval(const InputDistribution& dist, const PulseTiming& timing)
{
    if (dist.probs.size() != timing.durations.size())
        throw std::invalid_argument("average_symbol_interval: length mismatch");
    double t = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i)
        t += dist.probs[i] * timing.durations[i];
    return t;
}

double snr_linear(const InputDistribution& dist, const Constellation& c, const ChannelParams& params)
{
    if (dist.probs.size() != c.size())
        throw std::invalid_argument("snr: length mismatch");
    if (!(params.sigma2 > 0.0))
        throw std::invalid_argument("snr: sigma2 must be positive");
    double mean = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        mean += dist.probs[i] * c.points[i].im;
    return 4.0 * mean / params.sigma2;
}

double snr_db(const InputDistribution& dist, const Constellation& c, const ChannelParams& params)
{
    return 10.0 * std::log10(snr_linear(dist, c, params));
}

double entropy_bits(const InputDistribution& dist)
{
    double h = 0.0;
    for (double p : dist.probs)
        if (p > 0.0)
            h -= p * std::log2(p);
    return h;
}

}
