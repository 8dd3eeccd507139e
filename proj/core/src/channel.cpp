#include "pes/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pes/bessel.hpp"

namespace pes {

namespace {

void check_args(double psi_im, const ChannelParams& params)
{
    if (!(psi_im >= 0.0))
        throw std::domain_error("channel density: psi_im must be nonnegative");
    if (!(params.sigma2 > 0.0))
        throw std::domain_error("channel density: sigma2 must be positive");
}

}

double channel_log_density(double psi_im, Eigenvalue lambda, const ChannelParams& params)
{
    check_args(psi_im, params);
    const double s2 = params.sigma2;
    const double y = psi_im;
    if (y == 0.0)
        return -std::numeric_limits<double>::infinity();
    const double x = lambda.im;
    if (x == 0.0)
        return std::log(4.0 * y / (s2 * s2)) - 2.0 * y / s2;
    // The Bessel argument is removed from I1 by the scaled evaluation and
    // recombined with the Gaussian-like exponent: the two together give
    // -2 (sqrt(x) - sqrt(y))^2 / sigma2, which never overflows.
    const double rx = std::sqrt(x);
    const double ry = std::sqrt(y);
    const double u = 4.0 * rx * ry / s2;
    const double d = rx - ry;
    return std::log(2.0 / s2) + 0.5 * std::log(y / x) - 2.0 * d * d / s2 + std::log(i1e(u));
}

double channel_density(double psi_im, Eigenvalue lambda, const ChannelParams& params)
{
    const double l = channel_log_density(psi_im, lambda, params);
    return std::isinf(l) ? 0.0 : std::exp(l);
}

double channel_sample(Eigenvalue lambda, const ChannelParams& params, std::mt19937_64& rng)
{
    if (!(params.sigma2 > 0.0))
        throw std::domain_error("channel_sample: sigma2 must be positive");
    if (!(lambda.im >= 0.0))
        throw std::domain_error("channel_sample: eigenvalue must be nonnegative");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double shift = std::sqrt(4.0 * lambda.im / params.sigma2);
    const double g1 = normal(rng) + shift;
    const double g2 = normal(rng);
    const double g3 = normal(rng);
    const double g4 = normal(rng);
    return 0.25 * params.sigma2 * (g1 * g1 + g2 * g2 + g3 * g3 + g4 * g4);
}

}
