#pragma once

#include <random>

#include "pes/model.hpp"

namespace pes {

// Conditional density of the received eigenvalue imaginary part psi_im
// given the launched eigenvalue, for the perturbation model of soliton
// amplitude noise. For a positive eigenvalue this is the noncentral
// chi-square law with four degrees of freedom expressed through the
// scaled Bessel function; for the zero eigenvalue it is the central
// limit of that law.
double channel_density(double psi_im, Eigenvalue lambda, const ChannelParams& params);

// log of channel_density, evaluated without intermediate overflow or
// underflow; returns -infinity at psi_im = 0.
double channel_log_density(double psi_im, Eigenvalue lambda, const ChannelParams& params);

// Exact draw from channel_density: (sigma2/4) times a noncentral
// chi-square variate with 4 degrees of freedom and noncentrality
// 4 im / sigma2, built from four standard normals.
double channel_sample(Eigenvalue lambda, const ChannelParams& params, std::mt19937_64& rng);

}
