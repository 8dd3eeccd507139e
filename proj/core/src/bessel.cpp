#include "pes/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace pes {

namespace {

// Ascending power series of I1, summed unscaled (all terms positive, no
// cancellation) and scaled at the end. Used below the crossover where the
// unscaled sum still fits comfortably in a double.
double i1e_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return std::exp(-x) * sum;
}

// Large-argument asymptotic expansion of exp(-x) I1(x). Successive terms
// obey t_k = t_{k-1} * ((2k-1)^2 - 4) / (8 k x); the sum is truncated at
// the smallest term, which at the crossover is far below double epsilon.
double i1e_asymptotic(double x)
{
    double t = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double m = 2.0 * k - 1.0;
        const double next = t * (m * m - 4.0) / (8.0 * k * x);
        if (k > 1 && std::abs(next) >= std::abs(t))
            break;
        t = next;
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum))
            break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

}

double i1e(double x)
{
    if (!(x >= 0.0))
        throw std::domain_error("i1e: argument must be nonnegative");
    return x < 30.0 ? i1e_series(x) : i1e_asymptotic(x);
}

}
