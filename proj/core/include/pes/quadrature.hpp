#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pes {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_segments = 4000;
};

// Globally adaptive Gauss-Kronrod 15(7) integration over [a, b]: the
// segment with the largest error estimate is bisected until the summed
// estimate meets abs_tol + rel_tol * |value| or the budget runs out.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt = {});

// Same, with the initial segmentation taken from ascending breakpoints.
// Useful when the integrand has known scale changes.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& opt = {});

// The converged segment list of an adaptive run expanded into explicit
// nodes and weights. Freezing the grid of a reference shape lets related
// integrands (densities times smooth factors) be re-evaluated cheaply and
// deterministically.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double error_estimate = 0.0;
    bool converged = false;

    template <typename F>
    double apply(F&& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s += weights[i] * f(nodes[i]);
        return s;
    }
};

QuadratureGrid build_grid(const std::function<double(double)>& f,
                          std::span<const double> breakpoints,
                          const QuadratureOptions& opt = {});

}
