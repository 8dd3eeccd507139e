#include "pes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pes {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

struct Segment {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
};

Segment eval_segment(const std::function<double(double)>& f, double a, double b,
                     std::size_t& evaluations)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWgk[i] * (f1 + f2);
        if (i % 2 == 1)
            gauss += kWg[i / 2] * (f1 + f2);
    }
    evaluations += 15;
    Segment s;
    s.a = a;
    s.b = b;
    s.value = h * kron;
    s.error = std::abs(h * (kron - gauss));
    return s;
}

bool splittable(const Segment& s)
{
    const double scale = std::max({std::abs(s.a), std::abs(s.b), 1e-300});
    return (s.b - s.a) > 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

std::vector<Segment> run_adaptive(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opt, QuadratureResult& summary)
{
    if (breakpoints.size() < 2)
        throw std::invalid_argument("integrate: need at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] < breakpoints[i - 1])
            throw std::invalid_argument("integrate: breakpoints must be ascending");

    std::vector<Segment> segs;
    summary.evaluations = 0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] > breakpoints[i - 1])
            segs.push_back(eval_segment(f, breakpoints[i - 1], breakpoints[i], summary.evaluations));
    if (segs.empty()) {
        summary.value = 0.0;
        summary.error_estimate = 0.0;
        summary.converged = true;
        return segs;
    }

    while (true) {
        double total = 0.0;
        double err = 0.0;
        for (const Segment& s : segs) {
            total += s.value;
            err += s.error;
        }
        summary.value = total;
        summary.error_estimate = err;
        const double tol = opt.abs_tol + opt.rel_tol * std::abs(total);
        if (err <= tol) {
            summary.converged = true;
            break;
        }
        if (segs.size() >= opt.max_segments) {
            summary.converged = false;
            break;
        }
        std::size_t worst = segs.size();
        double worst_err = -1.0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].error > worst_err && splittable(segs[i])) {
                worst_err = segs[i].error;
                worst = i;
            }
        }
        if (worst == segs.size()) {
            // nothing left to refine at double precision
            summary.converged = err <= tol;
            break;
        }
        const Segment old = segs[worst];
        const double mid = 0.5 * (old.a + old.b);
        segs[worst] = eval_segment(f, old.a, mid, summary.evaluations);
        segs.push_back(eval_segment(f, mid, old.b, summary.evaluations));
    }

    std::sort(segs.begin(), segs.end(),
              [](const Segment& x, const Segment& y) { return x.a < y.a; });
    return segs;
}

}

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, const QuadratureOptions& opt)
{
    QuadratureResult r;
    run_adaptive(f, breakpoints, opt, r);
    return r;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt)
{
    const double bp[2] = {a, b};
    return integrate(f, std::span<const double>(bp, 2), opt);
}

QuadratureGrid build_grid(const std::function<double(double)>& f,
                          std::span<const double> breakpoints, const QuadratureOptions& opt)
{
    QuadratureResult summary;
    const std::vector<Segment> segs = run_adaptive(f, breakpoints, opt, summary);

    QuadratureGrid grid;
    grid.error_estimate = summary.error_estimate;
    grid.converged = summary.converged;
    grid.nodes.reserve(segs.size() * 15);
    grid.weights.reserve(segs.size() * 15);
    for (const Segment& s : segs) {
        const double c = 0.5 * (s.a + s.b);
        const double h = 0.5 * (s.b - s.a);
        for (int i = 0; i < 7; ++i) {
            grid.nodes.push_back(c - h * kXgk[i]);
            grid.weights.push_back(h * kWgk[i]);
            grid.nodes.push_back(c + h * kXgk[i]);
            grid.weights.push_back(h * kWgk[i]);
        }
        grid.nodes.push_back(c);
        grid.weights.push_back(h * kWgk[7]);
    }
    return grid;
}

}
