#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pes/quadrature.hpp"

using namespace pes;

TEST_CASE("smooth integrands to machine precision")
{
    const auto r1 = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r1.converged);
    CHECK(r1.value == doctest::Approx(2.0).epsilon(1e-13));

    const auto r2 = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(r2.converged);
    CHECK(r2.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));

    const auto r3 = integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
    CHECK(r3.value == doctest::Approx(M_PI / 4.0).epsilon(1e-13));
}

TEST_CASE("error estimate brackets the true error")
{
    const auto r = integrate([](double x) { return std::cos(7.0 * x); }, 0.0, 2.0);
    const double truth = std::sin(14.0) / 7.0;
    CHECK(std::abs(r.value - truth) <= std::max(r.error_estimate, 1e-13));
}

TEST_CASE("integrable endpoint singularity")
{
    // int_0^1 log(x) dx = -1; adaptive bisection digs into the corner.
    QuadratureOptions opt;
    opt.abs_tol = 1e-9;
    opt.rel_tol = 1e-9;
    const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, opt);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("breakpoints seed the initial segmentation")
{
    // |x - 0.3| has a kink; seeding it as a breakpoint converges directly.
    const auto f = [](double x) { return std::abs(x - 0.3); };
    const std::vector<double> bp = {0.0, 0.3, 1.0};
    const auto r = integrate(f, bp);
    const double truth = 0.3 * 0.3 / 2.0 + 0.7 * 0.7 / 2.0;
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(truth).epsilon(1e-13));
}

TEST_CASE("budget exhaustion is reported, not hidden")
{
    QuadratureOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-15;
    opt.max_segments = 3;
    const auto r = integrate([](double x) { return std::sin(100.0 * x) / (1e-3 + x); },
                             0.0, 10.0, opt);
    CHECK_FALSE(r.converged);
}

TEST_CASE("frozen grids reproduce the adaptive value")
{
    const auto f = [](double x) { return std::exp(-2.0 * x) * std::sqrt(x); };
    const std::vector<double> bp = {0.0, 0.5, 4.0, 20.0};
    const auto direct = integrate(f, bp);
    const auto grid = build_grid(f, bp);
    CHECK(grid.converged);
    CHECK(grid.apply(f) == doctest::Approx(direct.value).epsilon(1e-12));

    // The same nodes integrate a related smooth multiple accurately.
    const auto g = [&](double x) { return f(x) * std::cos(x); };
    const auto direct_g = integrate(g, bp);
    CHECK(grid.apply(g) == doctest::Approx(direct_g.value).epsilon(1e-7));
}
