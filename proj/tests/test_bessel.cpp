#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pes/bessel.hpp"

using pes::i1e;

TEST_CASE("scaled Bessel reference values")
{
    // exp(-x) I1(x) evaluated at 30 significant digits externally.
    struct Ref {
        double x;
        double value;
    };
    const Ref refs[] = {
        {0.0, 0.0},
        {1e-8, 4.9999999500000003e-9},
        {0.001, 4.9950031235422134e-4},
        {0.1, 0.045298446808809325},
        {0.5, 0.1564208031848717},
        {1.0, 0.20791041534970845},
        {2.0, 0.21526928924893766},
        {5.0, 0.16397226694454236},
        {10.0, 0.12126268138445552},
        {25.0, 0.078576113319292772},
        {100.0, 0.039744153025130253},
        {700.0, 0.015070519444716847},
        {1e4, 0.0039892731959836623},
        {1e6, 3.9894213079803078e-4},
    };
    for (const Ref& r : refs) {
        CAPTURE(r.x);
        if (r.value == 0.0)
            CHECK(i1e(r.x) == 0.0);
        else
            CHECK(i1e(r.x) == doctest::Approx(r.value).epsilon(1e-13));
    }
}

TEST_CASE("series consistency at small arguments")
{
    // I1(x) = x/2 + x^3/16 + x^5/384 + x^7/18432 + x^9/1474560 + ...; the
    // retained terms leave a relative truncation error below 1e-14 for
    // x <= 0.2.
    for (const double x : {1e-6, 1e-4, 0.01, 0.2}) {
        const double i1 = x / 2.0 + std::pow(x, 3) / 16.0 + std::pow(x, 5) / 384.0 +
                          std::pow(x, 7) / 18432.0 + std::pow(x, 9) / 1474560.0;
        CHECK(i1e(x) == doctest::Approx(i1 * std::exp(-x)).epsilon(1e-12));
    }
}

TEST_CASE("asymptotic regime")
{
    // i1e(x) -> 1/sqrt(2 pi x) * (1 - 3/(8x) + ...) for large x.
    for (const double x : {1e3, 1e5, 1e7}) {
        const double lead = 1.0 / std::sqrt(2.0 * M_PI * x);
        const double corrected = lead * (1.0 - 3.0 / (8.0 * x));
        CHECK(i1e(x) == doctest::Approx(corrected).epsilon(1e-6));
    }
}

TEST_CASE("shape properties")
{
    // Rises from zero, single interior maximum, then decays monotonically.
    double prev = i1e(2.0);
    for (double x = 2.5; x < 60.0; x += 0.5) {
        CHECK(i1e(x) < prev);
        prev = i1e(x);
    }
    CHECK(i1e(0.5) > 0.0);
    CHECK(std::isfinite(i1e(1e12)));
}
