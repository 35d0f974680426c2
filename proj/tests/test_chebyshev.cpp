#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spinchain/chebyshev.hpp"

#include "oracles.hpp"

using spinchain::ChebKernel;
using spinchain::cheb_second;

namespace {

// Trigonometric / hyperbolic reference for S_m(x) = sin((m+1)psi)/sin(psi),
// x = 2 cos(psi).
double reference(double x, int m) {
    if (std::abs(x) < 2.0) {
        const double psi = std::acos(x / 2.0);
        return std::sin((m + 1) * psi) / std::sin(psi);
    }
    const double th = std::acosh(std::abs(x) / 2.0);
    const double mag = std::sinh((m + 1) * th) / std::sinh(th);
    if (x > 0.0) return mag;
    return (m % 2 == 0) ? mag : -mag; // S_m(-x) = (-1)^m S_m(x)
}

} // namespace

TEST_CASE("three-term recurrence holds as stated") {
    oracles::Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const double x = rng.uniform(-5.0, 5.0);
        ChebKernel k(x, 12);
        CHECK(k.at(0) == 1.0);
        CHECK(k.at(-1) == 0.0);
        // tolerance only for FMA-contraction differences between TUs
        for (int m = 1; m <= 12; ++m)
            CHECK(k.at(m) == doctest::Approx(x * k.at(m - 1) - k.at(m - 2)).epsilon(1e-15));
    }
}

TEST_CASE("matches the sin form inside (-2, 2)") {
    oracles::Rng rng(21);
    for (int rep = 0; rep < 100; ++rep) {
        const double x = rng.uniform(-1.95, 1.95);
        ChebKernel k(x, 30);
        for (int m = 0; m <= 30; m += 3) {
            const double ref = reference(x, m);
            CHECK(k.at(m) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("matches the cosh continuation outside [-2, 2]") {
    oracles::Rng rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        double x = rng.uniform(2.05, 6.0);
        if (rep % 2) x = -x;
        ChebKernel k(x, 20);
        for (int m = 0; m <= 20; m += 2)
            CHECK(k.at(m) == doctest::Approx(reference(x, m)).epsilon(1e-10));
    }
}

TEST_CASE("removable points x = +-2") {
    ChebKernel kp(2.0, 10), km(-2.0, 10);
    for (int m = 0; m <= 10; ++m) {
        CHECK(kp.at(m) == m + 1.0); // exact: small-integer arithmetic
        const double expected = (m % 2 == 0) ? m + 1.0 : -(m + 1.0);
        CHECK(km.at(m) == expected);
    }
}

TEST_CASE("negative orders reflect: S_{-m} = -S_{m-2}") {
    ChebKernel k(1.3, 8);
    CHECK(k.at(-1) == 0.0);
    CHECK(k.at(-2) == -k.at(0));
    CHECK(k.at(-3) == -k.at(1));
    CHECK(k.at(-5) == -k.at(3));
    CHECK(cheb_second(1.3, -4) == -cheb_second(1.3, 2));
    CHECK(cheb_second(0.7, 5) == ChebKernel(0.7, 5).at(5));
}
