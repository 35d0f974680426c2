#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "spinchain/charpoly.hpp"
#include "spinchain/spectral.hpp"

#include "oracles.hpp"

using namespace spinchain;

namespace {

ChainSpec make_spec(int n, double delta, double beta, BarrierLayout layout, double j0 = 1.0) {
    ChainSpec s;
    s.n_sites = n;
    s.delta = delta;
    s.beta = beta;
    s.layout = std::move(layout);
    s.j0 = j0;
    return s;
}

ChainSpec wells_spec(int n, int nw, double delta, double beta) {
    return make_spec(n, delta, beta, BarrierLayout::equal_wells(n, nw));
}

double scaled_ratio(const ScaledReal& a, const ScaledReal& b) {
    return (a.mantissa / b.mantissa) * std::ldexp(1.0, static_cast<int>(a.exponent - b.exponent));
}

} // namespace

TEST_CASE("scaled representation round-trips and combines") {
    oracles::Rng rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const double a = rng.uniform(-1e8, 1e8);
        const double b = rng.uniform(-5.0, 5.0);
        CHECK(ScaledReal::from(a).to_double() == a);
        CHECK((ScaledReal::from(a) * ScaledReal::from(b)).to_double() ==
              doctest::Approx(a * b).epsilon(1e-15));
        CHECK((ScaledReal::from(a) + ScaledReal::from(b)).to_double() ==
              doctest::Approx(a + b).epsilon(1e-15));
        CHECK((ScaledReal::from(a) - ScaledReal::from(b)).to_double() ==
              doctest::Approx(a - b).epsilon(1e-15));
    }
    CHECK(ScaledReal::from(0.0).to_double() == 0.0);
    CHECK(ScaledReal::from(0.0).sign() == 0);
}

TEST_CASE("det_y: identity cases") {
    // empty X block: det(Y) is the pure second-kind Chebyshev value
    CHECK(det_y(2.0, 5, 1.0, 0.0) == 6.0);
    CHECK(det_y(1.3, 7, 1.0, 0.0) == doctest::Approx(cheb_second(1.3, 7)).epsilon(1e-14));
    // m = 0: no border added
    CHECK(det_y(0.77, 0, 4.25, -1.5) == 4.25);
    CHECK_THROWS_AS(det_y(1.0, -1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("det_y: frozen 5x5 bordered case (m=3, lambda=1.5, d1=5)") {
    const double lambda = 1.5, d1 = 5.0;
    const double det_b0 = lambda * (lambda + d1) - 1.0;
    const double det_b0p = lambda + d1;
    const double got = det_y(lambda, 3, det_b0, det_b0p);
    CHECK(got == doctest::Approx(-4.84375).epsilon(1e-14)); // hand-evaluated dense 5x5

    Eigen::MatrixXd x(2, 2);
    x << lambda, -1.0, -1.0, lambda + d1;
    const Eigen::MatrixXd y = oracles::bordered_toeplitz(lambda, 3, x);
    CHECK(got == doctest::Approx(y.determinant()).epsilon(1e-12));
}

TEST_CASE("det_y equals dense determinants for random bordered blocks") {
    oracles::Rng rng(17);
    for (int rep = 0; rep < 60; ++rep) {
        const double lambda = rng.uniform(-4.0, 4.0);
        const int m = rng.uniform_int(0, 6);
        Eigen::MatrixXd x(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) x(i, j) = x(j, i) = rng.uniform(-2.0, 2.0);
        const double ref = oracles::bordered_toeplitz(lambda, m, x).determinant();
        const double got = det_y(lambda, m, x.determinant(), x.block(1, 1, 2, 2).determinant());
        CHECK(got == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("frozen polynomial values: n=6, two wells, delta=3, beta=1") {
    const auto spec = wells_spec(6, 2, 3.0, 1.0);
    CHECK(char_poly_eval(spec, 0.0) == doctest::Approx(56.0).epsilon(1e-12));
    CHECK(char_poly_eval(spec, 1.5) == doctest::Approx(793.109375).epsilon(1e-12));
    CHECK(char_poly_eval(spec, -3.0) == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(char_poly_eval(spec, 17.0) == doctest::Approx(52549470.0).epsilon(1e-12));
}

TEST_CASE("polynomial identity against dense determinants over the shape grid") {
    oracles::Rng rng(29);
    const std::vector<std::pair<int, int>> shapes = {{6, 2},  {6, 3},  {12, 2},
                                                     {12, 3}, {12, 4}, {12, 6}};
    for (const auto& [n, nw] : shapes) {
        for (double beta : {0.0, 1e-12, 0.5, 1.0, 9.0}) {
            const auto spec = wells_spec(n, nw, 3.0, beta);
            for (int rep = 0; rep < 50; ++rep) {
                const double lambda = rng.uniform(-25.0, 25.0);
                const double dense = oracles::dense_pattern_matrix(spec, lambda).determinant();
                const double got = char_poly_eval(spec, lambda);
                CHECK(got == doctest::Approx(dense).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("block bookkeeping: propagated states equal dense trailing determinants") {
    oracles::Rng rng(31);
    const std::vector<std::pair<int, int>> shapes = {{12, 2}, {12, 3}, {12, 6}, {6, 3}};
    for (const auto& [n, nw] : shapes) {
        const auto spec = wells_spec(n, nw, 2.0, 0.7);
        const int w = n / nw;
        for (int rep = 0; rep < 5; ++rep) {
            const double lambda = rng.uniform(-10.0, 10.0);
            const Eigen::MatrixXd full = oracles::dense_pattern_matrix(spec, lambda);
            TransferMatrixState st = seed_state(spec, lambda);
            const RecursionCoefficients rc = recursion_coefficients(spec, lambda);
            for (int k = 1; k <= nw; ++k) {
                const int size = k * w - 1; // trailing block B_k
                const Eigen::MatrixXd bk = full.bottomRightCorner(size, size);
                CHECK(st.det_b == doctest::Approx(bk.determinant()).epsilon(1e-9));
                if (size >= 2) {
                    const Eigen::MatrixXd bkp = full.bottomRightCorner(size - 1, size - 1);
                    CHECK(st.det_b_prime == doctest::Approx(bkp.determinant()).epsilon(1e-9));
                }
                if (k < nw) st = advance(st, rc);
            }
        }
    }
}

TEST_CASE("single well: one bordered-determinant application, beta plays no role") {
    for (int n : {5, 8, 11}) {
        const auto base = make_spec(n, 2.5, 0.0, BarrierLayout::none());
        const double d1 = end_correction(base);
        for (double lambda : {-1.7, 0.3, 2.0, 4.4}) {
            const double det_b0 = lambda * (lambda + d1) - 1.0;
            const double det_b0p = lambda + d1;
            const double via_det_y = (lambda + d1) * det_y(lambda, n - 3, det_b0, det_b0p) -
                                     det_y(lambda, n - 4, det_b0, det_b0p);
            for (double beta : {0.0, 0.7, 9.0}) {
                auto spec = base;
                spec.beta = beta;
                CHECK(char_poly_eval(spec, lambda) == doctest::Approx(via_det_y).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("leading behaviour: p(2x)/p(x) approaches 2^n at large x") {
    const std::vector<std::pair<int, int>> shapes = {{6, 2}, {12, 4}};
    for (const auto& [n, nw] : shapes) {
        const auto spec = wells_spec(n, nw, 10.0, 1.0);
        const ScaledReal p1 = char_poly_eval_scaled(spec, 1e8);
        const ScaledReal p2 = char_poly_eval_scaled(spec, 2e8);
        CHECK(scaled_ratio(p2, p1) / std::pow(2.0, n) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("roots reproduce the dense spectrum") {
    SUBCASE("n=2 treated as a single well") {
        const auto spec = make_spec(2, 4.2, 0.0, BarrierLayout::none());
        const RootSet r = find_roots(spec);
        REQUIRE(r.lambdas.size() == 2);
        CHECK(std::abs(r.lambdas[0]) <= 1e-10);
        CHECK(r.lambdas[1] == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("sample shapes match the bisection solver to 1e-9 J0") {
        const std::vector<std::pair<int, int>> shapes = {{6, 2}, {12, 3}, {12, 6}};
        for (const auto& [n, nw] : shapes) {
            for (double beta : {0.0, 1.4, 9.0}) {
                const auto spec = wells_spec(n, nw, 3.0, beta);
                const RootSet r = find_roots(spec);
                const auto dense = tridiagonal_eigenvalues(build_direct(spec));
                REQUIRE(r.lambdas.size() == dense.size());
                for (size_t i = 0; i < dense.size(); ++i)
                    CHECK(std::abs(r.lambdas[i] - dense[i]) <= 1e-9 * spec.j0);
            }
        }
    }
    SUBCASE("near-impenetrable barrier: all roots found, pairs nearly coalesce") {
        const auto spec = wells_spec(6, 2, 3.0, 1e6);
        const RootSet r = find_roots(spec);
        REQUIRE(r.lambdas.size() == 6);
        const double gap = r.lambdas[5] - r.lambdas[4];
        CHECK(gap >= 0.0);
        CHECK(gap <= 1e-3);
        const auto dense = tridiagonal_eigenvalues(build_direct(spec));
        for (size_t i = 0; i < dense.size(); ++i)
            CHECK(std::abs(r.lambdas[i] - dense[i]) <= 1e-9 * spec.j0);
    }
}

TEST_CASE("roots sorted, omegas mirror lambdas") {
    const auto spec = wells_spec(12, 4, 2.0, 1.4);
    const RootSet r = find_roots(spec);
    for (size_t i = 1; i < r.lambdas.size(); ++i) {
        CHECK(r.lambdas[i] >= r.lambdas[i - 1]);
        CHECK(r.omegas[i] >= r.omegas[i - 1]);
    }
    for (size_t i = 0; i < r.lambdas.size(); ++i)
        CHECK(r.omegas[i] == -r.lambdas[r.lambdas.size() - 1 - i]);
}

TEST_CASE("unequal layouts are rejected toward the dense path") {
    CHECK_THROWS_AS(char_poly_eval(make_spec(6, 2.0, 1.0, BarrierLayout::at_bonds({2})), 0.0),
                    LayoutError);
    CHECK_THROWS_AS(find_roots(make_spec(7, 2.0, 1.0, BarrierLayout::at_bonds({2}))), LayoutError);
}

TEST_CASE("evaluation cost grows like the chain length, not like a dense determinant") {
    auto time_eval = [](const ChainSpec& spec) {
        using clock = std::chrono::steady_clock;
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = clock::now();
            volatile double sink = 0.0;
            for (int i = 0; i < 200; ++i)
                sink = sink + char_poly_eval_scaled(spec, 0.37 + 1e-6 * i).mantissa;
            const auto t1 = clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        }
        return best;
    };
    const double t12 = time_eval(wells_spec(12, 2, 2.0, 1.0));
    const double t1200 = time_eval(wells_spec(1200, 2, 2.0, 1.0));
    // 100x more recurrence steps; allow a wide margin over the linear ratio,
    // still far below the ~1e6 a dense determinant would cost.
    CHECK(t1200 / t12 < 1000.0);
    // the scaled value stays meaningful far beyond the double range
    CHECK(char_poly_eval_scaled(wells_spec(1200, 2, 2.0, 1.0), 0.37).mantissa != 0.0);
}
