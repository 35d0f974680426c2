// charpoly.hpp — Analytic characteristic polynomial for equal-well chains
//
// For a chain of n_wells equal wells of size w = n/n_wells, the determinant of
// the shifted pattern matrix factors through a two-term recursion: a pair of
// trailing-block determinants (det B_k, det B_k') is propagated across wells
// by a 2x2 coefficient matrix whose entries are Chebyshev combinations of the
// shift variable. One propagation step per barrier, plus Chebyshev ladders of
// order ~w, evaluates the full n x n determinant in O(n) work however long
// the chain grows.
//
// Block bookkeeping (peeling from the last site): B_k covers the trailing
// k*w - 1 sites and B_k' is B_k with its first row and column removed. The
// Chebyshev reflection S_{-m} = -S_{m-2} makes every formula below valid down
// to w = 2, where some nominal orders go negative.
//
// All internal arithmetic runs in a power-of-two scaled representation, so
// evaluation stays finite and well-conditioned for chains far beyond the point
// where the raw determinant would overflow.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/chebyshev.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

// Real number held as mantissa * 2^exponent with mantissa in +-[0.5, 1) or 0.
// Exact renormalization (frexp/ldexp), so scaling adds no rounding error.
struct ScaledReal {
    double mantissa = 0.0;
    int64_t exponent = 0;

    static ScaledReal from(double v) {
        ScaledReal s;
        if (v == 0.0) return s;
        int e = 0;
        s.mantissa = std::frexp(v, &e);
        s.exponent = e;
        return s;
    }

    double to_double() const {
        if (mantissa == 0.0) return 0.0;
        if (exponent > 2000) return mantissa > 0 ? std::numeric_limits<double>::infinity()
                                                 : -std::numeric_limits<double>::infinity();
        if (exponent < -2000) return mantissa > 0 ? 0.0 : -0.0;
        return std::ldexp(mantissa, static_cast<int>(exponent));
    }

    int sign() const noexcept { return mantissa > 0.0 ? 1 : (mantissa < 0.0 ? -1 : 0); }

    friend ScaledReal operator*(ScaledReal a, ScaledReal b) {
        ScaledReal r;
        if (a.mantissa == 0.0 || b.mantissa == 0.0) return r;
        int e = 0;
        r.mantissa = std::frexp(a.mantissa * b.mantissa, &e);
        r.exponent = a.exponent + b.exponent + e;
        return r;
    }

    friend ScaledReal operator+(ScaledReal a, ScaledReal b) {
        if (a.mantissa == 0.0) return b;
        if (b.mantissa == 0.0) return a;
        if (a.exponent < b.exponent) std::swap(a, b);
        const int64_t shift = b.exponent - a.exponent; // <= 0
        double bm = (shift < -80) ? 0.0 : std::ldexp(b.mantissa, static_cast<int>(shift));
        double sum = a.mantissa + bm;
        ScaledReal r;
        if (sum == 0.0) return r;
        int e = 0;
        r.mantissa = std::frexp(sum, &e);
        r.exponent = a.exponent + e;
        return r;
    }

    friend ScaledReal operator-(ScaledReal a, ScaledReal b) {
        b.mantissa = -b.mantissa;
        return a + b;
    }
};

// Entries of the 2x2 matrix propagating (det B_k, det B_k') across one well.
struct RecursionCoefficients {
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
};

// Determinant pair carried across wells.
struct TransferMatrixState {
    double det_b = 0.0;
    double det_b_prime = 0.0;
    int k = 0; // well counter
};

// det of the bordered matrix: m uniform rows (lambda on the diagonal, -1 next
// to it) stacked onto a trailing block X, given det X and det X'. Evaluated
// entirely through the Chebyshev recurrence; total for every real lambda.
inline double det_y(double lambda, int m, double det_x, double det_x_prime) {
    if (m < 0) throw std::invalid_argument("det_y: m must be >= 0");
    ChebKernel s(lambda, m);
    return det_x * s.at(m) - det_x_prime * s.at(m - 1);
}

namespace detail {

struct ScaledCoefficients {
    ScaledReal gamma, gamma_prime, delta, delta_prime;
};

struct ScaledPair {
    ScaledReal b, bp;
};

// Chebyshev ladder in scaled form, orders -3 .. max_order.
class ScaledCheb {
public:
    ScaledCheb(double lambda, int max_order) {
        table_.resize(static_cast<size_t>(std::max(max_order, 1)) + 1);
        table_[0] = ScaledReal::from(1.0);
        table_[1] = ScaledReal::from(lambda);
        const ScaledReal x = ScaledReal::from(lambda);
        for (size_t mth = 2; mth < table_.size(); ++mth)
            table_[mth] = x * table_[mth - 1] - table_[mth - 2];
    }

    ScaledReal at(int m) const {
        if (m >= 0) return table_.at(static_cast<size_t>(m));
        if (m == -1) return ScaledReal{};
        ScaledReal r = table_.at(static_cast<size_t>(-m - 2));
        r.mantissa = -r.mantissa;
        return r;
    }

private:
    std::vector<ScaledReal> table_;
};

struct CharpolyContext {
    int n = 0;
    int n_wells = 0;
    int well = 0; // w = n / n_wells
    double d1 = 0.0;
    double d2 = 0.0;
    double q = 0.0; // J1/J0
};

inline CharpolyContext make_context(const ChainSpec& spec) {
    spec.validate();
    if (!spec.layout.is_equal_well(spec.n_sites))
        throw LayoutError("charpoly: layout is not equal-well; use the dense spectral path");
    CharpolyContext c;
    c.n = spec.n_sites;
    c.n_wells = spec.layout.n_wells();
    c.well = c.n / c.n_wells;
    c.d1 = end_correction(spec);
    c.d2 = barrier_correction(spec);
    c.q = 1.0 / (1.0 + spec.beta);
    return c;
}

inline ScaledPair seed_pair(const CharpolyContext& c, double lambda, const ScaledCheb& s) {
    // det B_0 = lambda (lambda + d1) - 1 over the last two sites; B_0' drops one.
    const ScaledReal det_b0 = ScaledReal::from(lambda * (lambda + c.d1) - 1.0);
    const ScaledReal det_b0p = ScaledReal::from(lambda + c.d1);
    ScaledPair p;
    p.b = det_b0 * s.at(c.well - 3) - det_b0p * s.at(c.well - 4);
    p.bp = det_b0 * s.at(c.well - 4) - det_b0p * s.at(c.well - 5);
    return p;
}

inline ScaledCoefficients scaled_coefficients(const CharpolyContext& c, double lambda,
                                              const ScaledCheb& s) {
    const ScaledReal cc = ScaledReal::from(lambda + c.d2);
    const ScaledReal a2 = ScaledReal::from((lambda + c.d2) * (lambda + c.d2) - c.q * c.q);
    ScaledCoefficients out;
    out.gamma = a2 * s.at(c.well - 2) - cc * s.at(c.well - 3);
    out.gamma_prime = a2 * s.at(c.well - 3) - cc * s.at(c.well - 4);
    out.delta = s.at(c.well - 3) - cc * s.at(c.well - 2);
    out.delta_prime = s.at(c.well - 4) - cc * s.at(c.well - 3);
    return out;
}

inline ScaledReal char_poly_scaled(const CharpolyContext& c, double lambda) {
    const ScaledCheb s(lambda, std::max(c.well - 2, 1));
    ScaledPair p = seed_pair(c, lambda, s);
    const ScaledCoefficients k = scaled_coefficients(c, lambda, s);
    for (int step = 1; step < c.n_wells; ++step) {
        const ScaledReal b = k.gamma * p.b + k.delta * p.bp;
        const ScaledReal bp = k.gamma_prime * p.b + k.delta_prime * p.bp;
        p.b = b;
        p.bp = bp;
    }
    return ScaledReal::from(lambda + c.d1) * p.b - p.bp;
}

} // namespace detail

// Coefficients of the well-to-well propagation matrix at a given lambda.
inline RecursionCoefficients recursion_coefficients(const ChainSpec& spec, double lambda) {
    const auto c = detail::make_context(spec);
    const detail::ScaledCheb s(lambda, std::max(c.well - 2, 1));
    const auto k = detail::scaled_coefficients(c, lambda, s);
    return {k.gamma.to_double(), k.gamma_prime.to_double(), k.delta.to_double(),
            k.delta_prime.to_double()};
}

// First propagated state (det B_1, det B_1'), for inspection and tests.
inline TransferMatrixState seed_state(const ChainSpec& spec, double lambda) {
    const auto c = detail::make_context(spec);
    const detail::ScaledCheb s(lambda, std::max(c.well - 2, 1));
    const auto p = detail::seed_pair(c, lambda, s);
    return {p.b.to_double(), p.bp.to_double(), 1};
}

inline TransferMatrixState advance(const TransferMatrixState& st, const RecursionCoefficients& k) {
    return {k.gamma * st.det_b + k.delta * st.det_b_prime,
            k.gamma_prime * st.det_b + k.delta_prime * st.det_b_prime, st.k + 1};
}

// det of the shifted pattern matrix at the given lambda, as mantissa * 2^e.
// The represented determinant is in units of j0^n.
inline ScaledReal char_poly_eval_scaled(const ChainSpec& spec, double lambda) {
    return detail::char_poly_scaled(detail::make_context(spec), lambda);
}

// Same value collapsed to double; overflows to +-inf for chains long enough
// that the determinant leaves the double range (the scaled form never does).
inline double char_poly_eval(const ChainSpec& spec, double lambda) {
    return char_poly_eval_scaled(spec, lambda).to_double();
}

// All n roots of the characteristic polynomial.
struct RootSet {
    std::vector<double> lambda_roots; // ascending in lambda
    std::vector<double> lambdas;      // operator eigenvalues, ascending
    std::vector<double> omegas;       // energies e0 - Lambda, ascending
};

namespace detail {

// Refine a sign change to a bracket of width <= tol by bisection; returns the
// midpoint of the final bracket.
template <typename F>
double bisect_root(F&& f, double a, double b, int sa, double tol) {
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const int sm = f(m);
        if (sm == 0) return m;
        if (sm == sa)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

// Number of polynomial roots strictly above x, read off the pattern matrix
// M(x): its negative-pivot count under bottom-up elimination equals the number
// of singular points lying to the right of x. The pivot chain is the Sturm
// sequence of trailing minors — the same objects the transfer recursion
// propagates well by well, here walked row by row so every multiplicity is
// counted exactly, no matter how tightly a cluster has coalesced.
struct PatternRows {
    std::vector<double> centers; // pattern diagonal at x = 0
    std::vector<double> offdiag;
    double pivmin = 0.0;
};

inline PatternRows pattern_rows(const ChainSpec& spec) {
    const TridiagonalOperator m0 = build_parametrized(spec, 0.0);
    PatternRows r;
    r.centers = m0.diag;
    r.offdiag = m0.offdiag;
    double emax2 = 0.0;
    for (double e : r.offdiag) emax2 = std::max(emax2, e * e);
    r.pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax2);
    return r;
}

inline int count_roots_above(const PatternRows& rows, double x) {
    int neg = 0;
    double q = 1.0;
    const size_t n = rows.centers.size();
    for (size_t i = n; i-- > 0;) {
        q = (i + 1 == n) ? rows.centers[i] + x
                         : rows.centers[i] + x - rows.offdiag[i] * rows.offdiag[i] / q;
        if (std::abs(q) <= rows.pivmin) q = -rows.pivmin;
        if (q < 0.0) ++neg;
    }
    return neg;
}

} // namespace detail

// All n roots, each first isolated by bisection on the exact root count (the
// pivot-sign Sturm chain of the pattern matrix) over the Gershgorin interval,
// then polished by sign bisection of the recursion-evaluated determinant to a
// bracket of width <= 1e-10. For clusters so tight that the determinant's
// sign is noise at the relevant scale (far-side-of-impenetrable doublets can
// coalesce below 1e-12), the polish is skipped and the count bracket's
// midpoint is returned for each member — correct to the bracket width, with
// the multiplicity guaranteed by the count. Never returns fewer than n roots.
inline RootSet find_roots(const ChainSpec& spec,
                          WellConvention conv = resolve_well_convention()) {
    const auto ctx = detail::make_context(spec);
    const int n = ctx.n;

    // Gershgorin bounds in lambda: singular lambdas are eigenvalues of -C
    // where the pattern matrix is lambda*I + C.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int site = 1; site <= n; ++site) {
        double center = 0.0;
        if (site == 1 || site == n) center = ctx.d1;
        for (int b : spec.layout.barrier_bonds)
            if (site == b || site == b + 1) center = ctx.d2;
        double radius = 0.0;
        if (site > 1) radius += spec.layout.is_barrier(site - 1) ? ctx.q : 1.0;
        if (site < n) radius += spec.layout.is_barrier(site) ? ctx.q : 1.0;
        lo = std::min(lo, -center - radius);
        hi = std::max(hi, -center + radius);
    }
    lo -= 1.0;
    hi += 1.0;

    const detail::PatternRows rows = detail::pattern_rows(spec);
    auto sign_at = [&](double x) { return detail::char_poly_scaled(ctx, x).sign(); };
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> roots;
    roots.reserve(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k) {
        // smallest x with at most n-k roots above it <=> the k-th root
        double a = lo, b = hi;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (detail::count_roots_above(rows, mid) > n - k)
                a = mid;
            else
                b = mid;
            if (b - a <= std::max(1e-10, 4.0 * eps * std::max(std::abs(a), std::abs(b)))) break;
        }
        const int sa = sign_at(a), sb = sign_at(b);
        if (sa != 0 && sb != 0 && sa != sb)
            roots.push_back(detail::bisect_root(sign_at, a, b, sa, 1e-10));
        else
            roots.push_back(0.5 * (a + b));
    }
    std::sort(roots.begin(), roots.end());

    RootSet out;
    out.lambda_roots = roots;
    out.lambdas.reserve(roots.size());
    for (double x : roots) out.lambdas.push_back(eigenvalue_from_lambda(spec, x, conv));
    std::sort(out.lambdas.begin(), out.lambdas.end());
    out.omegas.reserve(roots.size());
    for (auto it = out.lambdas.rbegin(); it != out.lambdas.rend(); ++it)
        out.omegas.push_back(spec.e0 - *it);
    return out;
}

} // namespace spinchain
