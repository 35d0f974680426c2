// spectral.hpp — Symmetric tridiagonal eigensolver and the two-level energy gap
//
// Eigenvalues by bisection on the Sturm pivot count, eigenvectors by inverse
// iteration with cluster reorthogonalization. Self-contained; no external
// solver behind this path, so it stays an independent check against the
// characteristic-polynomial route.
//
// Sign convention worth keeping in mind everywhere downstream: physical
// energies are Omega_i = e0 - Lambda_i, so the two LOWEST energies belong to
// the two LARGEST eigenvalues of the operator. energy_gap() encodes this.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

struct SpectralResult {
    std::vector<double> lambdas;              // ascending, physical units (scale applied)
    std::vector<double> omegas;               // e0 - lambdas[i], same index order
    std::vector<std::vector<double>> vectors; // vectors[i] belongs to lambdas[i]
    int size() const noexcept { return static_cast<int>(lambdas.size()); }
};

struct GapReport {
    double delta_e = 0.0; // Omega_2 - Omega_1, units of j0
    double t_tau = 0.0;   // pi/delta_e (hbar = 1); infinite when degenerate
    bool degenerate = false;
};

namespace detail {

// Number of eigenvalues of tri(d, e) strictly below x, via the LDL^T pivot
// recurrence with the usual pivot floor.
inline int sturm_count_below(const std::vector<double>& d, const std::vector<double>& e,
                             double x, double pivmin) {
    int count = 0;
    double q = 1.0;
    const size_t n = d.size();
    for (size_t i = 0; i < n; ++i) {
        q = (i == 0) ? d[0] - x : d[i] - x - e[i - 1] * e[i - 1] / q;
        if (std::abs(q) <= pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

struct GershgorinInterval {
    double lo, hi;
};

inline GershgorinInterval gershgorin(const std::vector<double>& d, const std::vector<double>& e) {
    const size_t n = d.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(e[i - 1]);
        if (i + 1 < n) r += std::abs(e[i]);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    return {lo, hi};
}

// All eigenvalues of tri(d, e), ascending, each located by bisection.
inline std::vector<double> bisection_eigenvalues(const std::vector<double>& d,
                                                 const std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return {d[0]};
    const double eps = std::numeric_limits<double>::epsilon();
    double emax2 = 0.0;
    for (double v : e) emax2 = std::max(emax2, v * v);
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax2);

    auto [gl, gu] = gershgorin(d, e);
    const double anorm = std::max(std::abs(gl), std::abs(gu));
    gl -= 2.0 * eps * anorm + pivmin;
    gu += 2.0 * eps * anorm + pivmin;

    std::vector<double> lam(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double lo = gl, hi = gu;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break; // interval at rounding limit
            if (sturm_count_below(d, e, mid, pivmin) >= k + 1)
                hi = mid;
            else
                lo = mid;
            if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
        }
        lam[static_cast<size_t>(k)] = 0.5 * (lo + hi);
    }
    std::sort(lam.begin(), lam.end());
    return lam;
}

// Tridiagonal LU with partial pivoting (two superdiagonals after pivoting).
struct TridiagFactor {
    std::vector<double> dl, dd, du, du2;
    std::vector<char> swapped;

    TridiagFactor(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                  double zero_fill) {
        const size_t n = diag.size();
        dd.resize(n);
        dl.assign(off.begin(), off.end());
        du.assign(off.begin(), off.end());
        du2.assign(n >= 2 ? n - 2 : 0, 0.0);
        swapped.assign(n >= 1 ? n - 1 : 0, 0);
        for (size_t i = 0; i < n; ++i) dd[i] = diag[i] - shift;
        for (size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(dd[i]) >= std::abs(dl[i])) {
                if (dd[i] == 0.0) dd[i] = zero_fill;
                const double f = dl[i] / dd[i];
                dl[i] = f;
                dd[i + 1] -= f * du[i];
            } else {
                const double f = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = f;
                const double tmp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = tmp - f * dd[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
        if (!dd.empty() && dd[n - 1] == 0.0) dd[n - 1] = zero_fill;
    }

    void solve(std::vector<double>& b) const {
        const size_t n = dd.size();
        for (size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl[i] * b[i];
            }
        }
        b[n - 1] /= dd[n - 1];
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
        for (size_t ii = n; ii-- > 2;) {
            const size_t i = ii - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - (i + 2 < n ? du2[i] * b[i + 2] : 0.0)) / dd[i];
        }
    }
};

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline void fill_start_vector(std::vector<double>& v, uint64_t seed) {
    uint64_t s = seed;
    for (double& x : v)
        x = static_cast<double>(splitmix64(s) >> 11) / static_cast<double>(1ULL << 53) - 0.5;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace detail

// All eigenvalues, ascending, in physical units.
inline std::vector<double> tridiagonal_eigenvalues(const TridiagonalOperator& op) {
    std::vector<double> lam = detail::bisection_eigenvalues(op.diag, op.offdiag);
    for (double& x : lam) x *= op.scale;
    return lam;
}

// Full spectrum plus orthonormal eigenvectors. Deterministic output: ascending
// eigenvalues, and each vector's largest-magnitude entry (first on ties) made
// positive. Throws ConvergenceError if the residual or orthonormality bounds
// cannot be met.
inline SpectralResult eigendecompose(const TridiagonalOperator& op, double e0 = 0.0) {
    const int n = op.size();
    const double eps = std::numeric_limits<double>::epsilon();
    const std::vector<double>& d = op.diag;
    const std::vector<double>& e = op.offdiag;

    std::vector<double> theta = detail::bisection_eigenvalues(d, e);
    const auto g = detail::gershgorin(d, e);
    const double anorm = std::max({std::abs(g.lo), std::abs(g.hi), 1e-300});
    const double ortho_tol = 1e-3 * anorm; // cluster grouping threshold
    const double zero_fill = eps * anorm;

    std::vector<std::vector<double>> vecs(static_cast<size_t>(n));
    int cluster_start = 0;
    for (int k = 0; k < n; ++k) {
        if (k > 0 && theta[static_cast<size_t>(k)] - theta[static_cast<size_t>(k) - 1] > ortho_tol)
            cluster_start = k;
        const int in_cluster = k - cluster_start;
        // Perturb shifts inside a cluster so the factorizations differ.
        const double shift =
            theta[static_cast<size_t>(k)] + static_cast<double>(in_cluster) * 10.0 * eps * anorm;

        std::vector<double> v(static_cast<size_t>(n));
        bool ok = false;
        for (uint64_t attempt = 0; attempt < 3 && !ok; ++attempt) {
            detail::TridiagFactor lu(d, e, shift, zero_fill);
            detail::fill_start_vector(v, 0x5D1DB1ULL + 77ULL * static_cast<uint64_t>(k) + attempt);
            for (int iter = 0; iter < 4; ++iter) {
                lu.solve(v);
                for (int j = cluster_start; j < k; ++j) {
                    const auto& u = vecs[static_cast<size_t>(j)];
                    double proj = std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
                    for (size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
                }
                const double nv = detail::norm2(v);
                if (!(nv > 0.0) || !std::isfinite(nv)) break;
                for (double& x : v) x /= nv;
            }
            // Residual check in scaled units.
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                double r = (d[static_cast<size_t>(i)] - theta[static_cast<size_t>(k)]) *
                           v[static_cast<size_t>(i)];
                if (i > 0) r += e[static_cast<size_t>(i) - 1] * v[static_cast<size_t>(i) - 1];
                if (i + 1 < n) r += e[static_cast<size_t>(i)] * v[static_cast<size_t>(i) + 1];
                res += r * r;
            }
            ok = std::isfinite(res) && std::sqrt(res) <= 1e-11 * anorm * n;
        }
        if (!ok)
            throw ConvergenceError("eigendecompose: inverse iteration failed at index " +
                                   std::to_string(k));

        // Deterministic sign: largest-magnitude entry (first on ties) positive.
        size_t imax = 0;
        for (size_t i = 1; i < v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0)
            for (double& x : v) x = -x;
        vecs[static_cast<size_t>(k)] = std::move(v);
    }

    SpectralResult out;
    out.lambdas.resize(static_cast<size_t>(n));
    out.omegas.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.lambdas[static_cast<size_t>(i)] = op.scale * theta[static_cast<size_t>(i)];
        out.omegas[static_cast<size_t>(i)] = e0 - out.lambdas[static_cast<size_t>(i)];
    }
    out.vectors = std::move(vecs);
    return out;
}

inline SpectralResult eigendecompose(const ChainSpec& spec) {
    return eigendecompose(build_direct(spec), spec.e0);
}

// Gap between the two lowest energies (the two largest operator eigenvalues).
// Gaps below 1e-12*j0 are flagged degenerate and map to an infinite t_tau.
inline GapReport energy_gap(const ChainSpec& spec) {
    const std::vector<double> lam = tridiagonal_eigenvalues(build_direct(spec));
    const size_t n = lam.size();
    GapReport g;
    g.delta_e = lam[n - 1] - lam[n - 2];
    g.degenerate = g.delta_e < 1e-12 * spec.j0;
    g.t_tau = g.degenerate ? std::numeric_limits<double>::infinity()
                           : std::numbers::pi / g.delta_e;
    return g;
}

} // namespace spinchain
