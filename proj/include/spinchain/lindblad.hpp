// lindblad.hpp — Open-system evolution with the eigenstate-flip jump channel
//
//   d rho/dt = -i[H, rho] + rate (L rho L - (1/2){L^2, rho}),   hbar = 1
//
// with L = |psi_1><psi_2| + |psi_2><psi_1| built from the two lowest-energy
// eigenstates. Time stepping is classical fixed-step RK4 with h bounded by
// 0.005/max(spectral radius, rate), Hermitian symmetrization after every step,
// and rejection-plus-halving when the trace drifts beyond 1e-6.
//
// The integration itself runs in the energy eigenbasis, where the commutator
// is an elementwise phase factor and L is exactly the flip on the two lowest
// levels; this is the same equation in a rotated frame, and the reported
// site-basis populations are frame-independent. The trace-zero structure of
// the generator means RK4 conserves the trace to round-off; the drift monitor
// exists to catch misuse, not routine operation.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/spectral.hpp"

namespace spinchain {

// Site-basis jump operator coupling the two lowest-energy eigenstates.
// L is real symmetric and L^2 is the projector onto their span.
struct JumpOperator {
    Eigen::MatrixXd matrix;
    double rate = 0.0;
};

inline JumpOperator eigenstate_flip_jump(const SpectralResult& spec, double rate) {
    const int n = spec.size();
    if (n < 2) throw std::invalid_argument("eigenstate_flip_jump: need at least two states");
    // Lowest energies = largest operator eigenvalues = last two indices.
    Eigen::VectorXd p1(n), p2(n);
    for (int k = 0; k < n; ++k) {
        p1(k) = spec.vectors[static_cast<size_t>(n) - 1][static_cast<size_t>(k)];
        p2(k) = spec.vectors[static_cast<size_t>(n) - 2][static_cast<size_t>(k)];
    }
    JumpOperator L;
    L.matrix = p1 * p2.transpose() + p2 * p1.transpose();
    L.rate = rate;
    return L;
}

struct LindbladTrace {
    std::vector<double> times;
    std::vector<double> rho_11;      // population on the left edge site
    std::vector<double> rho_nn;      // population on the right edge site
    std::vector<double> trace_error; // |tr rho - 1| at each grid time
    double max_hermiticity_drift = 0.0; // worst pre-symmetrization deviation
    Eigen::MatrixXcd final_rho;         // site basis, at times.back()
};

inline LindbladTrace lindblad_evolve(const ChainSpec& spec, double rate,
                                     const std::vector<double>& times,
                                     const Eigen::MatrixXcd& rho0_site) {
    if (rate < 0.0) throw std::invalid_argument("lindblad_evolve: rate must be >= 0");
    if (times.empty()) throw std::invalid_argument("lindblad_evolve: empty time grid");
    spec.validate();
    const int n = spec.n_sites;
    if (rho0_site.rows() != n || rho0_site.cols() != n)
        throw std::invalid_argument("lindblad_evolve: initial density matrix dimension mismatch");

    const SpectralResult sr = eigendecompose(spec);

    // Energy-ascending frame: column j of V is the eigenvector of the j-th
    // lowest energy, so the jump channel acts on indices 0 and 1.
    Eigen::MatrixXd V(n, n);
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) {
        const int src = n - 1 - j;
        w(j) = sr.omegas[static_cast<size_t>(src)];
        for (int k = 0; k < n; ++k)
            V(k, j) = sr.vectors[static_cast<size_t>(src)][static_cast<size_t>(k)];
    }

    Eigen::MatrixXcd rho = V.transpose() * rho0_site * V;

    Eigen::MatrixXcd phase(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) phase(m, k) = std::complex<double>(0.0, -(w(m) - w(k)));

    auto rhs = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
        out = phase.cwiseProduct(r);
        if (rate > 0.0) {
            // L r L on the flip pair, then -(1/2){P, r} with P the projector
            // onto the pair.
            out(0, 0) += rate * r(1, 1);
            out(1, 1) += rate * r(0, 0);
            out(0, 1) += rate * r(1, 0);
            out(1, 0) += rate * r(0, 1);
            for (int m = 0; m < n; ++m) {
                const double pm = m < 2 ? 1.0 : 0.0;
                for (int k = 0; k < n; ++k) {
                    const double pk = k < 2 ? 1.0 : 0.0;
                    out(m, k) -= 0.5 * rate * (pm + pk) * r(m, k);
                }
            }
        }
    };

    double radius = 0.0;
    for (int j = 0; j < n; ++j) radius = std::max(radius, std::abs(w(j)));
    const double h_max = 0.005 / std::max({radius, rate, 1e-12});

    Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    double herm_drift = 0.0;

    auto integrate_interval = [&](Eigen::MatrixXcd& r, double t0, double t1) {
        const double span = t1 - t0;
        if (span <= 0.0) return;
        long nsub = std::max<long>(1, static_cast<long>(std::ceil(span / h_max)));
        for (int attempt = 0; attempt < 20; ++attempt) {
            Eigen::MatrixXcd trial = r;
            const double h = span / static_cast<double>(nsub);
            bool rejected = false;
            double local_drift = 0.0;
            for (long s = 0; s < nsub; ++s) {
                rhs(trial, k1);
                tmp = trial + (0.5 * h) * k1;
                rhs(tmp, k2);
                tmp = trial + (0.5 * h) * k2;
                rhs(tmp, k3);
                tmp = trial + h * k3;
                rhs(tmp, k4);
                trial += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                local_drift = std::max(
                    local_drift, ((trial - trial.adjoint()) * 0.5).cwiseAbs().maxCoeff());
                trial = 0.5 * (trial + trial.adjoint()).eval();
                if (std::abs(trial.trace().real() - 1.0) > 1e-6 ||
                    std::abs(trial.trace().imag()) > 1e-6) {
                    rejected = true;
                    break;
                }
            }
            if (!rejected) {
                r = std::move(trial);
                herm_drift = std::max(herm_drift, local_drift);
                return;
            }
            nsub *= 2;
        }
        throw ConvergenceError("lindblad_evolve: trace drift persisted through step halving");
    };

    // Site-basis edge populations read through the eigenvector rows.
    Eigen::VectorXd u_left = V.row(0).transpose();
    Eigen::VectorXd u_right = V.row(n - 1).transpose();

    LindbladTrace out;
    out.times = times;
    out.rho_11.resize(times.size());
    out.rho_nn.resize(times.size());
    out.trace_error.resize(times.size());

    double t_now = 0.0;
    for (size_t j = 0; j < times.size(); ++j) {
        integrate_interval(rho, t_now, times[j]);
        t_now = times[j];
        out.rho_11[j] = (u_left.transpose() * (rho * u_left).real())(0);
        out.rho_nn[j] = (u_right.transpose() * (rho * u_right).real())(0);
        out.trace_error[j] = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    }
    out.max_hermiticity_drift = herm_drift;
    out.final_rho = V * rho * V.transpose();
    return out;
}

// Default preparation: flipped spin at the left edge.
inline LindbladTrace lindblad_evolve(const ChainSpec& spec, double rate,
                                     const std::vector<double>& times) {
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(spec.n_sites, spec.n_sites);
    rho0(0, 0) = 1.0;
    return lindblad_evolve(spec, rate, times, rho0);
}

} // namespace spinchain
