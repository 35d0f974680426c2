// sweep.hpp — Experiment runner: grids, CSV emission, path cross-validation
//
// CSV layout: `#`-prefixed metadata lines (config echo, resolved well-count
// convention, tool version), one header row, then data rows. Floats are
// printed with 17 significant digits through std::to_chars, so identical
// configs produce byte-identical files. Grid points may be computed by a
// worker pool; rows are always emitted in grid order.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/charpoly.hpp"
#include "spinchain/config.hpp"
#include "spinchain/dynamics.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/lindblad.hpp"
#include "spinchain/spectral.hpp"
#include "spinchain/version.hpp"

namespace spinchain {

namespace detail {

inline std::string format_value(double v) {
    char buf[48];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, p);
}

inline std::string join_axis(const std::vector<double>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += format_value(xs[i]);
    }
    return s;
}

inline std::string join_axis(const std::vector<int>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(xs[i]);
    }
    return s;
}

// Run make_row(i) for i in [0, count) on `threads` workers; rows come back in
// index order. The lowest-index exception wins and is rethrown.
template <typename Fn>
std::vector<std::string> parallel_rows(size_t count, int threads, Fn&& make_row) {
    std::vector<std::string> rows(count);
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) rows[i] = make_row(i);
        return rows;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                rows[i] = make_row(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<size_t>(nw));
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

inline std::string grid_point_tag(const ChainSpec& s) {
    std::string layout = "none";
    if (!s.layout.barrier_bonds.empty()) layout = "bonds " + join_axis(s.layout.barrier_bonds);
    return "(n_sites=" + std::to_string(s.n_sites) + ", delta=" + format_value(s.delta) +
           ", beta=" + format_value(s.beta) + ", layout=" + layout + ")";
}

template <typename Fn>
auto at_grid_point(const ChainSpec& s, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " at grid point " + grid_point_tag(s));
    }
}

} // namespace detail

struct ExperimentOutcome {
    bool ok = true;
    std::string detail; // offending grid points for failed comparisons
};

namespace detail {

inline void write_metadata(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# tool: spinchain " << kVersion << "\n";
    os << "# mode: " << to_string(cfg.mode) << "\n";
    os << "# n_sites: " << cfg.n_sites << "\n";
    os << "# delta_values: " << join_axis(cfg.delta_values) << "\n";
    os << "# beta_values: " << join_axis(cfg.beta_values) << "\n";
    if (!cfg.n_wells_values.empty())
        os << "# n_wells_values: " << join_axis(cfg.n_wells_values) << "\n";
    if (cfg.equal_wells)
        os << "# layout: equal_wells=" << *cfg.equal_wells << "\n";
    else if (!cfg.barrier_bonds.empty())
        os << "# layout: barriers=" << join_axis(cfg.barrier_bonds) << "\n";
    else if (cfg.n_wells_values.empty())
        os << "# layout: none\n";
    os << "# j0: " << format_value(cfg.j0) << "\n";
    os << "# e0: " << format_value(cfg.e0) << "\n";
    if (cfg.mode == Mode::dynamics || cfg.mode == Mode::superposition ||
        cfg.mode == Mode::lindblad) {
        os << "# t_max: " << (cfg.t_max > 0.0 ? format_value(cfg.t_max) : std::string("auto"))
           << "\n";
        os << "# n_times: " << cfg.n_times << "\n";
    }
    if (cfg.mode == Mode::lindblad) os << "# gamma: " << format_value(cfg.gamma_rate) << "\n";
    os << "# well_count_convention: " << to_string(resolve_well_convention()) << "\n";
}

inline std::string energy_columns_header(int n) {
    std::string h;
    for (int i = 1; i <= n; ++i) h += ",energy_" + std::to_string(i);
    return h;
}

// Energies ascending (lowest first); SpectralResult stores omegas aligned
// with ascending lambdas, i.e. energies descending.
inline std::string energies_ascending_row(const std::vector<double>& omegas) {
    std::string row;
    for (auto it = omegas.rbegin(); it != omegas.rend(); ++it) row += ',' + format_value(*it);
    return row;
}

inline std::vector<double> experiment_time_grid(const ExperimentConfig& cfg,
                                                const ChainSpec& spec) {
    double t_max = cfg.t_max;
    if (t_max <= 0.0) {
        const GapReport gap = energy_gap(spec);
        if (gap.degenerate)
            throw std::runtime_error(
                "auto time window needs a nondegenerate gap; set t_max explicitly");
        t_max = default_transfer_window(gap);
    }
    return uniform_times(t_max, cfg.n_times);
}

inline ExperimentOutcome run_spectrum_like(const ExperimentConfig& cfg, std::ostream& os,
                                           int threads) {
    const bool analytic = cfg.mode == Mode::roots;
    os << "delta,beta" << energy_columns_header(cfg.n_sites) << "\n";
    const size_t nb = cfg.beta_values.size();
    const size_t total = cfg.delta_values.size() * nb;
    auto rows = parallel_rows(total, threads, [&](size_t idx) {
        const double delta = cfg.delta_values[idx / nb];
        const double beta = cfg.beta_values[idx % nb];
        const ChainSpec s = cfg.chain_spec(delta, beta);
        return at_grid_point(s, [&] {
            std::vector<double> omegas;
            if (analytic) {
                RootSet roots = find_roots(s);
                // store descending (energy_1 = lowest) via the shared writer
                omegas.assign(roots.omegas.rbegin(), roots.omegas.rend());
            } else {
                omegas = eigendecompose(s).omegas;
            }
            return format_value(delta) + ',' + format_value(beta) +
                   energies_ascending_row(omegas) + "\n";
        });
    });
    for (const auto& r : rows) os << r;
    return {};
}

inline ExperimentOutcome run_gap(const ExperimentConfig& cfg, std::ostream& os, int threads) {
    os << "beta,delta_e,t_tau\n";
    const double delta = cfg.delta_values.front();
    auto rows = parallel_rows(cfg.beta_values.size(), threads, [&](size_t i) {
        const ChainSpec s = cfg.chain_spec(delta, cfg.beta_values[i]);
        return at_grid_point(s, [&] {
            const GapReport g = energy_gap(s);
            return format_value(cfg.beta_values[i]) + ',' + format_value(g.delta_e) + ',' +
                   format_value(g.t_tau) + "\n";
        });
    });
    for (const auto& r : rows) os << r;
    return {};
}

inline ExperimentOutcome run_sweep(const ExperimentConfig& cfg, std::ostream& os, int threads) {
    os << "n_wells,delta,beta,delta_e,t_tau\n";
    const std::vector<int> wells =
        cfg.uses_wells_axis() ? cfg.n_wells_values
                              : std::vector<int>{cfg.fixed_layout().n_wells()};
    const size_t nd = cfg.delta_values.size(), nb = cfg.beta_values.size();
    auto rows = parallel_rows(wells.size() * nd * nb, threads, [&](size_t idx) {
        const int nw = wells[idx / (nd * nb)];
        const double delta = cfg.delta_values[(idx / nb) % nd];
        const double beta = cfg.beta_values[idx % nb];
        const ChainSpec s = cfg.uses_wells_axis() ? cfg.chain_spec(delta, beta, nw)
                                                  : cfg.chain_spec(delta, beta);
        return at_grid_point(s, [&] {
            const GapReport g = energy_gap(s);
            return std::to_string(nw) + ',' + format_value(delta) + ',' + format_value(beta) +
                   ',' + format_value(g.delta_e) + ',' + format_value(g.t_tau) + "\n";
        });
    });
    for (const auto& r : rows) os << r;
    return {};
}

inline ExperimentOutcome run_compare(const ExperimentConfig& cfg, std::ostream& os, int threads) {
    os << "n_wells,delta,beta,max_abs_diff,pass\n";
    const std::vector<int> wells =
        cfg.uses_wells_axis() ? cfg.n_wells_values
                              : std::vector<int>{cfg.fixed_layout().n_wells()};
    const size_t nd = cfg.delta_values.size(), nb = cfg.beta_values.size();
    struct Cell {
        std::string row;
        std::string failure;
    };
    std::vector<Cell> cells(wells.size() * nd * nb);
    parallel_rows(cells.size(), threads, [&](size_t idx) {
        const int nw = wells[idx / (nd * nb)];
        const double delta = cfg.delta_values[(idx / nb) % nd];
        const double beta = cfg.beta_values[idx % nb];
        const ChainSpec s = cfg.uses_wells_axis() ? cfg.chain_spec(delta, beta, nw)
                                                  : cfg.chain_spec(delta, beta);
        return at_grid_point(s, [&]() -> std::string {
            const std::vector<double> dense = tridiagonal_eigenvalues(build_direct(s));
            const RootSet roots = find_roots(s);
            double max_diff = 0.0;
            for (size_t i = 0; i < dense.size(); ++i)
                max_diff = std::max(max_diff, std::abs(dense[i] - roots.lambdas[i]));
            const bool pass = max_diff <= 1e-9 * s.j0;
            cells[idx].row = std::to_string(nw) + ',' + format_value(delta) + ',' +
                             format_value(beta) + ',' + format_value(max_diff) + ',' +
                             (pass ? "1" : "0") + "\n";
            if (!pass)
                cells[idx].failure = grid_point_tag(s) + " max |Omega| diff " +
                                     format_value(max_diff);
            return {};
        });
    });
    ExperimentOutcome outcome;
    for (const auto& c : cells) {
        os << c.row;
        if (!c.failure.empty()) {
            outcome.ok = false;
            if (!outcome.detail.empty()) outcome.detail += "\n";
            outcome.detail += c.failure;
        }
    }
    return outcome;
}

inline ExperimentOutcome run_trace(const ExperimentConfig& cfg, std::ostream& os) {
    const ChainSpec s = cfg.chain_spec(cfg.delta_values.front(), cfg.beta_values.front());
    return at_grid_point(s, [&]() -> ExperimentOutcome {
        const std::vector<double> times = experiment_time_grid(cfg, s);
        if (cfg.mode == Mode::lindblad) {
            const LindbladTrace tr = lindblad_evolve(s, cfg.gamma_rate, times);
            os << "time,rho_11,rho_NN,trace_error\n";
            for (size_t i = 0; i < times.size(); ++i)
                os << format_value(tr.times[i]) << ',' << format_value(tr.rho_11[i]) << ','
                   << format_value(tr.rho_nn[i]) << ',' << format_value(tr.trace_error[i])
                   << "\n";
            return {};
        }
        const GapReport gap = energy_gap(s);
        const FidelityTrace tr = cfg.mode == Mode::superposition
                                     ? superposition_transfer(s, times)
                                     : evolve(s, left_edge_state(s.n_sites), times);
        os << "# delta_e: " << format_value(gap.delta_e) << "\n";
        os << "# t_tau_two_level: " << format_value(gap.t_tau) << "\n";
        try {
            os << "# measured_transfer_time: "
               << format_value(measured_transfer_time(tr, cfg.transfer_threshold)) << "\n";
        } catch (const std::exception&) {
            os << "# measured_transfer_time: none\n";
        }
        const bool twolevel = cfg.include_two_level && cfg.mode == Mode::dynamics;
        FidelityTrace approx;
        if (twolevel) approx = two_level_fidelities(gap, times);
        os << "time,f_left,f_right";
        if (twolevel) os << ",f_left_two_level,f_right_two_level";
        os << "\n";
        for (size_t i = 0; i < times.size(); ++i) {
            os << format_value(tr.times[i]) << ',' << format_value(tr.f_left[i]) << ','
               << format_value(tr.f_right[i]);
            if (twolevel)
                os << ',' << format_value(approx.f_left[i]) << ','
                   << format_value(approx.f_right[i]);
            os << "\n";
        }
        return {};
    });
}

} // namespace detail

// Run a parsed experiment, writing CSV to `os`. Returns a failed outcome (with
// the offending grid points) only for compare mode; solver problems throw.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& os,
                                        int threads = 1) {
    detail::write_metadata(os, cfg);
    switch (cfg.mode) {
        case Mode::spectrum:
        case Mode::roots: return detail::run_spectrum_like(cfg, os, threads);
        case Mode::gap: return detail::run_gap(cfg, os, threads);
        case Mode::sweep: return detail::run_sweep(cfg, os, threads);
        case Mode::compare: return detail::run_compare(cfg, os, threads);
        case Mode::dynamics:
        case Mode::superposition:
        case Mode::lindblad: return detail::run_trace(cfg, os);
    }
    throw std::logic_error("run_experiment: unhandled mode");
}

} // namespace spinchain
