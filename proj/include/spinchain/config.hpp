// config.hpp — Declarative experiment configs: a flat key-value document
//
// One `key = value` pair per line, `#` comments, blank lines ignored. Grid
// axes accept a scalar, a comma list, or the range form `start:stop:count`
// (count uniformly spaced points, both ends included). Unknown and duplicate
// keys are errors, addressed by line number.

#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

enum class Mode { spectrum, gap, roots, dynamics, superposition, lindblad, sweep, compare };

inline const char* to_string(Mode m) noexcept {
    switch (m) {
        case Mode::spectrum: return "spectrum";
        case Mode::gap: return "gap";
        case Mode::roots: return "roots";
        case Mode::dynamics: return "dynamics";
        case Mode::superposition: return "superposition";
        case Mode::lindblad: return "lindblad";
        case Mode::sweep: return "sweep";
        case Mode::compare: return "compare";
    }
    return "?";
}

inline std::optional<Mode> mode_from_string(std::string_view s) {
    for (Mode m : {Mode::spectrum, Mode::gap, Mode::roots, Mode::dynamics, Mode::superposition,
                   Mode::lindblad, Mode::sweep, Mode::compare})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

struct ExperimentConfig {
    Mode mode = Mode::spectrum;
    int n_sites = 0;
    std::vector<double> delta_values;
    std::vector<double> beta_values;        // defaults to {0}
    std::vector<int> n_wells_values;        // sweep/compare axis (equal wells)
    std::optional<int> equal_wells;         // fixed layout, exclusive with barriers
    std::vector<int> barrier_bonds;         // fixed layout, explicit bond list
    double j0 = 1.0;
    double e0 = 0.0;
    double t_max = 0.0; // 0 = auto (1.5 half-periods of the gap)
    int n_times = 2000;
    double gamma_rate = 0.0;
    bool include_two_level = false;
    double transfer_threshold = 0.5;
    std::string out_path; // empty = stdout
    std::string source = "config";

    BarrierLayout fixed_layout() const {
        if (equal_wells) return BarrierLayout::equal_wells(n_sites, *equal_wells);
        if (!barrier_bonds.empty()) return BarrierLayout::at_bonds(barrier_bonds);
        return BarrierLayout::none();
    }

    ChainSpec chain_spec(double delta, double beta) const {
        ChainSpec s;
        s.n_sites = n_sites;
        s.delta = delta;
        s.beta = beta;
        s.layout = fixed_layout();
        s.j0 = j0;
        s.e0 = e0;
        return s;
    }

    ChainSpec chain_spec(double delta, double beta, int n_wells) const {
        ChainSpec s;
        s.n_sites = n_sites;
        s.delta = delta;
        s.beta = beta;
        s.layout = BarrierLayout::equal_wells(n_sites, n_wells);
        s.j0 = j0;
        s.e0 = e0;
        return s;
    }

    bool uses_wells_axis() const { return !n_wells_values.empty(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view v, const std::string& file, int line) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        throw ConfigError(file, line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline long parse_int(std::string_view v, const std::string& file, int line) {
    long out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        throw ConfigError(file, line, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool(std::string_view v, const std::string& file, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(file, line, "expected true/false, got '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split(std::string_view v, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    while (true) {
        const size_t pos = v.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(v.substr(start));
            break;
        }
        parts.push_back(v.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

// Scalar, comma list, or start:stop:count range.
inline std::vector<double> parse_axis(std::string_view v, const std::string& file, int line) {
    if (v.find(':') != std::string_view::npos) {
        const auto parts = split(v, ':');
        if (parts.size() != 3)
            throw ConfigError(file, line, "range must be start:stop:count");
        const double a = parse_double(trim(parts[0]), file, line);
        const double b = parse_double(trim(parts[1]), file, line);
        const long count = parse_int(trim(parts[2]), file, line);
        if (count < 1) throw ConfigError(file, line, "range count must be >= 1 (empty grid)");
        if (count == 1) {
            if (a != b) throw ConfigError(file, line, "range with count 1 needs start == stop");
            return {a};
        }
        std::vector<double> out(static_cast<size_t>(count));
        for (long i = 0; i < count; ++i)
            out[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (count - 1);
        return out;
    }
    std::vector<double> out;
    for (auto p : split(v, ',')) {
        p = trim(p);
        if (p.empty()) throw ConfigError(file, line, "empty entry in list");
        out.push_back(parse_double(p, file, line));
    }
    if (out.empty()) throw ConfigError(file, line, "empty grid");
    return out;
}

inline std::vector<int> parse_int_list(std::string_view v, const std::string& file, int line) {
    std::vector<int> out;
    for (auto p : split(v, ',')) {
        p = trim(p);
        if (p.empty()) throw ConfigError(file, line, "empty entry in list");
        out.push_back(static_cast<int>(parse_int(p, file, line)));
    }
    if (out.empty()) throw ConfigError(file, line, "empty list");
    return out;
}

} // namespace detail

// Parse a config document. When `expected_mode` is set (CLI subcommand), the
// mode key becomes optional and must agree if present.
inline ExperimentConfig parse_experiment_config(std::istream& in, const std::string& file,
                                                std::optional<Mode> expected_mode = std::nullopt) {
    using detail::trim;
    ExperimentConfig cfg;
    cfg.source = file;
    std::set<std::string, std::less<>> seen;
    bool have_mode = false, have_delta = false, have_beta = false;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const size_t hash = s.find('#'); hash != std::string_view::npos)
            s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const size_t eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(file, line, "expected 'key = value'");
        const std::string key{trim(s.substr(0, eq))};
        const std::string_view val = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(file, line, "missing key");
        if (val.empty()) throw ConfigError(file, line, "missing value for '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(file, line, "duplicate key '" + key + "'");

        if (key == "mode") {
            const auto m = mode_from_string(val);
            if (!m) throw ConfigError(file, line, "unknown mode '" + std::string(val) + "'");
            cfg.mode = *m;
            have_mode = true;
        } else if (key == "n_sites") {
            cfg.n_sites = static_cast<int>(detail::parse_int(val, file, line));
        } else if (key == "delta" || key == "delta_grid" || key == "delta_list") {
            if (have_delta) throw ConfigError(file, line, "delta axis specified twice");
            cfg.delta_values = detail::parse_axis(val, file, line);
            if (key == "delta" && cfg.delta_values.size() != 1)
                throw ConfigError(file, line, "'delta' takes a single value; use delta_grid");
            have_delta = true;
        } else if (key == "beta" || key == "beta_grid" || key == "beta_list") {
            if (have_beta) throw ConfigError(file, line, "beta axis specified twice");
            cfg.beta_values = detail::parse_axis(val, file, line);
            if (key == "beta" && cfg.beta_values.size() != 1)
                throw ConfigError(file, line, "'beta' takes a single value; use beta_grid");
            have_beta = true;
        } else if (key == "n_wells_list") {
            cfg.n_wells_values = detail::parse_int_list(val, file, line);
        } else if (key == "equal_wells") {
            cfg.equal_wells = static_cast<int>(detail::parse_int(val, file, line));
        } else if (key == "barriers") {
            cfg.barrier_bonds = detail::parse_int_list(val, file, line);
        } else if (key == "j0") {
            cfg.j0 = detail::parse_double(val, file, line);
        } else if (key == "e0") {
            cfg.e0 = detail::parse_double(val, file, line);
        } else if (key == "t_max") {
            if (val == "auto")
                cfg.t_max = 0.0;
            else
                cfg.t_max = detail::parse_double(val, file, line);
        } else if (key == "n_times") {
            cfg.n_times = static_cast<int>(detail::parse_int(val, file, line));
        } else if (key == "gamma") {
            cfg.gamma_rate = detail::parse_double(val, file, line);
        } else if (key == "include_two_level") {
            cfg.include_two_level = detail::parse_bool(val, file, line);
        } else if (key == "threshold") {
            cfg.transfer_threshold = detail::parse_double(val, file, line);
        } else if (key == "out") {
            cfg.out_path = std::string(val);
        } else {
            throw ConfigError(file, line, "unknown key '" + key + "'");
        }
    }

    if (expected_mode) {
        if (have_mode && cfg.mode != *expected_mode)
            throw ConfigError(file, "config mode '" + std::string(to_string(cfg.mode)) +
                                        "' conflicts with subcommand '" +
                                        to_string(*expected_mode) + "'");
        cfg.mode = *expected_mode;
    } else if (!have_mode) {
        throw ConfigError(file, "missing required key 'mode'");
    }

    // --- field validation ---
    auto fail = [&](const std::string& msg) -> void { throw ConfigError(file, msg); };
    if (cfg.n_sites < 2) fail("n_sites must be given and >= 2");
    if (!have_delta) fail("missing delta (or delta_grid/delta_list)");
    if (!have_beta) cfg.beta_values = {0.0};
    if (cfg.equal_wells && !cfg.barrier_bonds.empty())
        fail("equal_wells and barriers are mutually exclusive");
    if (cfg.n_times < 2) fail("n_times must be >= 2");
    if (cfg.t_max < 0.0) fail("t_max must be > 0 or auto");
    if (cfg.gamma_rate < 0.0) fail("gamma must be >= 0");
    if (!(cfg.j0 > 0.0)) fail("j0 must be > 0");
    if (!(cfg.transfer_threshold > 0.0 && cfg.transfer_threshold <= 1.0))
        fail("threshold must be in (0, 1]");
    for (double d : cfg.delta_values)
        if (d < 0.0) fail("delta must be >= 0");
    for (double b : cfg.beta_values)
        if (b < 0.0) fail("beta must be >= 0");

    const bool single_point_mode = cfg.mode == Mode::dynamics || cfg.mode == Mode::superposition ||
                                   cfg.mode == Mode::lindblad;
    if (single_point_mode) {
        if (cfg.delta_values.size() != 1 || cfg.beta_values.size() != 1)
            fail(std::string(to_string(cfg.mode)) + " mode takes single delta and beta values");
        if (!cfg.n_wells_values.empty()) fail("n_wells_list is not valid for trace modes");
    }
    if (cfg.mode == Mode::gap && cfg.delta_values.size() != 1)
        fail("gap mode takes a single delta; sweep mode handles delta grids");
    if (!cfg.n_wells_values.empty() && (cfg.equal_wells || !cfg.barrier_bonds.empty()))
        fail("n_wells_list conflicts with a fixed layout");
    if (cfg.mode != Mode::sweep && cfg.mode != Mode::compare && !cfg.n_wells_values.empty())
        fail("n_wells_list is only valid in sweep and compare modes");

    // Layout checks that are decidable now.
    try {
        if (cfg.equal_wells) (void)BarrierLayout::equal_wells(cfg.n_sites, *cfg.equal_wells);
        BarrierLayout l = BarrierLayout::at_bonds(cfg.barrier_bonds);
        l.validate(cfg.n_sites);
    } catch (const std::exception& e) {
        fail(e.what());
    }
    if (cfg.mode == Mode::roots || cfg.mode == Mode::compare) {
        if (!cfg.barrier_bonds.empty()) {
            BarrierLayout l = BarrierLayout::at_bonds(cfg.barrier_bonds);
            if (!l.is_equal_well(cfg.n_sites))
                fail("the analytic path needs an equal-well layout");
        }
    }
    for (int nw : cfg.n_wells_values)
        if (nw < 1 || cfg.n_sites % nw != 0 || (nw > 1 && cfg.n_sites / nw < 2))
            fail("n_wells " + std::to_string(nw) + " does not split " +
                 std::to_string(cfg.n_sites) + " sites into equal wells");
    return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text, const std::string& file,
                                                std::optional<Mode> expected_mode = std::nullopt) {
    std::istringstream in(text);
    return parse_experiment_config(in, file, expected_mode);
}

} // namespace spinchain
