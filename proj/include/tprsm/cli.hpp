// cli.hpp - run configuration, command dispatch and CSV/JSON output for the
// tprsm command-line tool. Kept header-only so tests can drive run() directly.

#pragma once

#include "tprsm/collapse.hpp"
#include "tprsm/criticality.hpp"
#include "tprsm/ed.hpp"
#include "tprsm/gfunction.hpp"
#include "tprsm/model.hpp"
#include "tprsm/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tprsm::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"derived",  "spectrum", "gzeros",        "special-points", "collapse",
                                                "ladder",   "gap",      "gap-exponent",  "gap-vs-delta"};
    return names;
}

struct RunConfig {
    std::string command = "derived";
    double delta = 0.5;
    double stark = 0.1;
    double g = 0.0;
    std::optional<double> g_min;
    std::optional<double> g_max;
    std::size_t steps = 1;
    std::size_t levels = 10;
    std::string method = "both";  // gfunction | ed | both
    std::string q = "all";        // all | 0.25 | 0.75
    std::string parity = "all";   // all | +1 | -1
    double tol = 1e-10;           // ED truncation-convergence tolerance
    double series_tol = 1e-14;
    std::size_t n_max = 5000;
    std::optional<double> e_min;
    std::optional<double> e_max;
    std::size_t pole = 1;  // special-points pole index m
    double x_min = 1.5;
    double x_max = 4.0;
    std::size_t points = 11;
    double delta_min = 0.15;
    double delta_max = 0.35;
    std::size_t delta_steps = 21;
    double rel_offset = 1e-6;
    double domain = 1e9;
    std::size_t grid_points = 40001;
    std::size_t samples = 1000;
    std::uint64_t seed = 12345;
    std::size_t max_truncation = std::size_t{1} << 20;
    std::string format = "csv";
    std::string out;
};

inline void to_json(json& j, const RunConfig& c) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j = json{{"command", c.command},       {"delta", c.delta},
             {"u", c.stark},               {"g", c.g},
             {"g_min", opt(c.g_min)},      {"g_max", opt(c.g_max)},
             {"steps", c.steps},           {"levels", c.levels},
             {"method", c.method},         {"q", c.q},
             {"parity", c.parity},         {"tol", c.tol},
             {"series_tol", c.series_tol}, {"n_max", c.n_max},
             {"e_min", opt(c.e_min)},      {"e_max", opt(c.e_max)},
             {"pole", c.pole},             {"x_min", c.x_min},
             {"x_max", c.x_max},           {"points", c.points},
             {"delta_min", c.delta_min},   {"delta_max", c.delta_max},
             {"delta_steps", c.delta_steps}, {"rel_offset", c.rel_offset},
             {"domain", c.domain},         {"grid_points", c.grid_points},
             {"samples", c.samples},       {"seed", c.seed},
             {"max_truncation", c.max_truncation},
             {"format", c.format},         {"out", c.out}};
}

inline void from_json(const json& j, RunConfig& c) {
    const RunConfig d;
    auto opt = [&](const char* key, const std::optional<double>& fallback) -> std::optional<double> {
        if (!j.contains(key)) return fallback;
        if (j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
    };
    c.command = j.value("command", d.command);
    c.delta = j.value("delta", d.delta);
    c.stark = j.value("u", d.stark);
    c.g = j.value("g", d.g);
    c.g_min = opt("g_min", d.g_min);
    c.g_max = opt("g_max", d.g_max);
    c.steps = j.value("steps", d.steps);
    c.levels = j.value("levels", d.levels);
    c.method = j.value("method", d.method);
    c.q = j.value("q", d.q);
    c.parity = j.value("parity", d.parity);
    c.tol = j.value("tol", d.tol);
    c.series_tol = j.value("series_tol", d.series_tol);
    c.n_max = j.value("n_max", d.n_max);
    c.e_min = opt("e_min", d.e_min);
    c.e_max = opt("e_max", d.e_max);
    c.pole = j.value("pole", d.pole);
    c.x_min = j.value("x_min", d.x_min);
    c.x_max = j.value("x_max", d.x_max);
    c.points = j.value("points", d.points);
    c.delta_min = j.value("delta_min", d.delta_min);
    c.delta_max = j.value("delta_max", d.delta_max);
    c.delta_steps = j.value("delta_steps", d.delta_steps);
    c.rel_offset = j.value("rel_offset", d.rel_offset);
    c.domain = j.value("domain", d.domain);
    c.grid_points = j.value("grid_points", d.grid_points);
    c.samples = j.value("samples", d.samples);
    c.seed = j.value("seed", d.seed);
    c.max_truncation = j.value("max_truncation", d.max_truncation);
    c.format = j.value("format", d.format);
    c.out = j.value("out", d.out);
}

/// Accepts a bare config object or a previous JSON output with a "config" block.
inline RunConfig config_from_json(const json& j) {
    return (j.contains("config") && j.at("config").is_object()) ? j.at("config").get<RunConfig>()
                                                                  : j.get<RunConfig>();
}

// ---------------------------------------------------------------------------
// Output table

using Cell = std::variant<double, long long, std::string>;

struct Output {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json summary = json::object();
    json convergence = json::object();
    json failures = json::array();

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw std::logic_error("output row width mismatch");
        rows.push_back(std::move(row));
    }
    bool ok() const { return failures.empty(); }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json versions() {
    return json{{"tprsm", kVersion},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__VERSION__)
                {"compiler", __VERSION__},
#endif
                {"cxx_standard", static_cast<long long>(__cplusplus)}};
}

inline void write_csv(std::ostream& os, const RunConfig& cfg, const Output& out) {
    os << "# tprsm " << cfg.command << '\n';
    os << "# config: " << json(cfg).dump() << '\n';
    os << "# versions: " << versions().dump() << '\n';
    os << "# convergence: " << out.convergence.dump() << '\n';
    if (!out.summary.empty()) os << "# summary: " << out.summary.dump() << '\n';
    if (!out.failures.empty()) os << "# failures: " << out.failures.dump() << '\n';
    for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << out.columns[i];
    os << '\n';
    for (const auto& row : out.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) os << format_double(v);
                    else os << v;
                },
                row[i]);
        }
        os << '\n';
    }
}

inline json to_json_document(const RunConfig& cfg, const Output& out) {
    json rows = json::array();
    for (const auto& row : out.rows) {
        json r = json::array();
        for (const auto& c : row) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        r.push_back(std::isfinite(v) ? json(v) : json(format_double(v)));
                    } else {
                        r.push_back(v);
                    }
                },
                c);
        }
        rows.push_back(std::move(r));
    }
    return json{{"config", cfg},          {"versions", versions()}, {"convergence", out.convergence},
                {"summary", out.summary}, {"failures", out.failures}, {"columns", out.columns},
                {"rows", std::move(rows)}};
}

inline void write_json(std::ostream& os, const RunConfig& cfg, const Output& out) {
    os << to_json_document(cfg, out).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline std::vector<SectorLabel> selected_sectors(const RunConfig& cfg) {
    if (cfg.q != "all" && cfg.q != "0.25" && cfg.q != "0.75") throw std::invalid_argument("--q must be all, 0.25 or 0.75");
    if (cfg.parity != "all" && cfg.parity != "+1" && cfg.parity != "-1" && cfg.parity != "1") {
        throw std::invalid_argument("--parity must be all, +1 or -1");
    }
    std::vector<SectorLabel> out;
    for (std::size_t i = 0; i < kSectorCount; ++i) {
        const auto s = sector_at(i);
        const bool q_ok = cfg.q == "all" || (cfg.q == "0.25") == (s.q == Bargmann::quarter);
        const bool p_ok = cfg.parity == "all" || (cfg.parity == "-1") == (s.parity == -1);
        if (q_ok && p_ok) out.push_back(s);
    }
    return out;
}

inline double safe_scaled(double e, const ModelParams& p, Bargmann q) {
    return derive_params(p).beta > 0.0 ? scaled_energy(e, p, q) : kNaN;
}

inline double safe_x(double g, double gc) { return g < gc ? log_distance(g, gc) : std::numeric_limits<double>::infinity(); }

inline gfunc::ZeroSearchOptions zero_options(const RunConfig& cfg) {
    gfunc::ZeroSearchOptions o;
    o.series.tol = cfg.series_tol;
    o.series.n_max = cfg.n_max;
    return o;
}

inline ed::ConvergeOptions ed_options(const RunConfig& cfg) {
    ed::ConvergeOptions o;
    o.max_truncation = cfg.max_truncation;
    return o;
}

inline std::vector<double> coupling_grid(const RunConfig& cfg) {
    if (cfg.g_min && cfg.g_max) {
        if (cfg.steps == 0) throw std::invalid_argument("--steps must be positive");
        return crit::linspace(*cfg.g_min, *cfg.g_max, cfg.steps);
    }
    if (cfg.g_min || cfg.g_max) throw std::invalid_argument("--g-min and --g-max must be given together");
    return {cfg.g};
}

inline long long parity_cell(const SectorLabel& s) { return s.parity; }

inline json failure(const std::string& where, const std::string& what) {
    return json{{"point", where}, {"error", what}};
}

inline Output run_derived(const RunConfig& cfg) {
    const ModelParams p(cfg.delta, cfg.stark, cfg.g);
    const auto d = derive_params(p);
    Output out;
    out.columns = {"delta", "u", "g", "x", "gamma", "beta", "tanh_theta", "theta", "g_crit", "threshold_energy",
                   "spectrum_lower_bound"};
    out.add({cfg.delta, cfg.stark, cfg.g, safe_x(cfg.g, d.g_crit), d.gamma, d.beta, d.tanh_theta, d.theta, d.g_crit,
             threshold_energy(cfg.delta, cfg.stark), spectrum_lower_bound(p)});
    return out;
}

struct SpectrumPoint {
    std::vector<std::vector<Cell>> rows;
    json failure;  // null when the point completed
    bool ed_converged = true;
    double ed_residual = 0.0;
};

inline Output run_spectrum(const RunConfig& cfg, unsigned threads) {
    if (cfg.method != "gfunction" && cfg.method != "ed" && cfg.method != "both") {
        throw std::invalid_argument("--method must be gfunction, ed or both");
    }
    const auto gs = coupling_grid(cfg);
    for (double g : gs) (void)ModelParams(cfg.delta, cfg.stark, g);  // validate the whole sweep up front
    const auto sectors = selected_sectors(cfg);
    const bool use_g = cfg.method != "ed";
    const bool use_ed = cfg.method != "gfunction";
    const double gc = critical_coupling(cfg.stark);

    auto points = parallel_map<SpectrumPoint>(
        gs.size(),
        [&](std::size_t i) {
            SpectrumPoint pt;
            const double g = gs[i];
            const ModelParams p(cfg.delta, cfg.stark, g);
            const double x = safe_x(g, gc);
            try {
                for (const auto& s : sectors) {
                    const double qv = s.q_value();
                    if (g > 0.0) {
                        // pole lines inside the plotted level range
                        const std::size_t first = cfg.stark != 0.0 ? 0 : 1;
                        for (std::size_t n = first; n <= cfg.levels; ++n) {
                            const double e = pole_energy(n, s.q, p);
                            pt.rows.push_back({g, x, qv, parity_cell(s), static_cast<long long>(n), e,
                                               safe_scaled(e, p, s.q), std::string("pole"), kNaN, 1LL, 0LL});
                        }
                    }
                    if (use_g) {
                        const auto z = gfunc::lowest_zeros(p, s, cfg.levels, zero_options(cfg));
                        for (std::size_t k = 0; k < z.energies.size(); ++k) {
                            pt.rows.push_back({g, x, qv, parity_cell(s), static_cast<long long>(k), z.energies[k],
                                               safe_scaled(z.energies[k], p, s.q), std::string("gfunction"),
                                               z.bracket_tolerance, 1LL, 0LL});
                        }
                    }
                    if (use_ed) {
                        const auto r = ed::converge(p, s, cfg.levels, cfg.tol, ed_options(cfg));
                        pt.ed_converged = pt.ed_converged && r.converged;
                        pt.ed_residual = std::max(pt.ed_residual, r.residual);
                        for (std::size_t k = 0; k < r.energies.size(); ++k) {
                            pt.rows.push_back({g, x, qv, parity_cell(s), static_cast<long long>(k), r.energies[k],
                                               safe_scaled(r.energies[k], p, s.q), std::string("ed"), r.residual,
                                               r.converged ? 1LL : 0LL, static_cast<long long>(r.K_used)});
                        }
                        if (!r.converged) {
                            pt.failure = failure("g=" + format_double(g), "ED did not converge within max truncation");
                        }
                    }
                }
            } catch (const std::exception& e) {
                pt.rows.clear();
                pt.failure = failure("g=" + format_double(g), e.what());
            }
            return pt;
        },
        threads);

    Output out;
    out.columns = {"g", "x", "sector_q", "parity", "level_index", "energy", "energy_scaled", "method", "residual",
                   "converged", "K_used"};
    bool all_ed = true;
    double worst = 0.0;
    for (auto& pt : points) {
        for (auto& r : pt.rows) out.add(std::move(r));
        if (!pt.failure.is_null()) out.failures.push_back(pt.failure);
        all_ed = all_ed && pt.ed_converged;
        worst = std::max(worst, pt.ed_residual);
    }
    out.convergence = {{"ed_converged", all_ed}, {"ed_max_residual", worst}, {"points", gs.size()}};
    return out;
}

inline Output run_gzeros(const RunConfig& cfg) {
    const ModelParams p(cfg.delta, cfg.stark, cfg.g);
    Output out;
    out.columns = {"g", "sector_q", "parity", "level_index", "energy", "energy_scaled", "bracket_tolerance"};
    const auto opt = zero_options(cfg);
    for (const auto& s : selected_sectors(cfg)) {
        gfunc::EigenvalueList z;
        if (cfg.e_min && cfg.e_max) z = gfunc::find_zeros(p, s, *cfg.e_min, *cfg.e_max, opt);
        else if (cfg.e_min || cfg.e_max) throw std::invalid_argument("--e-min and --e-max must be given together");
        else z = gfunc::lowest_zeros(p, s, cfg.levels, opt);
        for (std::size_t k = 0; k < z.energies.size(); ++k) {
            out.add({cfg.g, s.q_value(), parity_cell(s), static_cast<long long>(k), z.energies[k],
                     safe_scaled(z.energies[k], p, s.q), z.bracket_tolerance});
        }
    }
    out.convergence = {{"series_tol", cfg.series_tol}, {"n_max", cfg.n_max}};
    return out;
}

inline Output run_special_points(const RunConfig& cfg, unsigned threads) {
    (void)ModelParams(cfg.delta, cfg.stark, 0.0);
    if (cfg.pole == 0 && cfg.stark == 0.0) throw ModelError("zeroth pole undefined for U = 0");
    const auto sectors = selected_sectors(cfg);
    const gfunc::CouplingGrid grid{cfg.x_min, cfg.x_max, cfg.points};
    gfunc::SeriesOptions series{cfg.series_tol, std::max<std::size_t>(cfg.n_max, 2000000), 10};
    struct Part {
        std::vector<gfunc::NondegeneratePoint> pts;
        std::string error;
    };
    auto parts = parallel_map<Part>(
        sectors.size(),
        [&](std::size_t i) {
            Part part;
            try {
                part.pts = gfunc::find_nondegenerate_points(cfg.pole, grid, cfg.delta, cfg.stark, sectors[i], series);
            } catch (const std::exception& e) {
                part.error = e.what();
            }
            return part;
        },
        threads);
    Output out;
    out.columns = {"sector_q", "parity", "pole", "g", "x", "energy"};
    for (std::size_t i = 0; i < sectors.size(); ++i) {
        for (const auto& pt : parts[i].pts) {
            out.add({sectors[i].q_value(), parity_cell(sectors[i]), static_cast<long long>(cfg.pole), pt.g, pt.x,
                     pt.energy});
        }
        if (!parts[i].error.empty()) {
            out.failures.push_back(failure("sector q=" + format_double(sectors[i].q_value()) + " p=" +
                                               std::to_string(sectors[i].parity),
                                           parts[i].error));
        }
    }
    out.convergence = {{"series_tol", series.tol}, {"n_max", series.n_max}};
    return out;
}

inline Output run_collapse(const RunConfig& cfg) {
    const auto c = collapse::classify(cfg.delta, cfg.stark);
    const collapse::EffectivePotential v(cfg.delta, cfg.stark, 0.0);
    Output out;
    out.columns = {"delta", "u", "kind", "threshold_energy", "collapse_energy", "nu2", "faddeev_log_slope",
                   "witness_min_expectation", "witness_min_eigenvalue"};
    double nu2 = kNaN;
    if (cfg.stark != 0.0 || cfg.delta == 0.0) nu2 = collapse::nu_squared(cfg.delta, cfg.stark, 0.0);
    double wexp = kNaN, weig = kNaN;
    if (c.kind == collapse::CollapseKind::full_collapse && cfg.stark >= 0.0) {
        const auto w = collapse::positivity_witness(cfg.stark, -0.5 - 1e-3, 200, cfg.samples, cfg.seed);
        wexp = w.min_expectation;
        weig = w.min_eigenvalue;
        out.convergence["witness_holds"] = w.holds;
        if (!w.holds) out.failures.push_back(failure("witness", "positivity witness violated"));
    }
    out.add({cfg.delta, cfg.stark, std::string(collapse::kind_name(c.kind)), c.threshold_energy,
             c.collapse_energy_if_full, nu2, collapse::faddeev_log_slope(v, 1e6, 1e8), wexp, weig});
    return out;
}

inline Output run_ladder(const RunConfig& cfg) {
    collapse::classify(cfg.delta, cfg.stark);
    collapse::FdOptions opt;
    opt.x_max = cfg.domain;
    opt.grid_points = cfg.grid_points;
    opt.levels = cfg.levels;
    const auto fd = collapse::fd_bound_levels(cfg.delta, cfg.stark, opt);
    std::optional<collapse::BoundLadder> theory;
    if (collapse::nu_squared(cfg.delta, cfg.stark, 0.0) < 0.0) {
        theory = collapse::ladder_ratios(cfg.delta, cfg.stark, fd.kappa2.empty() ? 0 : fd.kappa2.size() - 1);
    }
    Output out;
    out.columns = {"n", "kappa2", "ratio_fd", "ratio_theory", "fixed_point_residual", "refinement_shift"};
    for (std::size_t n = 0; n < fd.kappa2.size(); ++n) {
        out.add({static_cast<long long>(n), fd.kappa2[n], fd.kappa2[n] / fd.kappa2[0],
                 theory ? theory->ratios[n] : kNaN, fd.residuals[n],
                 n < fd.refinement_shift.size() ? fd.refinement_shift[n] : kNaN});
    }
    out.convergence = {{"grid_converged", fd.converged}, {"grid_points", fd.grid_points}};
    out.summary["nu2"] = collapse::nu_squared(cfg.delta, cfg.stark, 0.0);
    if (theory) out.summary["theory_slope"] = -theory->decay_rate();
    if (fd.kappa2.size() >= 5) {
        std::vector<double> n, y;
        for (std::size_t k = 3; k < fd.kappa2.size(); ++k) {
            n.push_back(static_cast<double>(k));
            y.push_back(std::log(fd.kappa2[k] / fd.kappa2[0]));
        }
        const auto f = crit::linear_fit(n, y);
        out.summary["fd_slope_n_ge_3"] = f.slope;
        out.summary["fd_r_squared"] = f.r_squared;
    }
    if (!fd.converged) out.failures.push_back(failure("fd grid", "level shift under grid doubling above tolerance"));
    return out;
}

inline std::vector<Cell> gap_row(double key, double g, double gc, const crit::GapResult& r) {
    return {key, g, safe_x(g, gc), r.gap, r.ground, r.excited, r.ground_sector.q_value(),
            parity_cell(r.ground_sector), r.excited_sector.q_value(), parity_cell(r.excited_sector), r.residual,
            r.converged ? 1LL : 0LL, static_cast<long long>(r.K_used)};
}

inline std::vector<std::string> gap_columns(const std::string& key) {
    return {key,         "g",    "x",         "gap",      "e0",        "e1",    "e0_q",
            "e0_parity", "e1_q", "e1_parity", "residual", "converged", "K_used"};
}

inline Output run_gap(const RunConfig& cfg) {
    const ModelParams p(cfg.delta, cfg.stark, cfg.g);
    const auto r = crit::gap(p, cfg.tol, ed_options(cfg));
    Output out;
    out.columns = gap_columns("delta");
    out.add(gap_row(cfg.delta, cfg.g, p.g_crit(), r));
    out.convergence = {{"ed_converged", r.converged}, {"ed_max_residual", r.residual}};
    if (!r.converged) out.failures.push_back(failure("g=" + format_double(cfg.g), "ED did not converge"));
    return out;
}

inline Output run_gap_exponent(const RunConfig& cfg, unsigned threads) {
    (void)ModelParams(cfg.stark, cfg.stark, 0.0);
    const auto f = crit::gap_exponent(cfg.stark, cfg.x_min, cfg.x_max, cfg.points, cfg.tol, threads, ed_options(cfg));
    const double gc = critical_coupling(cfg.stark);
    Output out;
    out.columns = gap_columns("x_target");
    for (const auto& s : f.curve.samples) out.add(gap_row(s.x, s.coupling, gc, s.result));
    for (const auto& s : f.curve.excluded) {
        out.failures.push_back(failure("x=" + format_double(s.x), "gap sample unconverged, excluded from fit"));
    }
    out.summary = {{"z_nu", f.z_nu},         {"slope", f.fit.slope},   {"intercept", f.fit.intercept},
                   {"r_squared", f.fit.r_squared}, {"fit_x_min", f.x_min}, {"fit_x_max", f.x_max},
                   {"fitted_points", f.fit.points}};
    out.convergence = {{"excluded", f.curve.excluded.size()}};
    return out;
}

inline Output run_gap_vs_delta(const RunConfig& cfg, unsigned threads) {
    if (cfg.delta_steps < 2) throw std::invalid_argument("--delta-steps must be >= 2");
    (void)ModelParams(cfg.delta_min, cfg.stark, 0.0);
    (void)ModelParams(cfg.delta_max, cfg.stark, 0.0);
    const auto grid = crit::linspace(cfg.delta_min, cfg.delta_max, cfg.delta_steps);
    const auto sweep = crit::gap_vs_delta(cfg.stark, grid, cfg.rel_offset, cfg.tol, threads, ed_options(cfg));
    const double gc = critical_coupling(cfg.stark);
    Output out;
    out.columns = gap_columns("delta");
    for (const auto& s : sweep.curve.samples) out.add(gap_row(s.x, s.coupling, gc, s.result));
    for (const auto& s : sweep.curve.excluded) {
        out.failures.push_back(failure("delta=" + format_double(s.x), "gap sample unconverged, excluded from fit"));
    }
    out.summary = {{"coupling_substitution", "g = g_c (1 - " + format_double(cfg.rel_offset) + ")"},
                   {"coupling", sweep.coupling},
                   {"quadratic_slope", sweep.quadratic.slope},
                   {"quadratic_intercept", sweep.quadratic.intercept},
                   {"quadratic_r_squared", sweep.quadratic.r_squared},
                   {"quadratic_points", sweep.quadratic.points}};
    out.convergence = {{"excluded", sweep.curve.excluded.size()}};
    return out;
}

}  // namespace detail

/// Validates the configuration against the model constraints and runs the
/// command. Invalid parameters throw; per-point failures land in
/// Output::failures next to the completed rows.
inline Output run(const RunConfig& cfg, unsigned threads = 0) {
    if (cfg.format != "csv" && cfg.format != "json") throw std::invalid_argument("--format must be csv or json");
    const auto& c = cfg.command;
    if (c == "derived") return detail::run_derived(cfg);
    if (c == "spectrum") return detail::run_spectrum(cfg, threads);
    if (c == "gzeros") return detail::run_gzeros(cfg);
    if (c == "special-points") return detail::run_special_points(cfg, threads);
    if (c == "collapse") return detail::run_collapse(cfg);
    if (c == "ladder") return detail::run_ladder(cfg);
    if (c == "gap") return detail::run_gap(cfg);
    if (c == "gap-exponent") return detail::run_gap_exponent(cfg, threads);
    if (c == "gap-vs-delta") return detail::run_gap_vs_delta(cfg, threads);
    throw std::invalid_argument("unknown command: " + c);
}

inline void write(std::ostream& os, const RunConfig& cfg, const Output& out) {
    if (cfg.format == "json") write_json(os, cfg, out);
    else write_csv(os, cfg, out);
}

/// One-line machine-readable error record.
inline std::string error_record(const std::string& kind, const std::string& message, const std::string& command) {
    return json{{"error", {{"kind", kind}, {"message", message}, {"command", command}}}}.dump();
}

}  // namespace tprsm::cli
