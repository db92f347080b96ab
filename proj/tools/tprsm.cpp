// tprsm - command-line front end for the two-photon Rabi-Stark toolkit.

#include "tprsm/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using tprsm::cli::json;

template <class T>
void bind_option(CLI::App& app, json& patch, const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<T>(flag, [&patch, key](const T& v) { patch[key] = v; }, help);
}

int fail(const std::string& kind, const std::string& message, const std::string& command, int code) {
    std::cerr << tprsm::cli::error_record(kind, message, command) << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of the two-photon Rabi-Stark model"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    json patch = json::object();
    std::string config_path;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON config (bare or a previous JSON output); flags override it");
    app.add_option("--threads", threads, "worker threads (default: TPRSM_THREADS or hardware concurrency)");

    bind_option<double>(app, patch, "--delta", "delta", "qubit splitting Delta >= 0");
    bind_option<double>(app, patch, "--u", "u", "Stark coupling U, |U| < 1");
    bind_option<double>(app, patch, "--g", "g", "two-photon coupling g");
    bind_option<double>(app, patch, "--g-min", "g_min", "sweep start in g");
    bind_option<double>(app, patch, "--g-max", "g_max", "sweep end in g");
    bind_option<std::size_t>(app, patch, "--steps", "steps", "number of g values in a sweep");
    bind_option<std::size_t>(app, patch, "--levels", "levels", "levels per sector");
    bind_option<std::string>(app, patch, "--method", "method", "gfunction | ed | both");
    bind_option<std::string>(app, patch, "--q", "q", "Bargmann index: all | 0.25 | 0.75");
    bind_option<std::string>(app, patch, "--parity", "parity", "parity branch: all | +1 | -1");
    bind_option<double>(app, patch, "--tol", "tol", "ED truncation convergence tolerance");
    bind_option<double>(app, patch, "--series-tol", "series_tol", "G-series convergence tolerance");
    bind_option<std::size_t>(app, patch, "--n-max", "n_max", "maximum G-series terms");
    bind_option<double>(app, patch, "--e-min", "e_min", "lower end of the energy window (gzeros)");
    bind_option<double>(app, patch, "--e-max", "e_max", "upper end of the energy window (gzeros)");
    bind_option<std::size_t>(app, patch, "--pole", "pole", "pole index m (special-points)");
    bind_option<double>(app, patch, "--x-min", "x_min", "lower x = -log10(1 - g/g_c)");
    bind_option<double>(app, patch, "--x-max", "x_max", "upper x = -log10(1 - g/g_c)");
    bind_option<std::size_t>(app, patch, "--points", "points", "samples in x");
    bind_option<double>(app, patch, "--delta-min", "delta_min", "Delta sweep start");
    bind_option<double>(app, patch, "--delta-max", "delta_max", "Delta sweep end");
    bind_option<std::size_t>(app, patch, "--delta-steps", "delta_steps", "Delta sweep size");
    bind_option<double>(app, patch, "--rel-offset", "rel_offset", "gap-vs-delta coupling g_c (1 - offset)");
    bind_option<double>(app, patch, "--domain", "domain", "finite-difference half width");
    bind_option<std::size_t>(app, patch, "--grid-points", "grid_points", "finite-difference grid points");
    bind_option<std::size_t>(app, patch, "--samples", "samples", "random states in the positivity witness");
    bind_option<std::uint64_t>(app, patch, "--seed", "seed", "random seed");
    bind_option<std::size_t>(app, patch, "--max-truncation", "max_truncation", "largest ED truncation per sector");
    bind_option<std::string>(app, patch, "--format", "format", "csv | json");
    bind_option<std::string>(app, patch, "--out", "out", "output file (default: stdout)");

    std::vector<CLI::App*> subs;
    for (const auto& name : tprsm::cli::command_names()) subs.push_back(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what(), "", 2);
    }

    tprsm::cli::RunConfig cfg;
    try {
        json base = cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) return fail("io", "cannot read config " + config_path, "", 2);
            base.merge_patch(json(tprsm::cli::config_from_json(json::parse(in))));
        }
        for (auto* s : subs) {
            if (s->parsed()) patch["command"] = s->get_name();
        }
        base.merge_patch(patch);
        cfg = tprsm::cli::config_from_json(base);
    } catch (const std::exception& e) {
        return fail("config", e.what(), "", 2);
    }
    if (config_path.empty() && !patch.contains("command")) {
        std::cerr << app.help();
        return fail("usage", "no command given", "", 2);
    }

    tprsm::cli::Output out;
    try {
        out = tprsm::cli::run(cfg, threads);
    } catch (const tprsm::ModelError& e) {
        return fail("invalid_parameter", e.what(), cfg.command, 1);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_parameter", e.what(), cfg.command, 1);
    } catch (const std::exception& e) {
        return fail("computation", e.what(), cfg.command, 3);
    }

    if (cfg.out.empty()) {
        tprsm::cli::write(std::cout, cfg, out);
    } else {
        std::ofstream f(cfg.out);
        if (!f) return fail("io", "cannot write " + cfg.out, cfg.command, 2);
        tprsm::cli::write(f, cfg, out);
        if (!out.ok()) {
            std::ofstream m(cfg.out + ".failures.json");
            m << json{{"command", cfg.command}, {"failures", out.failures}}.dump(2) << '\n';
        }
    }
    if (!out.ok()) return fail("partial", "some points failed; see failures", cfg.command, 4);
    return 0;
}
