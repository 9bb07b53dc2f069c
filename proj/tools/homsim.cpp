// homsim command-line front end.
//
// Exit codes: 0 success, 1 model error, 2 configuration error,
// 3 validation failure.

#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "homsim/config.hpp"
#include "homsim/jsonio.hpp"
#include "homsim/reports.hpp"

namespace {

using homsim::cli::RunConfig;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::string method;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file");
    cmd->add_option("--out", opts.out_path, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--method", opts.method, "model for derived quantities")
        ->check(CLI::IsMember({"exact", "closed"}));
}

RunConfig build_config(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? homsim::cli::default_config()
                                             : homsim::cli::load_config_file(opts.config_path);
    if (!opts.out_path.empty()) cfg.output.path = opts.out_path;
    if (opts.format == "json") cfg.output.format = homsim::cli::OutputSpec::Format::json;
    if (opts.format == "csv") cfg.output.format = homsim::cli::OutputSpec::Format::csv;
    if (opts.method == "exact") cfg.method = homsim::experiment::Method::exact;
    if (opts.method == "closed") cfg.method = homsim::experiment::Method::closed_form;
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& doc) {
    if (cfg.output.path.empty()) {
        std::cout << doc << "\n";
    } else {
        homsim::jsonio::write_file_atomic(cfg.output.path, doc);
    }
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const homsim::cli::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "homsim: Hong-Ou-Mandel interference between a heralded single photon "
        "and a weak coherent pulse, exact truncated-Fock model plus the "
        "weak-transmittance closed form"};
    app.require_subcommand(1);

    CommonOpts opts;
    int rc = 0;

    CLI::App* overlap = app.add_subcommand(
        "overlap", "effective arm widths, peak overlap V(0) and dip width");
    add_common(overlap, opts);
    overlap->callback([&] {
        rc = run_guarded([&] {
            const RunConfig cfg = build_config(opts);
            emit(cfg, homsim::cli::render_overlap(cfg));
            return 0;
        });
    });

    CLI::App* dip = app.add_subcommand(
        "dip", "scan the coincidence dip over the delay grid and fit it");
    add_common(dip, opts);
    dip->callback([&] {
        rc = run_guarded([&] {
            const RunConfig cfg = build_config(opts);
            const homsim::cli::DipDocuments docs = homsim::cli::render_dip(cfg);
            emit(cfg, cfg.output.format == homsim::cli::OutputSpec::Format::csv ? docs.csv
                                                                                : docs.json);
            return 0;
        });
    });

    CLI::App* vis = app.add_subcommand("visibility", "dip visibility at zero delay");
    add_common(vis, opts);
    vis->callback([&] {
        rc = run_guarded([&] {
            const RunConfig cfg = build_config(opts);
            emit(cfg, homsim::cli::render_visibility(cfg));
            return 0;
        });
    });

    CLI::App* opt = app.add_subcommand(
        "optimize", "coherent-arm brightness minimizing the coincidence floor");
    add_common(opt, opts);
    opt->callback([&] {
        rc = run_guarded([&] {
            const RunConfig cfg = build_config(opts);
            emit(cfg, homsim::cli::render_optimize(cfg));
            return 0;
        });
    });

    CLI::App* val = app.add_subcommand(
        "validate", "run the invariant and cross-model consistency suite");
    add_common(val, opts);
    val->callback([&] {
        rc = run_guarded([&] {
            const RunConfig cfg = build_config(opts);
            const homsim::cli::ValidateOutcome outcome = homsim::cli::render_validate(cfg);
            emit(cfg, outcome.json);
            return outcome.all_pass ? 0 : 3;
        });
    });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
