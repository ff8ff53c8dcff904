// inflation_lab: command-line front end for the experiment harness.
// Exit codes: 0 success with passing verdicts, 1 verdict failure or experiment
// error, 2 configuration or usage error.

#include "inflab/config.hpp"
#include "inflab/errors.hpp"
#include "inflab/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string config;
    std::string out;
    int grid = 0;
    int dim = 0;
    bool no_plots = false;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
    auto* opt = cmd->add_option("--config", f.config, "YAML run configuration");
    if (config_required) opt->required();
    cmd->add_option("--out", f.out, "output root (default: config, then $INFLATION_LAB_OUT)");
    cmd->add_option("--grid", f.grid, "points per axis, overrides grid.N")->check(CLI::PositiveNumber);
    cmd->add_option("--dim", f.dim, "spatial dimension, overrides grid.dim")->check(CLI::Range(1, 3));
    cmd->add_flag("--no-plots", f.no_plots, "skip SVG charts");
    cmd->add_option("--jobs", f.jobs, "concurrent sweep entries")->check(CLI::PositiveNumber);
}

inflab::RunConfig load(const CommonFlags& f, const std::string& subcommand) {
    // Constraints are checked after the CLI overrides are applied.
    inflab::RunConfig c = inflab::parse_config(f.config, false);
    if (!subcommand.empty()) {
        const auto kind = inflab::experiment_from_name(subcommand);
        if (kind != c.experiment)
            throw inflab::PreconditionViolated("config selects experiment '" + inflab::experiment_name(c.experiment) +
                                               "' but the subcommand is '" + subcommand + "'");
    }
    if (f.grid) c.grid.n = f.grid;
    if (f.dim) c.grid.dim = f.dim;
    if (f.jobs) c.jobs = f.jobs;
    if (f.no_plots) c.output.plots = false;
    inflab::validate_config(c);
    return c;
}

void print_report(const inflab::RunOutcome& out) {
    for (const auto& v : out.report.verdicts)
        std::cout << (v.applicable ? (v.passed ? "PASS " : "FAIL ") : "N/A  ") << v.criterion << ' ' << v.name << ": "
                  << v.detail << '\n';
    for (const auto& n : out.report.notes) std::cout << "note: " << n << '\n';
    std::cout << "wall " << out.report.wall_seconds << " s, " << out.report.steps << " steps\n";
    std::cout << "results in " << out.directory.string() << " (manifest sha256 " << out.manifest_hash << ")\n";
}

int run_subcommand(const CommonFlags& f, const std::string& name) {
    const inflab::RunConfig c = load(f, name);
    const auto root = inflab::resolve_output_root(c, f.out);
    const auto out = inflab::run(c, root);
    if (!out.completed) {
        std::cerr << "experiment failed: " << out.error << "\npartial results in " << out.directory.string() << '\n';
        return kExitFailed;
    }
    print_report(out);
    return out.passed ? kExitOk : kExitFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral NLW simulator and norm-inflation experiment harness"};
    app.require_subcommand(1);

    const char* experiments[] = {"profile-check", "coarea-check", "perturbation-check", "fsp-check", "inflation-sweep"};
    std::vector<CommonFlags> flags(5);
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(experiments[i], "run the experiment"), flags[i], true);

    CommonFlags validate_flags;
    auto* validate = app.add_subcommand("validate", "parse and validate a config without running it");
    add_common(validate, validate_flags, true);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "re-render plots from a stored run directory");
    report->add_option("--out", report_dir, "run directory holding manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (int i = 0; i < 5; ++i)
            if (app.got_subcommand(experiments[i])) return run_subcommand(flags[i], experiments[i]);
        if (validate->parsed()) {
            const auto c = load(validate_flags, "");
            std::cout << inflab::serialize_config(c);
            std::cout << "config valid: " << inflab::experiment_name(c.experiment) << '\n';
            return kExitOk;
        }
        if (report->parsed()) {
            const auto out = inflab::rerender_report(report_dir);
            std::cout << "re-rendered plots in " << out.directory.string() << " (manifest sha256 "
                      << out.manifest_hash << ")\n";
            return out.passed ? kExitOk : kExitFailed;
        }
    } catch (const inflab::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const inflab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const inflab::PreconditionViolated& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitUsage;
}
