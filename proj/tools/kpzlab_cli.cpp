// kpzlab command-line front end: simulate, fbm, stats, verify, report.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "kpzlab/config.hpp"
#include "kpzlab/experiment.hpp"
#include "kpzlab/report.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<std::size_t> threads;
    std::optional<std::string> out;
    bool override_guard = false;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "Experiment configuration (INI)");
    cmd->add_option("--seed", f.seed, "Master seed (run.seed)");
    cmd->add_option("--replicas", f.replicas, "Number of replicas (run.replicas)");
    cmd->add_option("--threads", f.threads, "Worker threads (run.threads)");
    cmd->add_option("--out", f.out, "Output directory (run.output)");
    cmd->add_flag("--override-boundary-guard", f.override_guard,
                  "Allow grids narrower than 10 sqrt(t_end)");
    cmd->add_option("--format", f.format, "Report format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
}

int run(kpzlab::ExperimentKind kind, const CommonFlags& f)
{
    std::map<std::string, std::string> overrides;
    if (f.seed) overrides["run.seed"] = std::to_string(*f.seed);
    if (f.replicas) overrides["run.replicas"] = std::to_string(*f.replicas);
    if (f.threads) overrides["run.threads"] = std::to_string(*f.threads);
    if (f.out) overrides["run.output"] = *f.out;
    if (f.override_guard) overrides["grid.override_boundary_guard"] = "true";

    const auto config = f.config.empty() ? kpzlab::parse_config("", kind, overrides)
                                         : kpzlab::load_config(f.config, kind, overrides);
    const auto manifest = kpzlab::run_experiment(config);
    const auto format = f.format == "csv" ? kpzlab::ReportFormat::Csv : kpzlab::ReportFormat::TextTable;
    const std::string report = kpzlab::emit_report(manifest, format);
    std::cout << kpzlab::render_report(manifest, kpzlab::ReportFormat::TextTable);
    std::cout << fmt::format("wrote {} outputs, manifest and {} to {}\n", manifest.outputs.size(), report,
                             manifest.out_dir);
    if (!manifest.complete) {
        for (const auto& fail : manifest.failures) {
            std::cerr << fmt::format("replica {} failed: {}\n", fail.replica, fail.message);
        }
        return 2;
    }
    if (kind == kpzlab::ExperimentKind::Verify) {
        for (const auto& row : manifest.rows) {
            if (row.pass && !*row.pass) return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kpzlab: KPZ / stochastic heat equation temporal-process experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* simulate = app.add_subcommand("simulate", "Simulate the stochastic heat equation");
    auto* fbm = app.add_subcommand("fbm", "Sample fractional Brownian motion paths");
    auto* stats = app.add_subcommand("stats", "Path statistics of a paths CSV (stats.input)");
    auto* verify = app.add_subcommand("verify", "Run acceptance criteria (verify.criteria)");
    for (auto* cmd : {simulate, fbm, stats, verify}) add_common(cmd, flags);

    std::string manifest_path;
    std::string report_format = "text";
    auto* report = app.add_subcommand("report", "Re-emit the report of a finished run");
    report->add_option("manifest", manifest_path, "Path to manifest.json")->required();
    report->add_option("--format", report_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return run(kpzlab::ExperimentKind::SimulateShe, flags);
        if (*fbm) return run(kpzlab::ExperimentKind::SimulateFbm, flags);
        if (*stats) return run(kpzlab::ExperimentKind::Stats, flags);
        if (*verify) return run(kpzlab::ExperimentKind::Verify, flags);
        if (*report) {
            const auto m = kpzlab::load_manifest(manifest_path);
            const auto fmt_kind = report_format == "csv" ? kpzlab::ReportFormat::Csv
                                                         : kpzlab::ReportFormat::TextTable;
            std::cout << kpzlab::render_report(m, fmt_kind);
            return 0;
        }
    } catch (const kpzlab::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
