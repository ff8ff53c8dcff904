#pragma once

#include "inflab/config.hpp"
#include "inflab/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace inflab {

/// Executes the experiment selected by config. Throws whatever the experiment throws.
ExperimentReport run_experiment(const RunConfig& config);

struct ManifestEntry {
    std::string path; ///< relative to the run directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunOutcome {
    std::filesystem::path directory;
    std::vector<ManifestEntry> files;
    /// SHA-256 of manifest.json itself.
    std::string manifest_hash;
    bool completed = false;
    bool passed = false;
    std::string error;
    ExperimentReport report;
};

/// --out flag, then config.output.directory, then INFLATION_LAB_OUT, then ./inflation_lab_out.
std::filesystem::path resolve_output_root(const RunConfig& config, const std::string& cli_out = "");

/// Runs the experiment and persists it under root/<experiment>:
///   config.yaml, <table>.csv, summary.json, plots/*.svg, manifest.json.
/// An experiment error still writes config, a FAILED marker and the manifest.
/// Wall-clock time is never written, so identical configs give identical bytes.
RunOutcome run(const RunConfig& config, const std::filesystem::path& root);

/// Persists an already computed report. Stale files from an earlier run are removed first.
RunOutcome write_results(const RunConfig& config, const ExperimentReport& report, const std::filesystem::path& dir);

/// Regenerates plots/*.svg from the stored CSV tables and rewrites the manifest.
RunOutcome rerender_report(const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// CSV with a header row and %.17g values.
std::string table_to_csv(const Table& table);
/// Throws ParseError on ragged rows or non-numeric cells.
Table table_from_csv(const std::string& text);

/// Axes and series for one chart.
struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    /// Optional reference curve drawn dashed over the same x.
    std::vector<double> reference;
    std::string reference_label;
    bool log_x = false;
    bool log_y = false;
};

/// Self-contained SVG line chart. Non-finite points (and non-positive ones on log axes) are skipped.
std::string render_svg(const ChartSpec& chart);

/// Charts for the main table of an experiment, one per measured column.
std::vector<std::pair<std::string, ChartSpec>> charts_for(const std::string& experiment, const Table& summary,
                                                          const std::map<std::string, double>& inputs);

} // namespace inflab
