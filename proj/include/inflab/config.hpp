#pragma once

#include "inflab/regime.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace inflab {

enum class ExperimentKind { ProfileCheck, CoareaCheck, PerturbationCheck, FspCheck, InflationSweep };

/// CLI spelling: profile-check, coarea-check, ...
std::string experiment_name(ExperimentKind kind);
/// Throws PreconditionViolated on an unknown name.
ExperimentKind experiment_from_name(const std::string& name);

struct GridBlock {
    int dim = 3;
    int n = 128;
    bool operator==(const GridBlock&) const = default;
};

struct SolverBlock {
    double dt = 1e-3;
    double dealias_padding = 1.5;
    double nonlinear_cfl = 0.1;
    /// 0 selects the per-experiment default.
    double blowup_guard = 0.0;
    int steps_per_horizon = 64;
    int time_samples = 16;
    bool operator==(const SolverBlock&) const = default;
};

struct MollifierBlock {
    double c_moll = 0.01;
    double support_radius = 0.01;
    bool operator==(const MollifierBlock&) const = default;
};

struct SweepBlock {
    std::vector<double> n_list{4.0, 8.0, 16.0};
    int k_min = 1;
    int k_max = 3;
    double n0 = 4.0;
    int eps_power = 1;
    double horizon_scale = 1.0;
    /// "shrinking" or "fixed".
    std::string eps_mode = "shrinking";
    double profile_amplitude = 1.0;
    bool operator==(const SweepBlock&) const = default;
};

/// Smooth background pair: "zero" or "band_limited" (seeded).
struct SmoothBlock {
    std::string kind = "zero";
    int kmax = 3;
    double amplitude = 0.5;
    bool operator==(const SmoothBlock&) const = default;
};

struct CoareaBlock {
    /// "dV" (profile derivative), "V", "one" or "zero".
    std::string weight = "dV";
    double lambda_min = 1e2;
    double lambda_max = 1e4;
    int lambda_count = 20;
    double rel_tol = 1e-9;
    bool operator==(const CoareaBlock&) const = default;
};

struct FspBlock {
    std::vector<int> grid_sizes{64, 128};
    double horizon = 0.5;
    double r0 = 1.0;
    double bump_amplitude = 0.2;
    double tolerance = 1e-6;
    int working_n = 128;
    bool operator==(const FspBlock&) const = default;
};

struct OutputBlock {
    /// Empty: fall back to INFLATION_LAB_OUT, then ./inflation_lab_out.
    std::string directory;
    bool csv = true;
    bool json = true;
    bool plots = true;
    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::ProfileCheck;
    std::uint64_t seed = 7;
    int jobs = 1;
    RegimeParams regime;
    GridBlock grid;
    SolverBlock solver;
    MollifierBlock mollifier;
    SweepBlock sweep;
    SmoothBlock smooth;
    CoareaBlock coarea;
    FspBlock fsp;
    OutputBlock output;

    bool operator==(const RunConfig&) const = default;
};

/// Parses YAML text. Syntax errors raise ParseError; unknown keys, type errors
/// and (with validate) constraint violations are collected and raised together
/// as ValidationError. validate = false lets callers apply overrides first.
RunConfig parse_config_text(const std::string& text, bool validate = true);
/// Reads and parses a file; a missing file is a ParseError at line 0.
RunConfig parse_config(const std::string& path, bool validate = true);

/// Every violated constraint; empty when the config can run.
std::vector<std::string> validation_errors(const RunConfig& config);
/// Throws ValidationError listing validation_errors(config).
void validate_config(const RunConfig& config);

/// Full YAML with every field, defaults included. With include_execution = false
/// the jobs count and output directory are left out, so the snapshot depends only
/// on what determines the results.
std::string serialize_config(const RunConfig& config, bool include_execution = true);

} // namespace inflab
