#pragma once

#include <map>
#include <string>
#include <vector>

namespace inflab {

/// Column-named numeric table; one row per sweep sample.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    Table() = default;
    explicit Table(std::vector<std::string> names) : columns(std::move(names)) {}

    /// Throws PreconditionViolated on a row of the wrong width.
    void add_row(std::vector<double> row);
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    bool empty() const { return rows.empty(); }
};

/// One pass/fail judgement. Not-applicable verdicts are reported but never fail a run.
struct Verdict {
    std::string name;
    std::string criterion;
    bool passed = false;
    bool applicable = true;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    /// Scalar inputs echoed for the record (regime, grid, solver, schedule constants).
    std::map<std::string, double> inputs;
    std::map<std::string, std::string> labels;
    /// The main table is "summary"; traces and per-k details go under other names.
    std::map<std::string, Table> tables;
    std::map<std::string, double> fitted;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
    long steps = 0;
    double wall_seconds = 0.0;

    bool passed() const;
    const Verdict* verdict(const std::string& name) const;
};

/// Shortest round-trip decimal (%.6g style for messages).
std::string format_number(double v);

/// Kendall rank correlation τ_b of y against its index order (ties count as neither).
double kendall_tau(const std::vector<double>& y);
/// Least-squares slope of log y against log x; all values must be positive.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// max|y| / min|y|; infinity when the minimum is zero.
double band_ratio(const std::vector<double>& y);

} // namespace inflab
