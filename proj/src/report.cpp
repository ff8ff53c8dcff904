#include "inflab/report.hpp"
#include "inflab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace inflab {

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw PreconditionViolated("row has " + std::to_string(row.size()) + " entries, table has " +
                                   std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw PreconditionViolated("no column named " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

bool ExperimentReport::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.applicable || v.passed; });
}

const Verdict* ExperimentReport::verdict(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double kendall_tau(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    double concordant = 0.0, discordant = 0.0, ties = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (y[j] > y[i]) concordant += 1.0;
            else if (y[j] < y[i]) discordant += 1.0;
            else ties += 1.0;
        }
    const double pairs = 0.5 * static_cast<double>(n * (n - 1));
    const double denom = std::sqrt(pairs * (pairs - ties));
    return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionViolated("slope needs two or more matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionViolated("log-log slope needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double band_ratio(const std::vector<double>& y) {
    if (y.empty()) return 1.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : y) {
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

} // namespace inflab
