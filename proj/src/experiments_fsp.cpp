#include "inflab/errors.hpp"
#include "inflab/experiments.hpp"
#include "inflab/jobs.hpp"
#include "inflab/profile.hpp"
#include "inflab/spectral_ops.hpp"

#include <chrono>
#include <cmath>

namespace inflab {

FspProblem standard_fsp_problem(int dim, std::uint64_t seed, double r0, double bump_amplitude) {
    if (!(r0 > 0.0) || r0 >= std::numbers::pi - 0.2)
        throw PreconditionViolated("FSP ball radius must lie in (0, pi - 0.2)");
    FspProblem p;
    p.center = kTorusCenter;
    p.r0 = r0;
    // Centered on the point antipodal to the ball center along axis 0.
    const Point far{0.0, kTorusCenter[1], kTorusCenter[2]};
    const double radius = std::numbers::pi - r0 - 0.1;
    p.data_a = [seed](const TorusGrid& grid) { return band_limited_pair(grid, seed, 2, 0.3); };
    p.data_b = [seed, far, radius, bump_amplitude](const TorusGrid& grid) {
        WaveState st = band_limited_pair(grid, seed, 2, 0.3);
        const SpectralField bump = SpectralField::sample(grid, [&](const Point& x) {
            return bump_amplitude * bump_profile(periodic_distance(grid, x, far) / radius);
        });
        Eigen::ArrayXd u = st.u.physical() + bump.physical();
        return WaveState{SpectralField::from_physical(grid, std::move(u)), st.ut, 0.0};
    };
    (void)dim;
    return p;
}

double fsp_discrepancy(const FspProblem& problem, const TorusGrid& grid, double T, const FspOptions& options) {
    if (!(T >= 0.0)) throw PreconditionViolated("FSP horizon must be >= 0");
    if (options.time_samples < 1) throw PreconditionViolated("time_samples must be >= 1");
    WaveState a = problem.data_a(grid);
    WaveState b = problem.data_b(grid);
    require_same_grid(a.u, b.u);

    Eigen::ArrayXd dist(grid.physical_size());
    for (Eigen::Index i = 0; i < dist.size(); ++i) dist[i] = periodic_distance(grid, grid.node(i), problem.center);

    const double scale = std::max({1.0, sup_norm(a.u), sup_norm(a.ut)});
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
        if (dist[i] > problem.r0) continue;
        const double du = std::abs(a.u.physical()[i] - b.u.physical()[i]);
        const double dut = std::abs(a.ut.physical()[i] - b.ut.physical()[i]);
        if (du > 1e-14 * scale || dut > 1e-14 * scale)
            throw PreconditionViolated("FSP data differ inside B(center, r0) at node " + std::to_string(i));
    }

    auto interior = [&](const WaveState& x, const WaveState& y, double t) {
        const double radius = 0.9 * (problem.r0 - t);
        double worst = 0.0;
        if (radius <= 0.0) return worst;
        const auto& ux = x.u.physical();
        const auto& uy = y.u.physical();
        for (Eigen::Index i = 0; i < dist.size(); ++i)
            if (dist[i] <= radius) worst = std::max(worst, std::abs(ux[i] - uy[i]));
        return worst;
    };

    double worst = interior(a, b, 0.0);
    const int k = T > 0.0 ? options.time_samples : 0;
    for (int i = 1; i <= k; ++i) {
        const double span = T / k;
        a = evolve(a, span, options.solver).state;
        b = evolve(b, span, options.solver).state;
        worst = std::max(worst, interior(a, b, span * i));
    }
    return worst;
}

ExperimentReport run_fsp_check(const FspProblem& problem, int dim, const std::vector<int>& grid_sizes, double T,
                               const FspOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (grid_sizes.empty()) throw PreconditionViolated("FSP check needs at least one grid size");
    for (std::size_t i = 1; i < grid_sizes.size(); ++i)
        if (grid_sizes[i] <= grid_sizes[i - 1]) throw PreconditionViolated("grid sizes must increase");

    const auto values = parallel_map<double>(grid_sizes.size(), options.jobs, [&](std::size_t i) {
        return fsp_discrepancy(problem, TorusGrid(dim, grid_sizes[i]), T, options);
    });

    ExperimentReport report;
    report.experiment = "fsp";
    report.inputs = {{"dim", double(dim)},
                     {"r0", problem.r0},
                     {"T", T},
                     {"sigma", options.solver.sigma},
                     {"dt", options.solver.dt},
                     {"dealias_padding", options.solver.dealias_padding},
                     {"tolerance", options.tolerance},
                     {"time_samples", double(options.time_samples)}};
    Table table({"N", "discrepancy", "shrink_per_doubling"});
    bool decay_ok = true;
    std::string decay_detail;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double shrink = 0.0;
        if (i > 0) {
            const double doublings = std::log2(double(grid_sizes[i]) / grid_sizes[i - 1]);
            const bool roundoff = values[i - 1] <= options.roundoff_floor && values[i] <= options.roundoff_floor;
            shrink = values[i] > 0.0 ? std::pow(values[i - 1] / values[i], 1.0 / doublings)
                                     : std::numeric_limits<double>::infinity();
            const bool ok = roundoff || shrink >= options.min_shrink;
            decay_ok = decay_ok && ok;
            decay_detail += std::to_string(grid_sizes[i - 1]) + "->" + std::to_string(grid_sizes[i]) + ": x" +
                            format_number(shrink) + (roundoff ? " (roundoff)" : "") + "; ";
            if (!std::isfinite(shrink)) shrink = 0.0;
        }
        table.add_row({double(grid_sizes[i]), values[i], shrink});
    }

    const bool applicable = T < problem.r0;
    if (!applicable) report.notes.push_back("T >= r0: outside the finite-speed hypothesis, report only");
    std::size_t judged = grid_sizes.size() - 1;
    for (std::size_t i = 0; i < grid_sizes.size(); ++i)
        if (grid_sizes[i] == options.working_n) judged = i;
    report.verdicts.push_back({"tolerance", "criterion-6", values[judged] < options.tolerance, applicable,
                               "N=" + std::to_string(grid_sizes[judged]) + " discrepancy " +
                                   format_number(values[judged]) + " (limit " + format_number(options.tolerance) +
                                   ")"});
    report.verdicts.push_back({"decay", "criterion-6", decay_ok, applicable && grid_sizes.size() >= 2,
                               decay_detail.empty() ? "single grid" : decay_detail});
    report.fitted["working_discrepancy"] = values[judged];
    report.tables["summary"] = std::move(table);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace inflab
