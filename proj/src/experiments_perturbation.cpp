#include "inflab/errors.hpp"
#include "inflab/experiments.hpp"
#include "inflab/jobs.hpp"
#include "inflab/profile.hpp"
#include "inflab/spectral_ops.hpp"

#include <chrono>
#include <cmath>

namespace inflab {

namespace {

struct PerturbationRun {
    std::vector<double> summary;
    std::vector<std::vector<double>> trace;
    long steps = 0;
};

PerturbationRun perturbation_run(const RegimeParams& regime, const WaveState& smooth, double n,
                                 const PerturbationOptions& opt) {
    const TorusGrid& grid = smooth.grid();
    const auto sched = make_schedule(n, regime, opt.moll.c_moll, grid.dim());
    const MollifierSpec moll = opt.moll.at(sched.eps);
    const auto& profile = shared_profile(regime.sigma);

    const WaveState lin0 = mollify(smooth, moll);
    SpectralField v0 = SpectralField::zero(grid);
    if (opt.profile_amplitude != 0.0)
        v0 = mollify(opt.profile_amplitude * build_profile_data(n, sched, grid, kTorusCenter), moll);
    const WaveState data{lin0.u + v0, lin0.ut, 0.0};

    SolverConfig cfg = opt.solver;
    cfg.sigma = regime.sigma;
    cfg.dt = sched.t / opt.steps_per_horizon;
    cfg.observe_every = std::max(1, opt.steps_per_horizon / std::max(1, opt.time_samples));
    if (cfg.blowup_guard <= 0.0) cfg.blowup_guard = 1e3 * std::max(1.0, sched.amplitude()) + 1e3 * sup_norm(lin0.u);

    PerturbationRun run;
    double sup_w[4] = {0.0, 0.0, 0.0, 0.0};
    double max_e = 0.0;
    const double ks[4] = {0.0, 1.0, 2.0, regime.s};
    auto observer = [&](const WaveState& st) {
        const WaveState lin = apply_linear_propagator(lin0, st.time);
        const WaveState v = evaluate_ode_profile_state(v0, st.time, profile);
        const WaveState w{st.u - lin.u - v.u, st.ut - lin.ut - v.ut, st.time};
        std::vector<double> row{n, st.time};
        for (int i = 0; i < 4; ++i) {
            const double norm = sobolev_norm(w.u, ks[i]);
            sup_w[i] = std::max(sup_w[i], norm);
            row.push_back(norm);
        }
        const double e = semiclassical_energy(w, n, regime.s);
        max_e = std::max(max_e, e);
        row.push_back(e);
        run.trace.push_back(std::move(row));
    };
    const auto result = evolve(data, sched.t, cfg, {observer});
    run.steps = result.substeps;

    run.summary = {n, sched.t, sup_w[0], sup_w[1], sup_w[2], sup_w[3]};
    for (int i = 0; i < 4; ++i)
        run.summary.push_back(sup_w[i] * std::pow(n, regime.theta - (ks[i] - regime.s)));
    run.summary.push_back(max_e);
    return run;
}

} // namespace

ExperimentReport run_perturbation_check(const RegimeParams& regime, const WaveState& smooth,
                                        const std::vector<double>& n_list, const PerturbationOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (n_list.empty()) throw PreconditionViolated("perturbation check needs at least one n");
    if (options.steps_per_horizon < 1) throw PreconditionViolated("steps_per_horizon must be >= 1");
    require_same_grid(smooth.u, smooth.ut);
    if (!validate_theta(regime.s, regime.sigma, regime.theta))
        throw PreconditionViolated("theta=" + format_number(regime.theta) + " outside (0, " +
                                   format_number(theta_upper_bound(regime.s, regime.sigma)) + ")");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (!(n_list[i] > n_list[i - 1])) throw PreconditionViolated("n values must be strictly increasing");

    auto runs = parallel_map<PerturbationRun>(n_list.size(), options.jobs, [&](std::size_t i) {
        return perturbation_run(regime, smooth, n_list[i], options);
    });

    ExperimentReport report;
    report.experiment = "perturbation";
    const TorusGrid& grid = smooth.grid();
    report.inputs = {{"s", regime.s},
                     {"sigma", regime.sigma},
                     {"delta1", regime.delta1},
                     {"delta2", regime.delta2},
                     {"theta", regime.theta},
                     {"dim", double(grid.dim())},
                     {"N", double(grid.points_per_axis())},
                     {"c_moll", options.moll.c_moll},
                     {"support_radius", options.moll.support_radius},
                     {"steps_per_horizon", double(options.steps_per_horizon)},
                     {"dealias_padding", options.solver.dealias_padding},
                     {"profile_amplitude", options.profile_amplitude},
                     {"smooth_h1", pair_norm(smooth, 1.0)}};
    Table summary({"n", "t", "sup_w_h0", "sup_w_h1", "sup_w_h2", "sup_w_hs", "rescaled_h0", "rescaled_h1",
                   "rescaled_h2", "rescaled_hs", "max_semiclassical"});
    Table trace({"n", "time", "w_h0", "w_h1", "w_h2", "w_hs", "semiclassical"});
    for (auto& r : runs) {
        summary.add_row(r.summary);
        for (auto& row : r.trace) trace.add_row(std::move(row));
        report.steps += r.steps;
    }
    for (const char* c : {"rescaled_h0", "rescaled_h1", "rescaled_h2", "rescaled_hs"}) {
        const double tau = kendall_tau(summary.column(c));
        report.fitted[std::string("kendall_") + c] = tau;
        report.verdicts.push_back({std::string("trend_") + c, "criterion-5", tau <= 0.0, n_list.size() >= 2,
                                   "Kendall tau " + format_number(tau) + " (must be <= 0)"});
    }
    report.tables["summary"] = std::move(summary);
    report.tables["trace"] = std::move(trace);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace inflab
