#include "inflab/errors.hpp"
#include "inflab/experiments.hpp"
#include "inflab/profile.hpp"
#include "inflab/spectral_ops.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace inflab;
using std::numbers::pi;

namespace {

// ∫_{[-1,1]^3} |∇ψ|²|ψ|^{2σ} dx by the midpoint rule, ψ(x) = φ(|x|).
double cartesian_coarea_w_one(double sigma, int m) {
    const double h = 2.0 / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double x = -1 + (i + 0.5) * h, y = -1 + (j + 0.5) * h, z = -1 + (k + 0.5) * h;
                const double r = std::sqrt(x * x + y * y + z * z);
                if (r >= 1.0) continue;
                const double d = bump_profile_derivative(r);
                acc += d * d * std::pow(bump_profile(r), 2 * sigma);
            }
    return std::sqrt(acc * h * h * h);
}

} // namespace

TEST_CASE("band-limited pair is seeded, bounded and independent of N") {
    const TorusGrid a(2, 16), b(2, 32);
    const auto pa = band_limited_pair(a, 5, 3, 0.5);
    const auto pb = band_limited_pair(b, 5, 3, 0.5);
    CHECK(sup_norm(pa.u) <= 0.5 + 1e-15);
    CHECK(sup_norm(pa.ut) <= 0.5 + 1e-15);
    // Same continuous field: node i of the coarse grid is node 2i of the fine one.
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) CHECK(pa.u.physical()[i * 16 + j] == doctest::Approx(pb.u.physical()[2 * i * 32 + 2 * j]));
    CHECK(std::abs(pa.u.coefficient({4, 0, 0})) < 1e-15); // outside the band up to FFT roundoff
    const auto again = band_limited_pair(a, 5, 3, 0.5);
    CHECK((again.u.physical() - pa.u.physical()).abs().maxCoeff() == 0.0);
    const auto other = band_limited_pair(a, 6, 3, 0.5);
    CHECK((other.u.physical() - pa.u.physical()).abs().maxCoeff() > 1e-3);
    CHECK_THROWS_AS(band_limited_pair(TorusGrid(1, 8), 1, 4, 0.5), UnresolvableScale);
}

TEST_CASE("report statistics") {
    CHECK(kendall_tau({1, 2, 3, 4}) == doctest::Approx(1.0));
    CHECK(kendall_tau({4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(kendall_tau({1, 1, 1}) == 0.0);
    CHECK(kendall_tau({3, 1, 2}) == doctest::Approx(-1.0 / 3.0));
    CHECK(loglog_slope({1, 10, 100}, {2, 20, 200}) == doctest::Approx(1.0));
    CHECK(loglog_slope({1, 2, 4}, {1, 0.25, 1.0 / 16}) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(loglog_slope({1, 2}, {0, 1}), PreconditionViolated);
    CHECK(band_ratio({2, 8, 4}) == doctest::Approx(4.0));
    CHECK(std::isinf(band_ratio({0, 1})));
    Table t({"a", "b"});
    CHECK_THROWS_AS(t.add_row({1.0}), PreconditionViolated);
    t.add_row({1.0, 2.0});
    CHECK(t.column("b") == std::vector<double>{2.0});
    CHECK_THROWS_AS(t.column("c"), PreconditionViolated);
}

TEST_CASE("co-area quantity for constant weights") {
    CoareaOptions o;
    const auto zero = run_coarea_check([](double) { return 0.0; }, "zero", 1.0, {10, 100, 1000}, o);
    for (double g : zero.tables.at("summary").column("g")) CHECK(g == 0.0);
    CHECK_FALSE(zero.verdict("min_positive")->passed);

    const auto one = run_coarea_check([](double) { return 1.0; }, "one", 1.0, {10, 100, 1000}, o);
    const auto g = one.tables.at("summary").column("g");
    CHECK(g[0] == doctest::Approx(g[2]).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(cartesian_coarea_w_one(1.0, 120)).epsilon(1e-6));
    CHECK(one.passed());
}

TEST_CASE("co-area quantity with the profile derivative does not decay") {
    const auto& p = shared_profile(1.0);
    const auto r = run_coarea_check([&p](double x) { return p.rate(x); }, "dV", 1.0, {100, 400, 1600}, {});
    CHECK(r.verdict("min_positive")->passed);
    CHECK(r.verdict("no_decay")->passed);
    CHECK(r.verdict("no_decay")->criterion == "criterion-4");
    CHECK_THROWS_AS(coarea_norm([](double) { return 1.0; }, 1.0, -1.0), PreconditionViolated);
    CoareaOptions tight;
    tight.max_panels = 8;
    CHECK_THROWS_AS(coarea_norm([&p](double x) { return p.rate(x); }, 1.0, 1e4, tight), UnresolvedOscillation);
}

TEST_CASE("profile bound check at zero horizon reduces to the initial data") {
    const TorusGrid g(1, 512);
    ProfileBoundOptions o;
    o.horizon_scale = 0.0;
    const RegimeParams r;
    const auto rep = run_profile_bound_check(r, {4, 8}, g, o);
    const auto& t = rep.tables.at("summary");
    REQUIRE(t.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const double n = t.rows[i][t.column_index("n")];
        const auto sched = make_schedule(n, r, o.moll.c_moll, 1);
        const auto v0 = mollify(build_profile_data(n, sched, g, kTorusCenter), o.moll.at(sched.eps));
        CHECK(t.rows[i][t.column_index("ratio1")] == doctest::Approx(sobolev_norm(v0, r.s) / sched.kappa).epsilon(1e-12));
        CHECK(t.rows[i][t.column_index("ratio3")] <= 1.0 + 1e-9);
    }
    for (const auto& v : rep.verdicts) CHECK(v.criterion == "criterion-3");
}

TEST_CASE("profile bound tables do not depend on the job count") {
    const TorusGrid g(1, 512);
    ProfileBoundOptions o;
    o.time_samples = 4;
    const auto a = run_profile_bound_check(RegimeParams{}, {4, 8, 16}, g, o);
    o.jobs = 3;
    const auto b = run_profile_bound_check(RegimeParams{}, {4, 8, 16}, g, o);
    CHECK(a.tables.at("summary").rows == b.tables.at("summary").rows);
    CHECK_THROWS_AS(run_profile_bound_check(RegimeParams{}, {200}, g, o), UnresolvableScale);
}

TEST_CASE("squared mollification variant") {
    const TorusGrid g(1, 4096);
    ProfileBoundOptions o;
    o.moll.c_moll = 0.25;
    o.eps_power = 2;
    RegimeParams r;
    r.sigma = 0.75;
    r.s = 0.1;
    CHECK_THROWS_AS(run_eps_squared_variant(r, {4}, g, o), PreconditionViolated);
    o.time_samples = 4;
    const auto rep = run_eps_squared_variant(RegimeParams{}, {4, 8}, g, o);
    CHECK(rep.tables.at("skipped").rows.size() == 1);
    CHECK(rep.verdict("ratio1_persists")->passed);
    // eps_power 1 is the plain check.
    o.eps_power = 1;
    const auto plain = run_eps_squared_variant(RegimeParams{}, {4}, g, o);
    const auto direct = run_profile_bound_check(RegimeParams{}, {4}, g, o);
    CHECK(plain.tables.at("summary").rows == direct.tables.at("summary").rows);
}

TEST_CASE("perturbation defect vanishes without data and stays small without the profile") {
    const TorusGrid g(1, 256);
    PerturbationOptions o;
    o.profile_amplitude = 0.0;
    o.time_samples = 4;
    const auto none = run_perturbation_check(RegimeParams{}, WaveState::zero(g), {4, 8}, o);
    for (double w : none.tables.at("summary").column("sup_w_h2")) CHECK(w == 0.0);

    const auto smooth = run_perturbation_check(RegimeParams{}, band_limited_pair(g, 7, 3, 0.5), {4, 8}, o);
    const auto t = smooth.tables.at("summary").column("t");
    const auto w = smooth.tables.at("summary").column("sup_w_h0");
    // Nonlinear correction of smooth data over time t is O(t·‖u‖³).
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] < t[i] * 0.2);
    CHECK(smooth.tables.at("trace").rows.size() == 2 * 5);

    RegimeParams bad;
    bad.theta = 0.2;
    CHECK_THROWS_AS(run_perturbation_check(bad, WaveState::zero(g), {4, 8}, o), PreconditionViolated);
    CHECK_THROWS_AS(run_perturbation_check(RegimeParams{}, WaveState::zero(g), {8, 4}, o), PreconditionViolated);
}

TEST_CASE("finite propagation check edge cases") {
    FspOptions o;
    o.time_samples = 4;
    const auto p = standard_fsp_problem(1);
    FspProblem same = p;
    same.data_b = p.data_a;
    CHECK(fsp_discrepancy(same, TorusGrid(1, 64), 0.5, o) < 1e-14);

    FspProblem inside = p;
    inside.data_b = [](const TorusGrid& g) { return band_limited_pair(g, 8, 2, 0.3); };
    CHECK_THROWS_AS(fsp_discrepancy(inside, TorusGrid(1, 64), 0.5, o), PreconditionViolated);

    const auto late = run_fsp_check(p, 1, {64, 128}, 1.2, o);
    for (const auto& v : late.verdicts) CHECK_FALSE(v.applicable);
    CHECK(late.passed());

    o.working_n = 256;
    const auto r = run_fsp_check(p, 1, {64, 128, 256}, 0.5, o);
    CHECK(r.verdict("tolerance")->passed);
    CHECK(r.verdict("decay")->passed);
    CHECK_THROWS_AS(standard_fsp_problem(1, 7, 3.0), PreconditionViolated);
}

TEST_CASE("pathological data geometry and additivity") {
    const TorusGrid g(1, 1024);
    const RegimeParams r;
    const PathologicalDataSpec spec{1, 3, 4.0};
    CHECK(spec.index(2) == 16.0);
    CHECK(spec.radius(2) == doctest::Approx(0.125));
    const auto data = build_pathological_data(spec, r, g);
    REQUIRE(data.bumps.size() == 3);
    double l2_sum = 0.0, hs_sum = 0.0;
    for (const auto& b : data.bumps) {
        CHECK(b.separation_margin > 0.0);
        CHECK(b.containment_margin >= 0.0);
        l2_sum += b.l2_norm * b.l2_norm;
        hs_sum += b.hs_norm;
    }
    const double l2 = sobolev_norm(data.field, 0.0);
    CHECK(l2 * l2 == doctest::Approx(l2_sum).epsilon(1e-12));
    CHECK(sobolev_norm(data.field, r.s) <= hs_sum + 1e-12);

    // Single bump equals the translated profile data.
    const auto single = build_pathological_data({2, 2, 4.0}, r, g);
    const auto direct = build_profile_data(16.0, make_schedule(16.0, r, 0.01, 1), g, spec.center(2));
    CHECK((single.field.physical() - direct.physical()).abs().maxCoeff() == 0.0);

    // Dropping the largest-k bump removes exactly its L² contribution.
    const auto head = build_pathological_data({1, 2, 4.0}, r, g);
    const double l2_head = sobolev_norm(head.field, 0.0);
    CHECK(l2 * l2 - l2_head * l2_head == doctest::Approx(std::pow(data.bumps[2].l2_norm, 2)).epsilon(1e-10));
}

TEST_CASE("pathological data rejects overlaps and unresolved bumps") {
    const RegimeParams r;
    // n0 = 1: n_1 = 2 is below the schedule minimum.
    CHECK_THROWS_AS(build_pathological_data({1, 2, 1.0}, r, TorusGrid(1, 1024)), InvalidIndex);
    // n0 = 1.6: bumps 1 and 2 of radius 1/3.2 and 1/6.4 at distance 1/2 overlap.
    CHECK_THROWS_AS(build_pathological_data({1, 2, 1.6}, r, TorusGrid(1, 1024)), OverlapDetected);
    CHECK_THROWS_AS(build_pathological_data({1, 3, 4.0}, r, TorusGrid(1, 128)), UnresolvableScale);
    CHECK_THROWS_AS(build_pathological_data({2, 1, 4.0}, r, TorusGrid(1, 1024)), PreconditionViolated);
}

TEST_CASE("predicted inflation rate") {
    const RegimeParams r;
    const double n = 1e6, L = std::log(n);
    CHECK(predicted_inflation_rate(n, r) == doctest::Approx(std::pow(std::log(L), -0.9) * std::pow(L, 0.3 * 0.45 - 0.05)));
    CHECK_THROWS_AS(predicted_inflation_rate(2.0, r), InvalidIndex);
}

TEST_CASE("inflation sweep on a one-dimensional desk grid") {
    const TorusGrid g(1, 1024);
    InflationOptions o;
    o.steps_per_horizon = 16;
    o.time_samples = 4;
    const auto rep = run_inflation_sweep(RegimeParams{}, WaveState::zero(g), {1, 2, 4.0}, g, o);
    const auto& t = rep.tables.at("summary");
    REQUIRE(t.rows.size() == 2);
    for (const auto& v : rep.verdicts) CHECK(v.criterion == "criterion-7");
    CHECK(rep.tables.at("bumps").rows.size() == 2);
    for (double v : t.column("sup_hs")) CHECK(v > 0.0);
    // One-dimensional horizons t_n are of order one, so the other bump is inside the cone.
    CHECK(t.rows[1][t.column_index("hypothesis_met")] == 0.0);

    // A single bump is its own single-bump run.
    const auto one = run_inflation_sweep(RegimeParams{}, WaveState::zero(g), {2, 2, 4.0}, g, o);
    const auto& t1 = one.tables.at("summary");
    CHECK(t1.rows[0][t1.column_index("hypothesis_met")] == 1.0);
    CHECK(t1.rows[0][t1.column_index("localization_error")] == 0.0);
    CHECK(t1.rows[0][t1.column_index("local_hs")] == t1.rows[0][t1.column_index("single_local_hs")]);

    RegimeParams weak;
    weak.delta1 = 0.2;
    CHECK_THROWS_AS(run_inflation_sweep(weak, WaveState::zero(g), {1, 2, 4.0}, g, o), InvalidDeltas);
}
