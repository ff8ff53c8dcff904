#include "inflab/errors.hpp"
#include "inflab/profile.hpp"
#include "inflab/spectral_ops.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace inflab;
using std::numbers::pi;

namespace {

// T(σ) = 4√(σ+1)∫₀¹(1-v^{2σ+2})^{-1/2}dv = 4√(σ+1)·B(1/p, 1/2)/p with p = 2σ+2.
double beta_period(double sigma) {
    const double p = 2.0 * sigma + 2.0;
    return 4.0 * std::sqrt(sigma + 1.0) * std::beta(1.0 / p, 0.5) / p;
}

double ode_energy(double y, double dy, double sigma) {
    const double p = 2.0 * sigma + 2.0;
    return 0.5 * dy * dy + std::pow(std::abs(y), p) / p;
}

// Classical RK4 on y'' = -|y|^{2σ}y with m steps.
std::pair<double, double> rk4(double y, double v, double h, double sigma, int m) {
    auto acc = [&](double q) { return -std::pow(std::abs(q), 2 * sigma) * q; };
    const double k = h / m;
    for (int i = 0; i < m; ++i) {
        const double a1 = acc(y), b1 = v;
        const double a2 = acc(y + 0.5 * k * b1), b2 = v + 0.5 * k * a1;
        const double a3 = acc(y + 0.5 * k * b2), b3 = v + 0.5 * k * a2;
        const double a4 = acc(y + k * b3), b4 = v + k * a3;
        y += k / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        v += k / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    }
    return {y, v};
}

// Richardson extrapolation of two RK4 solutions (error ratio 16).
std::pair<double, double> reference_flow(double y, double v, double h, double sigma) {
    const auto c = rk4(y, v, h, sigma, 4000);
    const auto f = rk4(y, v, h, sigma, 8000);
    return {f.first + (f.first - c.first) / 15.0, f.second + (f.second - c.second) / 15.0};
}

} // namespace

TEST_CASE("period matches the Beta-function closed form") {
    for (double sigma : {0.5, 1.0, 1.5, 2.0}) {
        const auto& p = shared_profile(sigma);
        CHECK(p.period() == doctest::Approx(beta_period(sigma)).epsilon(1e-10));
        CHECK(p.crossing_period() == doctest::Approx(beta_period(sigma)).epsilon(1e-10));
        CHECK(profile_period(sigma) == doctest::Approx(beta_period(sigma)).epsilon(1e-12));
    }
    CHECK(profile_period(1.0) == doctest::Approx(7.4163).epsilon(1e-5));
}

TEST_CASE("tabulated profile conserves energy over ten periods") {
    for (double sigma : {0.5, 1.0, 1.5, 2.0}) {
        const auto& p = shared_profile(sigma);
        const double e0 = 1.0 / (2.0 * sigma + 2.0);
        double worst = 0.0;
        for (int i = 0; i <= 5000; ++i) {
            const double t = 10.0 * p.period() * i / 5000.0 + 1e-3 * std::sin(i);
            worst = std::max(worst, std::abs(p.energy(t) - e0));
        }
        CHECK(worst < 1e-10);
        CHECK(p.value(0.0) == doctest::Approx(1.0));
        CHECK(p.rate(0.0) == doctest::Approx(0.0));
        CHECK(p.value(p.period() / 2) == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(p.value(p.period() / 4) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    }
}

TEST_CASE("profile solve rejects sigma outside the supported range") {
    CHECK_THROWS_AS(solve_profile(0.4), PreconditionViolated);
    CHECK_THROWS_AS(solve_profile(2.5), PreconditionViolated);
}

TEST_CASE("phase inversion recovers the phase") {
    const auto& p = shared_profile(1.0);
    for (double t : {0.0, 0.3, 2.0, 3.9, 5.5, 7.3}) {
        const auto [v, dv] = p.state(t);
        CHECK(p.phase_of(v, dv) == doctest::Approx(t).epsilon(1e-9));
    }
}

TEST_CASE("pointwise flow matches a Richardson-extrapolated RK4 reference") {
    for (double sigma : {0.5, 1.0, 2.0}) {
        const auto& p = shared_profile(sigma);
        struct Case { double y, v, h; };
        for (const Case c : {Case{1.0, 0.0, 0.5}, Case{-3.0, 2.0, 0.2}, Case{0.2, -0.1, 1.5}, Case{5.0, 0.0, 0.01},
                             Case{1e-3, 0.0, 0.3}, Case{0.4, 0.3, 0.002}, Case{0.0, 0.0, 1.0}}) {
            const auto ref = reference_flow(c.y, c.v, c.h, sigma);
            const auto got = p.flow(c.y, c.v, c.h);
            const double scale = std::max({1.0, std::abs(c.y), std::abs(c.v)});
            CHECK(std::abs(got.first - ref.first) < 1e-9 * scale);
            CHECK(std::abs(got.second - ref.second) < 1e-9 * scale * scale);
            const double e0 = ode_energy(c.y, c.v, sigma);
            CHECK(std::abs(ode_energy(got.first, got.second, sigma) - e0) <= 1e-10 * std::max(e0, 1e-300) + 1e-300);
        }
    }
}

TEST_CASE("flow over negative time runs backwards") {
    const auto& p = shared_profile(1.0);
    const auto fwd = p.flow(0.7, -0.2, 0.9);
    const auto back = p.flow(fwd.first, fwd.second, -0.9);
    CHECK(back.first == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(back.second == doctest::Approx(-0.2).epsilon(1e-10));
}

TEST_CASE("bump profile is a smooth unit bump") {
    CHECK(bump_profile(0.0) == doctest::Approx(1.0));
    CHECK(bump_profile(1.0) == 0.0);
    CHECK(bump_profile(1.5) == 0.0);
    const double h = 1e-6;
    for (double r : {0.2, 0.5, 0.9})
        CHECK(bump_profile_derivative(r) ==
              doctest::Approx((bump_profile(r + h) - bump_profile(r - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("profile data is the scaled translated bump") {
    const TorusGrid g(3, 64);
    const RegimeParams r;
    const auto sched = make_schedule(8.0, r);
    const Point c{pi, pi, pi};
    const auto v0 = build_profile_data(8.0, sched, g, c);
    CHECK(sup_norm(v0) == doctest::Approx(sched.amplitude()).epsilon(1e-12));
    for (Eigen::Index i = 0; i < g.physical_size(); i += 97) {
        const double d = periodic_distance(g, g.node(i), c);
        CHECK(v0.physical()[i] == doctest::Approx(sched.amplitude() * bump_profile(8.0 * d)));
    }
    CHECK_THROWS_AS(build_profile_data(16.0, make_schedule(16.0, r), TorusGrid(3, 32), c), UnresolvableScale);
    CHECK_THROWS_AS(build_profile_data(8.0, make_schedule(16.0, r), g, c), PreconditionViolated);
    CHECK_THROWS_AS(build_profile_data(8.0, make_schedule(8.0, r, 0.01, 1), g, c), GridMismatch);
}

TEST_CASE("ODE profile evaluation is pointwise a V(t|a|^sigma)") {
    const TorusGrid g(1, 64);
    const auto& p = shared_profile(1.0);
    const auto v0 = SpectralField::sample(g, [](const Point& x) { return std::sin(x[0]) * 2.0; });
    const auto same = evaluate_ode_profile(v0, 0.0, p);
    CHECK((same.physical() - v0.physical()).abs().maxCoeff() < 1e-14);
    const double t = 0.37;
    const auto vt = evaluate_ode_profile_state(v0, t, p);
    for (Eigen::Index i = 0; i < g.physical_size(); ++i) {
        const double a = v0.physical()[i];
        CHECK(vt.u.physical()[i] == doctest::Approx(a * p.value(t * std::abs(a))).epsilon(1e-12));
        CHECK(vt.ut.physical()[i] == doctest::Approx(a * std::abs(a) * p.rate(t * std::abs(a))).epsilon(1e-12));
    }
}

TEST_CASE("non-finite states are rejected instead of indexing the phase table") {
    const auto& p = shared_profile(1.0);
    CHECK_THROWS_AS(p.phase_of(std::nan(""), 0.0), NonFinite);
    CHECK_THROWS_AS(p.flow(std::nan(""), 1.0, 1.0), NonFinite);
}
