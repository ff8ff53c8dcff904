#include "inflab/errors.hpp"
#include "inflab/regime.hpp"

#include <doctest.h>

#include <cmath>

using namespace inflab;

TEST_CASE("schedule agrees with an extended-precision evaluation of its definition") {
    const RegimeParams r{0.3, 1.0, 0.05, 0.5, 0.05};
    for (double n : {4.0, 16.0, 1000.0, 1e8}) {
        const auto p = make_schedule(n, r);
        const long double L = std::log((long double)n);
        const long double e = 1.5L - 0.3L;
        const long double kappa = std::pow(L, -0.05L);
        const long double t = std::pow(std::pow(L, 0.5L) * std::pow((long double)n, -e), 1.0L);
        const long double lambda = std::pow(kappa * std::pow((long double)n, e), 1.0L);
        CHECK(p.kappa == doctest::Approx(double(kappa)).epsilon(1e-14));
        CHECK(p.t == doctest::Approx(double(t)).epsilon(1e-13));
        CHECK(p.lambda == doctest::Approx(double(lambda)).epsilon(1e-13));
        CHECK(p.eps == doctest::Approx(0.01 / n));
        // λt = (log n)^{σ(δ₂-δ₁)}
        CHECK(p.phase() == doctest::Approx(std::pow(double(L), 0.45)).epsilon(1e-12));
        // amplitude^σ = λ
        CHECK(std::pow(p.amplitude(), 1.0) == doctest::Approx(p.lambda).epsilon(1e-13));
    }
}

TEST_CASE("schedule for sigma two and lower dimension") {
    const RegimeParams r{0.5, 2.0, 0.1, 0.6, 0.05};
    const auto p = make_schedule(20.0, r, 0.25, 1);
    const double L = std::log(20.0), e = 0.5 - 0.5;
    CHECK(p.concentration_exponent() == doctest::Approx(e));
    CHECK(p.lambda == doctest::Approx(std::pow(std::pow(L, -0.1) * std::pow(20.0, e), 2.0)));
    CHECK(std::pow(p.amplitude(), 2.0) == doctest::Approx(p.lambda));
    CHECK(p.eps == doctest::Approx(0.25 / 20.0));
}

TEST_CASE("schedule rejects small indices and disordered exponents") {
    RegimeParams r;
    CHECK_THROWS_AS(make_schedule(2.5, r), InvalidIndex);
    r.delta1 = 0.6;
    CHECK_THROWS_AS(make_schedule(8.0, r), InvalidDeltas);
    r.delta1 = 0.0;
    CHECK_THROWS_AS(make_schedule(8.0, r), InvalidDeltas);
}

TEST_CASE("regime window") {
    const auto ok = validate_regime(0.3, 1.0);
    CHECK(ok.valid);
    CHECK(ok.s_c == doctest::Approx(0.5));
    CHECK(ok.lower == doctest::Approx(0.0));
    // σ = 0.6: upper end 3/2 - 1/0.6 < 0 leaves nothing.
    const auto empty = validate_regime(0.1, 0.6);
    CHECK_FALSE(empty.valid);
    CHECK_FALSE(empty.reasons.empty());
    CHECK_FALSE(validate_regime(0.5, 1.0).valid);
    CHECK_FALSE(validate_regime(0.3, 2.5).valid);
    // σ = 2: window (3/2 - 2/3, 1).
    CHECK(validate_regime(0.9, 2.0).valid);
    CHECK_FALSE(validate_regime(0.8, 2.0).valid);
}

TEST_CASE("inflation exponents and perturbation window") {
    const auto d = validate_inflation_deltas(0.3, 1.0, 0.05, 0.5);
    CHECK(d.valid);
    CHECK(d.margin == doctest::Approx(0.3 * 0.45 - 0.05));
    CHECK_FALSE(validate_inflation_deltas(0.1, 1.0, 0.2, 0.5).valid);
    CHECK(theta_upper_bound(0.3, 1.0) == doctest::Approx(0.1));
    CHECK(validate_theta(0.3, 1.0, 0.05));
    CHECK_FALSE(validate_theta(0.3, 1.0, 0.1));
    CHECK_FALSE(validate_theta(0.3, 1.0, 0.0));
}
