#include "inflab/profile.hpp"
#include "inflab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace inflab {

namespace {

using OdeState = std::array<double, 2>;

// x^e for x >= 0, by multiplication when 2e is a small integer.
double power(double x, double e) {
    const double twice = 2.0 * e;
    if (twice == std::floor(twice) && twice >= 0.0 && twice <= 16.0) {
        const int k = static_cast<int>(twice);
        double r = (k & 1) ? std::sqrt(x) : 1.0;
        double base = x;
        for (int m = k / 2; m > 0; m >>= 1) {
            if (m & 1) r *= base;
            base *= base;
        }
        return r;
    }
    return std::pow(x, e);
}

double nonlinearity(double y, double sigma) { return power(std::abs(y), 2.0 * sigma) * y; }

// θ in [0, 2π) of the scaled phase-plane point (v, -c·dv); increases with the phase.
double phase_angle(double v, double dv, double c) {
    double theta = std::atan2(-c * dv, v);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    return theta;
}

struct ProfileRhs {
    double sigma;
    void operator()(const OdeState& y, OdeState& dy, double /*t*/) const {
        dy[0] = y[1];
        dy[1] = -nonlinearity(y[0], sigma);
    }
};

// Quintic Hermite basis on [0, 1].
struct Hermite5 {
    double h0, h1, h2, h3, h4, h5;
    explicit Hermite5(double u) {
        const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
        h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
        h3 = 0.5 * u3 - u4 + 0.5 * u5;
        h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    }
};

} // namespace

ProfileSolution::ProfileSolution(double sigma, double period, Eigen::ArrayXd values, Eigen::ArrayXd rates,
                                 double crossing_period)
    : sigma_(sigma), period_(period), crossing_period_(crossing_period),
      step_(period / static_cast<double>(values.size() - 1)), values_(std::move(values)),
      rates_(std::move(rates)) {
    if (values_.size() < 3 || rates_.size() != values_.size())
        throw PreconditionViolated("profile table needs matching value and rate columns");
    const Eigen::Index m = values_.size();
    accel_.resize(m);
    jerk_.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double w = power(std::abs(values_[j]), 2.0 * sigma_);
        accel_[j] = -w * values_[j];
        jerk_[j] = -(2.0 * sigma_ + 1.0) * w * rates_[j];
    }

    const double c = std::sqrt(sigma_ + 1.0);
    Eigen::ArrayXd theta(m);
    for (Eigen::Index j = 0; j < m; ++j) theta[j] = phase_angle(values_[j], rates_[j], c);
    theta[0] = 0.0;
    theta[m - 1] = 2.0 * std::numbers::pi;
    phase_lut_.resize(m);
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double target = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1);
        while (j + 2 < m && theta[j + 1] < target) ++j;
        const double span = theta[j + 1] - theta[j];
        const double frac = span > 0.0 ? std::clamp((target - theta[j]) / span, 0.0, 1.0) : 0.0;
        phase_lut_[i] = step_ * (static_cast<double>(j) + frac);
    }
}

std::pair<double, double> ProfileSolution::interpolate(double t) const {
    double tau = std::fmod(t, period_);
    if (tau < 0.0) tau += period_;
    const int m = samples_per_period();
    int j = static_cast<int>(tau / step_);
    if (j >= m) j = m - 1;
    const double u = tau / step_ - j;
    const Hermite5 b(u);

    const double y0 = values_[j], y1 = values_[j + 1];
    const double d0 = rates_[j], d1 = rates_[j + 1];
    const double s0 = accel_[j], s1 = accel_[j + 1];
    const double j0 = jerk_[j], j1 = jerk_[j + 1];
    const double h = step_, hh = h * h;

    const double v = y0 * b.h0 + h * d0 * b.h1 + hh * s0 * b.h2 + hh * s1 * b.h3 + h * d1 * b.h4 + y1 * b.h5;
    const double dv = d0 * b.h0 + h * s0 * b.h1 + hh * j0 * b.h2 + hh * j1 * b.h3 + h * s1 * b.h4 + d1 * b.h5;
    return {v, dv};
}

double ProfileSolution::value(double t) const { return interpolate(t).first; }
double ProfileSolution::rate(double t) const { return interpolate(t).second; }
std::pair<double, double> ProfileSolution::state(double t) const { return interpolate(t); }

double ProfileSolution::energy(double t) const {
    const auto [v, dv] = interpolate(t);
    const double p = 2.0 * sigma_ + 2.0;
    return 0.5 * dv * dv + std::pow(std::abs(v), p) / p;
}

double ProfileSolution::phase_of(double v, double dv) const {
    if (!std::isfinite(v) || !std::isfinite(dv)) throw NonFinite("phase of a non-finite state");
    const double quarter = period_ / 4.0;
    int q;
    if (dv <= 0.0) q = (v >= 0.0) ? 0 : 1;
    else q = (v <= 0.0) ? 2 : 3;
    double lo = q * quarter, hi = (q + 1) * quarter;

    // Solve on whichever coordinate has the larger slope; both are monotone per quadrant.
    const bool use_value = std::abs(v) < 0.7;
    const bool increasing = use_value ? (q >= 2) : (q == 1 || q == 2);
    const double target = use_value ? v : dv;

    const double pos = phase_angle(v, dv, std::sqrt(sigma_ + 1.0)) / (2.0 * std::numbers::pi) *
                       static_cast<double>(phase_lut_.size() - 1);
    const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), phase_lut_.size() - 2);
    const double guess = phase_lut_[i] + (pos - static_cast<double>(i)) * (phase_lut_[i + 1] - phase_lut_[i]);
    double phi = std::clamp(guess, lo, hi);

    for (int it = 0; it < 200; ++it) {
        const auto [y, dy] = interpolate(phi);
        const double g = (use_value ? y : dy) - target;
        const double slope = use_value ? dy : -nonlinearity(y, sigma_);
        if (g == 0.0) break;
        if ((g > 0.0) == increasing) hi = phi;
        else lo = phi;
        double next = (slope != 0.0) ? phi - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double delta = std::abs(next - phi);
        phi = next;
        if (delta <= 1e-15 * period_ || hi - lo <= 1e-15 * period_) break;
    }
    return phi;
}

std::pair<double, double> ProfileSolution::flow(double a, double b, double h) const {
    if (a == 0.0 && b == 0.0) return {0.0, 0.0};
    const double p = 2.0 * sigma_ + 2.0;
    const double scaled = 0.5 * p * b * b + power(std::abs(a), p); // p·E = A^p
    const double freq = std::pow(scaled, sigma_ / p);                // A^σ
    if (freq * std::abs(h) <= kSmallPhase) {
        auto f = [this](double y) { return -nonlinearity(y, sigma_); };
        const double k1y = b, k1v = f(a);
        const double k2y = b + 0.5 * h * k1v, k2v = f(a + 0.5 * h * k1y);
        const double k3y = b + 0.5 * h * k2v, k3v = f(a + 0.5 * h * k2y);
        const double k4y = b + h * k3v, k4v = f(a + h * k3y);
        return {a + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                b + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    }
    const double amp = std::pow(scaled, 1.0 / p);
    const double phi = phase_of(a / amp, b / (amp * freq));
    const auto [v, dv] = interpolate(phi + freq * h);
    return {amp * v, amp * freq * dv};
}

double profile_period(double sigma) {
    if (!(sigma > 0.0)) throw PreconditionViolated("profile period requires sigma > 0");
    const double p = 2.0 * sigma + 2.0;
    // v = 1 - w² removes the endpoint singularity.
    auto integrand = [p](double w) {
        if (w == 0.0) return 2.0 / std::sqrt(p);
        const double gap = -std::expm1(p * std::log1p(-w * w));
        return 2.0 * w / std::sqrt(gap);
    };
    double err = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-15, &err);
    return 4.0 * std::sqrt(sigma + 1.0) * integral;
}

ProfileSolution solve_profile_unchecked(double sigma, double tolerance, int samples_per_period) {
    namespace odeint = boost::numeric::odeint;
    if (!(sigma > 0.0)) throw PreconditionViolated("profile requires sigma > 0");
    if (!(tolerance > 0.0)) throw PreconditionViolated("profile tolerance must be positive");
    if (samples_per_period < 64) throw PreconditionViolated("profile table needs at least 64 samples per period");

    const double period = profile_period(sigma);
    const int m = samples_per_period;
    constexpr int periods_checked = 10;
    const double step = period / m;
    const double p = 2.0 * sigma + 2.0;

    std::vector<double> times(static_cast<size_t>(periods_checked) * m + 1);
    for (size_t j = 0; j < times.size(); ++j) times[j] = step * static_cast<double>(j);
    std::vector<OdeState> traj;
    traj.reserve(times.size());

    using Stepper = odeint::runge_kutta_fehlberg78<OdeState>;
    ProfileRhs rhs{sigma};
    OdeState y{1.0, 0.0};
    odeint::integrate_times(odeint::make_controlled<Stepper>(1e-15, 1e-15), rhs, y, times.begin(), times.end(),
                            step, [&](const OdeState& s, double) { traj.push_back(s); });

    double worst_energy = 0.0, worst_period = 0.0;
    for (size_t j = 0; j < traj.size(); ++j) {
        const double e = 0.5 * traj[j][1] * traj[j][1] + std::pow(std::abs(traj[j][0]), p) / p;
        worst_energy = std::max(worst_energy, std::abs(e - 1.0 / p));
        worst_period = std::max(worst_period, std::abs(traj[j][0] - traj[j % m][0]));
    }
    if (!(worst_energy <= tolerance))
        throw NonConvergence("profile energy drift " + std::to_string(worst_energy) + " exceeds tolerance");
    if (!(worst_period <= std::max(tolerance, 1e-8)))
        throw NonConvergence("profile is not periodic to tolerance: " + std::to_string(worst_period));

    // Period from the V' sign change (+ to -) closing the first cycle.
    size_t bracket = 0;
    for (size_t j = static_cast<size_t>(m / 2) + 1; j < traj.size(); ++j) {
        if (traj[j - 1][1] > 0.0 && traj[j][1] <= 0.0) {
            bracket = j;
            break;
        }
    }
    if (bracket == 0) throw NonConvergence("no V' sign change found within ten periods");
    Stepper single;
    double lo = 0.0, hi = step;
    for (int it = 0; it < 80 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        OdeState s = traj[bracket - 1];
        single.do_step(rhs, s, 0.0, mid);
        if (s[1] > 0.0) lo = mid;
        else hi = mid;
    }
    const double crossing = times[bracket - 1] + 0.5 * (lo + hi);

    Eigen::ArrayXd values(m + 1), rates(m + 1);
    for (int j = 0; j <= m; ++j) {
        values[j] = traj[j][0];
        rates[j] = traj[j][1];
    }
    return ProfileSolution(sigma, period, std::move(values), std::move(rates), crossing);
}

ProfileSolution solve_profile(double sigma, double tolerance, int samples_per_period) {
    if (!(sigma >= 0.5 && sigma <= 2.0))
        throw PreconditionViolated("profile exponent sigma must lie in [1/2, 2], got " + std::to_string(sigma));
    return solve_profile_unchecked(sigma, tolerance, samples_per_period);
}

const ProfileSolution& shared_profile(double sigma) {
    static std::mutex mutex;
    static std::map<double, std::unique_ptr<ProfileSolution>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[sigma];
    if (!slot) slot = std::make_unique<ProfileSolution>(solve_profile_unchecked(sigma));
    return *slot;
}

double bump_profile(double r) { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; }

double bump_profile_derivative(double r) {
    if (r >= 1.0) return 0.0;
    const double g = 1.0 - r * r;
    return bump_profile(r) * (-2.0 * r / (g * g));
}

SpectralField build_profile_data(double n, const ParameterSchedule& schedule, const TorusGrid& grid,
                                 const Point& center) {
    if (!(n >= 2.0)) throw PreconditionViolated("concentration index must be >= 2");
    if (std::abs(n - schedule.n) > 1e-12 * n)
        throw PreconditionViolated("schedule was built for a different concentration index");
    if (schedule.dim != grid.dim()) throw GridMismatch("schedule dimension differs from grid dimension");
    const double cells = (2.0 / n) / grid.spacing();
    if (cells < kMinCellsAcrossBump)
        throw UnresolvableScale("bump of scale 1/n = " + std::to_string(1.0 / n) + " spans " +
                                std::to_string(cells) + " grid cells across; need " +
                                std::to_string(kMinCellsAcrossBump));
    const double amp = schedule.amplitude();
    return SpectralField::sample(
        grid, [&](const Point& x) { return amp * bump_profile(n * periodic_distance(grid, x, center)); });
}

SpectralField evaluate_ode_profile(const SpectralField& v0, double t, const ProfileSolution& profile) {
    const double sigma = profile.sigma();
    Eigen::ArrayXd out = v0.physical().unaryExpr(
        [&](double a) { return a == 0.0 ? 0.0 : a * profile.value(t * std::pow(std::abs(a), sigma)); });
    return SpectralField::from_physical(v0.grid(), std::move(out));
}

WaveState evaluate_ode_profile_state(const SpectralField& v0, double t, const ProfileSolution& profile) {
    const double sigma = profile.sigma();
    const auto& a = v0.physical();
    Eigen::ArrayXd v(a.size()), dv(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            v[i] = dv[i] = 0.0;
            continue;
        }
        const double w = std::pow(std::abs(a[i]), sigma);
        const auto [y, dy] = profile.state(t * w);
        v[i] = a[i] * y;
        dv[i] = a[i] * w * dy;
    }
    return {SpectralField::from_physical(v0.grid(), std::move(v)),
            SpectralField::from_physical(v0.grid(), std::move(dv)), t};
}

} // namespace inflab
