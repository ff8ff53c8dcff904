#pragma once

#include "inflab/regime.hpp"
#include "inflab/spectral_field.hpp"

#include <Eigen/Core>

#include <utility>

namespace inflab {

/// Tabulated periodic solution of V'' + |V|^{2σ} V = 0, V(0) = 1, V'(0) = 0.
///
/// One period is stored on a uniform table of (V, V'); off-node values use
/// quintic Hermite interpolation with V'' and V''' taken from the ODE itself.
/// Arguments are reduced modulo the period, so evaluation at large phases
/// costs the same as at small ones.
class ProfileSolution {
public:
    ProfileSolution(double sigma, double period, Eigen::ArrayXd values, Eigen::ArrayXd rates,
                    double crossing_period);

    double sigma() const { return sigma_; }
    double period() const { return period_; }
    /// Period located by bisection on the sign change of V' along the integrated trajectory.
    double crossing_period() const { return crossing_period_; }
    int samples_per_period() const { return static_cast<int>(values_.size()) - 1; }
    const Eigen::ArrayXd& table_values() const { return values_; }
    const Eigen::ArrayXd& table_rates() const { return rates_; }

    double value(double t) const;
    double rate(double t) const;
    std::pair<double, double> state(double t) const;
    /// ½V'² + |V|^{2σ+2}/(2σ+2); equals 1/(2σ+2) along the exact solution.
    double energy(double t) const;

    /// Phase φ in [0, T) where (V(φ), V'(φ)) = (v, dv); (v, dv) must lie on the unit energy curve.
    double phase_of(double v, double dv) const;

    /// Flow of y'' + |y|^{2σ} y = 0 over time h from (y, y') = (a, b). Exact through
    /// amplitude scaling and phase inversion; one RK4 step when the phase advance
    /// A^σ h (A the amplitude) is at most kSmallPhase (energy error below 1e-12 relative).
    std::pair<double, double> flow(double a, double b, double h) const;
    static constexpr double kSmallPhase = 0.005;

private:
    std::pair<double, double> interpolate(double t) const;

    double sigma_;
    double period_;
    double crossing_period_;
    double step_;
    Eigen::ArrayXd values_;
    Eigen::ArrayXd rates_;
    Eigen::ArrayXd accel_;      ///< V'' at the nodes
    Eigen::ArrayXd jerk_;       ///< V''' at the nodes
    Eigen::ArrayXd phase_lut_;  ///< phase at uniformly spaced phase-plane angles in [0, 2π]
};

/// Integrates the profile ODE over one period and verifies energy drift and
/// periodicity over ten periods. Throws NonConvergence when the drift exceeds
/// tolerance and PreconditionViolated for σ outside [1/2, 2].
ProfileSolution solve_profile(double sigma, double tolerance = 1e-10, int samples_per_period = 8192);

/// Same as solve_profile without the σ window; used by the solver for any σ > 0.
ProfileSolution solve_profile_unchecked(double sigma, double tolerance = 1e-10, int samples_per_period = 8192);

/// Process-wide cached profile for σ (thread-safe).
const ProfileSolution& shared_profile(double sigma);

/// T(σ) = 4√(σ+1) ∫₀¹ (1 - v^{2σ+2})^{-1/2} dv by adaptive quadrature.
double profile_period(double sigma);

/// Radial bump φ(x) = exp(1 - 1/(1-|x|²)) on |x| < 1, zero outside; φ(0) = 1.
double bump_profile(double r);
/// dφ/dr.
double bump_profile_derivative(double r);

/// vₙ(0, x) = κₙ n^{d/2-s} φ(n|x - center|). Throws UnresolvableScale when
/// the support diameter 2/n spans fewer than two grid cells.
SpectralField build_profile_data(double n, const ParameterSchedule& schedule, const TorusGrid& grid,
                                 const Point& center);

/// Smallest admissible bump diameter, in grid cells.
inline constexpr double kMinCellsAcrossBump = 2.0;

/// Pointwise a·V(t|a|^σ) with a = v0(x).
SpectralField evaluate_ode_profile(const SpectralField& v0, double t, const ProfileSolution& profile);

/// (v(t), ∂t v(t)) of the pointwise profile evolution, ∂t v = a|a|^σ V'(t|a|^σ).
WaveState evaluate_ode_profile_state(const SpectralField& v0, double t, const ProfileSolution& profile);

} // namespace inflab
