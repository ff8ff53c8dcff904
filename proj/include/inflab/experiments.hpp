#pragma once

#include "inflab/mollifier.hpp"
#include "inflab/regime.hpp"
#include "inflab/report.hpp"
#include "inflab/solver.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace inflab {

/// Mollification constants: ε = c_moll/n, base bump of radius support_radius.
struct MollifierOptions {
    double c_moll = 0.01;
    double support_radius = 0.01;

    MollifierSpec at(double eps) const { return {support_radius, eps}; }
};

/// Grid node at the middle of the torus; every experiment centers single bumps here.
inline constexpr Point kTorusCenter{std::numbers::pi, std::numbers::pi, std::numbers::pi};

/// Smooth, band-limited pair with all modes |k_i| <= kmax drawn from a seeded
/// generator. The draw is independent of N, so the same seed gives the same
/// continuous field on every grid that resolves kmax. Scaled so ‖u0‖∞, ‖u1‖∞ <= amplitude.
WaveState band_limited_pair(const TorusGrid& grid, std::uint64_t seed, int kmax = 3, double amplitude = 0.5);

// ---- Concentrated profile ratios ----------------------------------------

struct ProfileBoundOptions {
    MollifierOptions moll;
    /// t_end = horizon_scale·tₙ; 0 collapses the check to the initial data.
    double horizon_scale = 1.0;
    int time_samples = 16;
    /// ε = εₙ^eps_power.
    int eps_power = 1;
    int jobs = 1;
};

/// Columns: n, kappa, eps, t, lambda, phase, ratio1, ratio2_h0, ratio2_h1, ratio2_h2, ratio3, ratio4, hs_norm.
ExperimentReport run_profile_bound_check(const RegimeParams& regime, const std::vector<double>& n_list,
                                         const TorusGrid& grid, const ProfileBoundOptions& options = {});

/// The profile-bound check at ε = εₙ². Entries with ε·N/(2π) < 2 are skipped
/// and listed; σ < 1 is rejected. eps_power = 1 reproduces run_profile_bound_check.
ExperimentReport run_eps_squared_variant(const RegimeParams& regime, const std::vector<double>& n_list,
                                         const TorusGrid& grid, ProfileBoundOptions options = {});

// ---- Co-area lower bound ------------------------------------------------

struct CoareaOptions {
    int dim = 3;
    double rel_tol = 1e-9;
    /// Panel budget of the composite rule; exceeding it raises UnresolvedOscillation.
    long max_panels = 1L << 20;
    int jobs = 1;
};

/// ‖∇ψ |ψ|^σ W(λψ)‖_{L²(ℝ^d)} for the fixed bump ψ, by radial quadrature.
double coarea_norm(const std::function<double(double)>& W, double sigma, double lambda,
                   const CoareaOptions& options = {});

/// Columns: lambda, g, panels.
ExperimentReport run_coarea_check(const std::function<double(double)>& W, const std::string& w_name, double sigma,
                                  const std::vector<double>& lambda_list, const CoareaOptions& options = {});

// ---- Perturbation defect ------------------------------------------------

struct EvolutionOptions {
    MollifierOptions moll;
    /// dt, padding, cfl and guard; dt is replaced by tₙ/steps_per_horizon.
    SolverConfig solver;
    int steps_per_horizon = 64;
    int time_samples = 16;
    int jobs = 1;
};

struct PerturbationOptions : EvolutionOptions {
    /// Multiplies vₙ(0); 0 leaves only the smooth data.
    double profile_amplitude = 1.0;
};

/// Columns: n, t, sup_w_h0, sup_w_h1, sup_w_h2, sup_w_hs, rescaled_h0, rescaled_h1, rescaled_h2,
/// rescaled_hs, max_semiclassical. Table "trace": n, time, w_h0, w_h1, w_h2, w_hs, semiclassical.
ExperimentReport run_perturbation_check(const RegimeParams& regime, const WaveState& smooth,
                                        const std::vector<double>& n_list, const PerturbationOptions& options = {});

// ---- Finite propagation speed --------------------------------------------

struct FspProblem {
    std::function<WaveState(const TorusGrid&)> data_a;
    std::function<WaveState(const TorusGrid&)> data_b;
    Point center = kTorusCenter;
    double r0 = 1.0;
};

/// data_a: band-limited pair; data_b adds a wide bump whose support stays
/// outside B(center, r0) (and outside its periodic images).
FspProblem standard_fsp_problem(int dim, std::uint64_t seed = 7, double r0 = 1.0, double bump_amplitude = 0.2);

struct FspOptions {
    SolverConfig solver;
    int time_samples = 16;
    double tolerance = 1e-6;
    /// Grid size at which the absolute tolerance is judged.
    int working_n = 128;
    double min_shrink = 4.0;
    /// Discrepancies below this are roundoff; decay is not required between them.
    double roundoff_floor = 1e-13;
    int jobs = 1;
};

/// Max over sampled t ∈ [0, T] of sup over nodes in B(center, 0.9(r0 - t)) of |u_a - u_b|.
double fsp_discrepancy(const FspProblem& problem, const TorusGrid& grid, double T, const FspOptions& options);

/// Columns: N, discrepancy, shrink. T >= r0 yields only not-applicable verdicts.
ExperimentReport run_fsp_check(const FspProblem& problem, int dim, const std::vector<int>& grid_sizes, double T,
                               const FspOptions& options = {});

// ---- Pathological data and inflation sweep ------------------------------

struct PathologicalDataSpec {
    int k_min = 1;
    int k_max = 3;
    /// Desk schedule n_k = n0·2^k (the doubly exponential e^{e^k} is recorded symbolically only).
    double n0 = 4.0;

    double index(int k) const;
    Point center(int k) const { return {1.0 / k, 0.0, 0.0}; }
    double radius(int k) const { return 1.0 / (static_cast<double>(k) * k * k); }
};

struct BumpInfo {
    int k = 0;
    double n = 0.0;
    Point center{};
    double radius = 0.0;
    ParameterSchedule schedule;
    double hs_norm = 0.0;
    double l2_norm = 0.0;
    /// min over other bumps j of |z^k - z^j| - 1/n_k - 1/n_j.
    double separation_margin = 0.0;
    /// r_k - (1/n_k + r·ε_k): room left in B_k around the mollified support.
    double containment_margin = 0.0;
};

struct PathologicalData {
    SpectralField field;
    std::vector<BumpInfo> bumps;
};

/// v₀ = Σ_k v_{0,k}. Throws OverlapDetected when supports meet (analytically or
/// on the grid) or a mollified bump leaves its ball B_k; UnresolvableScale when
/// a bump is too small for the grid.
PathologicalData build_pathological_data(const PathologicalDataSpec& spec, const RegimeParams& regime,
                                         const TorusGrid& grid, const MollifierOptions& moll = {});

/// The single bump v_{0,k} described by info.
SpectralField bump_field(const BumpInfo& info, const TorusGrid& grid);

enum class EpsMode { Shrinking, Fixed };

struct InflationOptions : EvolutionOptions {
    /// Fixed uses ε_{n_{k_min}} for every k (the no-inflation control).
    EpsMode eps_mode = EpsMode::Shrinking;
    /// Localization agreement, relative to max(1, sup of the single-bump solution on the ball).
    double localization_tolerance = 1e-6;
    double triangle_slack = 0.05;
    double rate_band = 4.0;
};

/// Columns: k, n, eps, t, sup_hs, local_hs, single_local_hs, localization_error, profile_hs,
/// linear_hs, perturbation_hs, triangle_lhs, triangle_rhs, predicted, local_over_predicted,
/// hypothesis_met.
ExperimentReport run_inflation_sweep(const RegimeParams& regime, const WaveState& smooth,
                                     const PathologicalDataSpec& spec, const TorusGrid& grid,
                                     const InflationOptions& options = {});

/// (log log n)^{-3s} (log n)^{sσ(δ₂-δ₁)-δ₁}.
double predicted_inflation_rate(double n, const RegimeParams& regime);

} // namespace inflab
