#pragma once

#include "inflab/spectral_field.hpp"

#include <functional>
#include <vector>

namespace inflab {

/// Time integration of ∂t²u - Δu + |u|^{2σ}u = 0 on the discrete torus.
///
/// Each substep of size h is the symmetric composition
///   L(h/2) · D(-h/2) · N(h) · D(-h/2) · L(h/2)
/// with L the exact linear wave propagator, N the exact pointwise flow of
/// y'' + |y|^{2σ}y = 0 and D the free drift u += τ·∂t u. The three generators
/// add up to the wave field, so the scheme is second order and time
/// symmetric. σ = 0 switches the nonlinearity off.
struct SolverConfig {
    double dt = 1e-3;
    double sigma = 1.0;
    /// Pointwise work runs on an even grid of at least padding·N points per axis; 1 disables padding.
    double dealias_padding = 1.5;
    /// Substeps keep h·‖u‖∞^σ at or below this value.
    double nonlinear_cfl = 0.1;
    /// ‖u‖∞ above this aborts the run; 0 selects 10³·max(1, ‖u(0)‖∞).
    double blowup_guard = 0.0;
    /// Observers run every this many outer steps (and always at both ends).
    int observe_every = 1;
};

struct EnergyReading {
    double time = 0.0;
    double total = 0.0;
    double kinetic = 0.0;
    double gradient = 0.0;
    double potential = 0.0;
};

using Observer = std::function<void(const WaveState&)>;

struct EvolveResult {
    WaveState state;
    long steps = 0;
    long substeps = 0;
    double max_sup_norm = 0.0;
};

/// Advances initial by T >= 0 on uniform outer steps T/ceil(T/dt).
/// Throws BlowupDetected past the guard and NonFinite on NaN/Inf.
EvolveResult evolve(const WaveState& initial, double T, const SolverConfig& config,
                    const std::vector<Observer>& observers = {});

/// Exact pointwise flow of y'' + |y|^{2σ}y = 0 over dt at every node.
WaveState nonlinear_pointwise_step(const WaveState& state, double dt, double sigma);

/// ½∫(∂t u)² + ½∫|∇u|² + ∫|u|^{2σ+2}/(2σ+2) over the torus; σ = 0 has no potential.
EnergyReading hamiltonian(const WaveState& state, double sigma);

/// n^{-2(1-s)}(‖∂t w‖² + ‖∇w‖²) + n^{-2(2-s)}(‖∂t w‖²_{H¹} + ‖∇w‖²_{H¹}) in coefficient ℓ².
double semiclassical_energy(const WaveState& w, double n, double s);

} // namespace inflab
