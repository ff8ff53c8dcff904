#pragma once

#include "inflab/spectral_field.hpp"

#include <functional>

namespace inflab {

/// (Σ_k (1+|k|²)^s |û_k|²)^{1/2}; s may be negative.
double sobolev_norm(const SpectralField& field, double s);

/// (‖u‖²_{H^s} + ‖∂t u‖²_{H^{s-1}})^{1/2}.
double pair_norm(const WaveState& state, double s);

/// Σ_k m(|k|²) |û_k|² for a radial multiplier given as a function of |k|².
double radial_quadratic_form(const SpectralField& field, const std::function<double(int)>& multiplier);

/// Applies a radial Fourier multiplier m(|k|²).
SpectralField apply_radial_multiplier(const SpectralField& field, const std::function<double(int)>& multiplier);

/// max_j |u(x_j)|
double sup_norm(const SpectralField& field);

/// ∂u/∂x_axis by spectral differentiation (Nyquist modes dropped).
SpectralField partial_derivative(const SpectralField& field, int axis);

/// max_j |∇u(x_j)| (Euclidean length of the spectral gradient).
double gradient_sup_norm(const SpectralField& field);

/// Exact linear wave propagator S(t): mode k rotates with ω = |k|; the zero
/// mode uses sin(tω)/ω -> t. The time stamp advances by t.
WaveState apply_linear_propagator(const WaveState& state, double t);

/// Σ_k (|∂t û_k|² + |k|²|û_k|²), conserved by apply_linear_propagator.
double linear_energy(const WaveState& state);

} // namespace inflab
