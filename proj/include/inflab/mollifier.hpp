#pragma once

#include "inflab/spectral_field.hpp"

namespace inflab {

/// ρ_ε(x) = ε^{-d} ρ(x/ε) with ρ ∝ exp(-1/(1-|x/r|²)) on |x| < r and ∫ρ = 1.
struct MollifierSpec {
    double support_radius = 0.01;
    double epsilon = 1.0;
};

/// Base profile ρ(x) before normalization, as a function of |x| (zero outside r).
double mollifier_profile(double radius, double support_radius);

/// ρ̂(ξ)/ρ̂(0) for the d-dimensional radial bump, |ξ| = xi (continuous transform).
double mollifier_transform(int dim, double support_radius, double xi);

/// Convolution with ρ_ε realized as the Fourier multiplier ρ̂(εk).
/// Throws UnresolvableScale when ε <= 0 or the support r·ε reaches π.
SpectralField mollify(const SpectralField& field, const MollifierSpec& moll);
WaveState mollify(const WaveState& state, const MollifierSpec& moll);

/// max_k |1 - ρ̂(εk)| over the grid's lattice; 0 means mollification is invisible.
double mollifier_deviation(const TorusGrid& grid, const MollifierSpec& moll);

} // namespace inflab
