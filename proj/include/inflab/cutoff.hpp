#pragma once

#include "inflab/spectral_field.hpp"

namespace inflab {

/// Smooth step: 1 for x <= 0, 0 for x >= 1, C^∞ in between.
double smooth_step_down(double x);

/// χ(x): ≡ 1 on |x-center| <= sharpness·radius, ≡ 0 on |x-center| >= radius.
/// Throws UnresolvableScale unless radius exceeds two grid cells.
SpectralField cutoff_field(const TorusGrid& grid, const Point& center, double radius,
                           double sharpness = 2.0 / 3.0);

/// Pointwise product χ·u.
SpectralField restrict_to_ball(const SpectralField& field, const Point& center, double radius,
                               double sharpness = 2.0 / 3.0);
/// Pointwise product (1-χ)·u.
SpectralField restrict_outside_ball(const SpectralField& field, const Point& center, double radius,
                                    double sharpness = 2.0 / 3.0);

/// ‖χ·u‖_{H^s}.
double restrict_ball_norm(const SpectralField& field, const Point& center, double radius, double s,
                          double sharpness = 2.0 / 3.0);

} // namespace inflab
