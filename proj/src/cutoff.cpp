#include "inflab/cutoff.hpp"
#include "inflab/errors.hpp"
#include "inflab/spectral_ops.hpp"

#include <cmath>
#include <numbers>

namespace inflab {

double smooth_step_down(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - x));
    const double b = std::exp(-1.0 / x);
    return a / (a + b);
}

SpectralField cutoff_field(const TorusGrid& grid, const Point& center, double radius, double sharpness) {
    if (!(radius > 2.0 * grid.spacing()))
        throw UnresolvableScale("cutoff radius " + std::to_string(radius) + " must exceed two grid cells (" +
                                std::to_string(2.0 * grid.spacing()) + ")");
    if (radius >= std::numbers::pi) throw UnresolvableScale("cutoff radius must be below π");
    if (!(sharpness > 0.0 && sharpness < 1.0)) throw PreconditionViolated("cutoff sharpness must lie in (0, 1)");
    const double inner = sharpness * radius;
    return SpectralField::sample(grid, [&](const Point& x) {
        const double r = periodic_distance(grid, x, center);
        return smooth_step_down((r - inner) / (radius - inner));
    });
}

SpectralField restrict_to_ball(const SpectralField& field, const Point& center, double radius, double sharpness) {
    const auto chi = cutoff_field(field.grid(), center, radius, sharpness);
    return SpectralField::from_physical(field.grid(), chi.physical() * field.physical());
}

SpectralField restrict_outside_ball(const SpectralField& field, const Point& center, double radius,
                                    double sharpness) {
    const auto chi = cutoff_field(field.grid(), center, radius, sharpness);
    return SpectralField::from_physical(field.grid(), (1.0 - chi.physical()) * field.physical());
}

double restrict_ball_norm(const SpectralField& field, const Point& center, double radius, double s,
                          double sharpness) {
    return sobolev_norm(restrict_to_ball(field, center, radius, sharpness), s);
}

} // namespace inflab
