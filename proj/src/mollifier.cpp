#include "inflab/mollifier.hpp"
#include "inflab/errors.hpp"
#include "inflab/spectral_ops.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace inflab {

namespace {

double bump(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0; }

// Radial kernel of the d-dimensional Fourier transform, normalized to 1 at z = 0.
double radial_kernel(int dim, double z) {
    switch (dim) {
    case 1: return std::cos(z);
    case 2: return std::cyl_bessel_j(0.0, z);
    default: return std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    }
}

double radial_moment(int dim, double z) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const int panels = 8 + static_cast<int>(std::ceil(std::abs(z) / 3.0));
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = double(p) / panels;
        const double b = double(p + 1) / panels;
        acc += Rule::integrate(
            [&](double q) { return bump(q) * radial_kernel(dim, z * q) * std::pow(q, dim - 1); }, a, b);
    }
    return acc;
}

void check_scale(const MollifierSpec& moll) {
    if (!(moll.epsilon > 0.0) || !(moll.support_radius > 0.0))
        throw UnresolvableScale("mollifier scale and support radius must be positive");
    if (moll.support_radius * moll.epsilon >= std::numbers::pi)
        throw UnresolvableScale("mollifier support r*eps = " +
                                std::to_string(moll.support_radius * moll.epsilon) +
                                " does not fit inside the torus cell");
}

} // namespace

double mollifier_profile(double radius, double support_radius) { return bump(radius / support_radius); }

double mollifier_transform(int dim, double support_radius, double xi) {
    static const double norm[4] = {0.0, radial_moment(1, 0.0), radial_moment(2, 0.0), radial_moment(3, 0.0)};
    return radial_moment(dim, xi * support_radius) / norm[dim];
}

SpectralField mollify(const SpectralField& field, const MollifierSpec& moll) {
    check_scale(moll);
    const int dim = field.grid().dim();
    return apply_radial_multiplier(field, [&](int q) {
        return mollifier_transform(dim, moll.support_radius, moll.epsilon * std::sqrt(double(q)));
    });
}

WaveState mollify(const WaveState& state, const MollifierSpec& moll) {
    return {mollify(state.u, moll), mollify(state.ut, moll), state.time};
}

double mollifier_deviation(const TorusGrid& grid, const MollifierSpec& moll) {
    check_scale(moll);
    // The transform is monotone on the lattice range only for small arguments,
    // so scan every |k|².
    double worst = 0.0;
    for (int q = 0; q <= grid.max_k_squared(); ++q)
        worst = std::max(worst, std::abs(1.0 - mollifier_transform(grid.dim(), moll.support_radius,
                                                                   moll.epsilon * std::sqrt(double(q)))));
    return worst;
}

} // namespace inflab
