#include "inflab/spectral_field.hpp"
#include "inflab/errors.hpp"
#include "inflab/fft.hpp"

#include <cstdlib>

namespace inflab {

SpectralField SpectralField::from_physical(const TorusGrid& grid, Eigen::ArrayXd samples) {
    if (samples.size() != grid.physical_size()) throw GridMismatch("sample count does not match grid");
    Eigen::ArrayXcd coeffs = fft_plan(grid).forward(samples);
    return SpectralField(grid, std::move(samples), std::move(coeffs));
}

SpectralField SpectralField::from_spectral(const TorusGrid& grid, const Eigen::ArrayXcd& coefficients) {
    if (coefficients.size() != grid.spectral_size())
        throw GridMismatch("coefficient count does not match grid");
    const auto& plan = fft_plan(grid);
    Eigen::ArrayXd samples = plan.inverse(coefficients);
    // Re-project so the stored coefficients are exactly those of a real field.
    Eigen::ArrayXcd projected = plan.forward(samples);
    return SpectralField(grid, std::move(samples), std::move(projected));
}

SpectralField SpectralField::from_hermitian(const TorusGrid& grid, Eigen::ArrayXcd coefficients) {
    if (coefficients.size() != grid.spectral_size())
        throw GridMismatch("coefficient count does not match grid");
    Eigen::ArrayXd samples = fft_plan(grid).inverse(coefficients);
    return SpectralField(grid, std::move(samples), std::move(coefficients));
}

SpectralField SpectralField::zero(const TorusGrid& grid) {
    return SpectralField(grid, Eigen::ArrayXd::Zero(grid.physical_size()),
                         Eigen::ArrayXcd::Zero(grid.spectral_size()));
}

std::complex<double> SpectralField::coefficient(const std::array<int, 3>& k_in) const {
    const int n = grid_.points_per_axis();
    const int d = grid_.dim();
    std::array<int, 3> k = k_in;
    for (int a = 0; a < d; ++a)
        if (std::abs(k[a]) > n / 2) return {0.0, 0.0};
    bool conjugate = false;
    if (k[d - 1] < 0) {
        for (int a = 0; a < d; ++a) k[a] = -k[a];
        conjugate = true;
    }
    Eigen::Index flat = 0;
    for (int a = 0; a < d - 1; ++a) flat = flat * n + (k[a] >= 0 ? k[a] : k[a] + n);
    flat = flat * grid_.half_axis() + k[d - 1];
    const auto c = spectral_[flat];
    return conjugate ? std::conj(c) : c;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    return SpectralField(a.grid_, a.physical_ + b.physical_, a.spectral_ + b.spectral_);
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    return SpectralField(a.grid_, a.physical_ - b.physical_, a.spectral_ - b.spectral_);
}

SpectralField operator*(double c, const SpectralField& a) {
    return SpectralField(a.grid_, c * a.physical_, c * a.spectral_);
}

SpectralField to_spectral(const TorusGrid& grid, Eigen::ArrayXd samples) {
    return SpectralField::from_physical(grid, std::move(samples));
}

} // namespace inflab
