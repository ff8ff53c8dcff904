#pragma once

#include "inflab/torus_grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <utility>

namespace inflab {

/// A real field on the discrete torus, held simultaneously as physical
/// samples and as Fourier coefficients (half layout, see TorusGrid).
///
/// Fields are immutable values; every operation returns a new field. The two
/// representations are kept consistent by the factories.
class SpectralField {
public:
    static SpectralField from_physical(const TorusGrid& grid, Eigen::ArrayXd samples);
    static SpectralField from_spectral(const TorusGrid& grid, const Eigen::ArrayXcd& coefficients);
    /// Trusts the coefficients to be those of a real field (e.g. a radial
    /// multiplier applied to a real field's spectrum); skips re-projection.
    static SpectralField from_hermitian(const TorusGrid& grid, Eigen::ArrayXcd coefficients);
    static SpectralField zero(const TorusGrid& grid);

    /// Samples f at every node.
    template <class F>
    static SpectralField sample(const TorusGrid& grid, F&& f) {
        Eigen::ArrayXd values(grid.physical_size());
        for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = f(grid.node(i));
        return from_physical(grid, std::move(values));
    }

    const TorusGrid& grid() const { return grid_; }
    const Eigen::ArrayXd& physical() const { return physical_; }
    const Eigen::ArrayXcd& spectral() const { return spectral_; }

    /// Coefficient at an integer wave vector (any sign); zero outside the lattice box.
    std::complex<double> coefficient(const std::array<int, 3>& k) const;

    friend SpectralField operator+(const SpectralField& a, const SpectralField& b);
    friend SpectralField operator-(const SpectralField& a, const SpectralField& b);
    friend SpectralField operator*(double c, const SpectralField& a);

private:
    SpectralField(const TorusGrid& grid, Eigen::ArrayXd physical, Eigen::ArrayXcd spectral)
        : grid_(grid), physical_(std::move(physical)), spectral_(std::move(spectral)) {}

    TorusGrid grid_;
    Eigen::ArrayXd physical_;
    Eigen::ArrayXcd spectral_;
};

/// Physical samples -> field with spectral side populated.
SpectralField to_spectral(const TorusGrid& grid, Eigen::ArrayXd samples);

/// Pair (u, ∂t u) at a time stamp; the evolving state of the wave solver.
struct WaveState {
    SpectralField u;
    SpectralField ut;
    double time = 0.0;

    static WaveState zero(const TorusGrid& grid) {
        return {SpectralField::zero(grid), SpectralField::zero(grid), 0.0};
    }
    const TorusGrid& grid() const { return u.grid(); }
};

/// Throws GridMismatch unless both fields live on the same grid.
void require_same_grid(const SpectralField& a, const SpectralField& b);

} // namespace inflab
