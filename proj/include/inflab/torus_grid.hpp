#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <memory>
#include <numbers>

namespace inflab {

using Point = std::array<double, 3>;

/// Uniform grid on the flat torus [0, 2π)^dim with N points per axis.
///
/// Physical samples are stored row-major (axis 0 slowest). Spectral
/// coefficients use the real-to-complex half layout: the last axis keeps
/// only the non-negative frequencies 0..N/2.
class TorusGrid {
public:
    static constexpr double side_length = 2.0 * std::numbers::pi;

    TorusGrid(int dim, int points_per_axis);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double spacing() const { return side_length / n_; }
    double cell_volume() const { return std::pow(spacing(), dim_); }
    double volume() const { return std::pow(side_length, dim_); }

    Eigen::Index physical_size() const { return physical_size_; }
    Eigen::Index spectral_size() const { return spectral_size_; }
    /// Number of stored entries along the last spectral axis (N/2 + 1).
    int half_axis() const { return n_ / 2 + 1; }

    /// Coordinates of the node with the given flat index (unused axes are 0).
    Point node(Eigen::Index flat) const;

    /// Signed frequency of a non-last axis index: i for i <= N/2, else i - N.
    int frequency(int index) const { return index <= n_ / 2 ? index : index - n_; }

    /// Integer wave vector of a spectral flat index (unused axes are 0).
    std::array<int, 3> wave_vector(Eigen::Index spectral_flat) const;

    /// Largest |k|^2 on the truncated lattice.
    int max_k_squared() const { return dim_ * (n_ / 2) * (n_ / 2); }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
        return a.dim_ == b.dim_ && a.n_ == b.n_;
    }

private:
    int dim_;
    int n_;
    Eigen::Index physical_size_;
    Eigen::Index spectral_size_;
};

/// Per-grid spectral bookkeeping shared by all fields on the same grid.
struct SpectralGeometry {
    /// |k|^2 for every stored spectral entry.
    Eigen::ArrayXi k_squared;
    /// Hermitian multiplicity of every stored entry (2 for interior last-axis modes, else 1).
    Eigen::ArrayXd weight;
};

/// Thread-safe cached geometry for a grid.
const SpectralGeometry& spectral_geometry(const TorusGrid& grid);

/// Minimum-image displacement x - c on a circle of length 2π, in [-π, π).
inline double periodic_offset(double x, double c) {
    constexpr double L = TorusGrid::side_length;
    double d = std::fmod(x - c, L);
    if (d < -L / 2) d += L;
    if (d >= L / 2) d -= L;
    return d;
}

/// Minimum-image Euclidean distance between two points of the torus.
double periodic_distance(const TorusGrid& grid, const Point& x, const Point& c);

} // namespace inflab
