#include "inflab/torus_grid.hpp"
#include "inflab/errors.hpp"

#include <map>
#include <mutex>

namespace inflab {

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    if (dim < 1 || dim > 3)
        throw PreconditionViolated("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        throw PreconditionViolated("points per axis must be even and >= 8, got " +
                                   std::to_string(points_per_axis));
    physical_size_ = 1;
    for (int a = 0; a < dim; ++a) physical_size_ *= n_;
    spectral_size_ = physical_size_ / n_ * (n_ / 2 + 1);
}

Point TorusGrid::node(Eigen::Index flat) const {
    const double h = spacing();
    Point p{0.0, 0.0, 0.0};
    for (int a = dim_ - 1; a >= 0; --a) {
        p[a] = h * static_cast<double>(flat % n_);
        flat /= n_;
    }
    return p;
}

std::array<int, 3> TorusGrid::wave_vector(Eigen::Index flat) const {
    std::array<int, 3> k{0, 0, 0};
    const int h = half_axis();
    k[dim_ - 1] = static_cast<int>(flat % h);
    flat /= h;
    for (int a = dim_ - 2; a >= 0; --a) {
        k[a] = frequency(static_cast<int>(flat % n_));
        flat /= n_;
    }
    return k;
}

const SpectralGeometry& spectral_geometry(const TorusGrid& grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<SpectralGeometry>> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{grid.dim(), grid.points_per_axis()}];
    if (!slot) {
        auto geo = std::make_unique<SpectralGeometry>();
        const Eigen::Index m = grid.spectral_size();
        const int nyquist = grid.points_per_axis() / 2;
        geo->k_squared.resize(m);
        geo->weight.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto k = grid.wave_vector(i);
            geo->k_squared[i] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            const int last = k[grid.dim() - 1];
            geo->weight[i] = (last > 0 && last < nyquist) ? 2.0 : 1.0;
        }
        slot = std::move(geo);
    }
    return *slot;
}

double periodic_distance(const TorusGrid& grid, const Point& x, const Point& c) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        const double d = periodic_offset(x[a], c[a]);
        r2 += d * d;
    }
    return std::sqrt(r2);
}

} // namespace inflab
