#include "inflab/spectral_ops.hpp"
#include "inflab/errors.hpp"

#include <cmath>

namespace inflab {

namespace {

// Tabulates a radial multiplier over every integer |k|² on the grid.
template <class F>
Eigen::ArrayXd radial_table(const TorusGrid& grid, F&& f) {
    Eigen::ArrayXd table(grid.max_k_squared() + 1);
    for (Eigen::Index q = 0; q < table.size(); ++q) table[q] = f(static_cast<int>(q));
    return table;
}

double weighted_sum(const SpectralField& field, const Eigen::ArrayXd& table) {
    const auto& geo = spectral_geometry(field.grid());
    const auto& c = field.spectral();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) acc += geo.weight[i] * table[geo.k_squared[i]] * std::norm(c[i]);
    return acc;
}

} // namespace

double radial_quadratic_form(const SpectralField& field, const std::function<double(int)>& multiplier) {
    return weighted_sum(field, radial_table(field.grid(), multiplier));
}

double sobolev_norm(const SpectralField& field, double s) {
    const auto table = radial_table(field.grid(), [s](int q) { return std::pow(1.0 + q, s); });
    return std::sqrt(weighted_sum(field, table));
}

double pair_norm(const WaveState& state, double s) {
    require_same_grid(state.u, state.ut);
    const double a = sobolev_norm(state.u, s);
    const double b = sobolev_norm(state.ut, s - 1.0);
    return std::sqrt(a * a + b * b);
}

SpectralField apply_radial_multiplier(const SpectralField& field, const std::function<double(int)>& multiplier) {
    const auto table = radial_table(field.grid(), multiplier);
    const auto& geo = spectral_geometry(field.grid());
    Eigen::ArrayXcd out = field.spectral();
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] *= table[geo.k_squared[i]];
    return SpectralField::from_hermitian(field.grid(), std::move(out));
}

double sup_norm(const SpectralField& field) { return field.physical().abs().maxCoeff(); }

SpectralField partial_derivative(const SpectralField& field, int axis) {
    const auto& grid = field.grid();
    if (axis < 0 || axis >= grid.dim()) throw PreconditionViolated("derivative axis out of range");
    const int nyquist = grid.points_per_axis() / 2;
    Eigen::ArrayXcd out = field.spectral();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const int k = grid.wave_vector(i)[axis];
        out[i] = (std::abs(k) == nyquist) ? std::complex<double>(0.0, 0.0)
                                          : std::complex<double>(0.0, k) * out[i];
    }
    return SpectralField::from_hermitian(grid, std::move(out));
}

double gradient_sup_norm(const SpectralField& field) {
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(field.grid().physical_size());
    for (int a = 0; a < field.grid().dim(); ++a) sq += partial_derivative(field, a).physical().square();
    return std::sqrt(sq.maxCoeff());
}

WaveState apply_linear_propagator(const WaveState& state, double t) {
    require_same_grid(state.u, state.ut);
    const auto& grid = state.grid();
    const auto& geo = spectral_geometry(grid);
    const Eigen::ArrayXd cos_t = radial_table(grid, [t](int q) { return std::cos(t * std::sqrt(double(q))); });
    const Eigen::ArrayXd sinc_t = radial_table(grid, [t](int q) {
        const double w = std::sqrt(double(q));
        return q == 0 ? t : std::sin(t * w) / w;
    });
    const Eigen::ArrayXd wsin_t = radial_table(grid, [t](int q) {
        const double w = std::sqrt(double(q));
        return w * std::sin(t * w);
    });
    const auto& u = state.u.spectral();
    const auto& ut = state.ut.spectral();
    Eigen::ArrayXcd u_new(u.size()), ut_new(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const int q = geo.k_squared[i];
        u_new[i] = cos_t[q] * u[i] + sinc_t[q] * ut[i];
        ut_new[i] = -wsin_t[q] * u[i] + cos_t[q] * ut[i];
    }
    return {SpectralField::from_hermitian(grid, std::move(u_new)), SpectralField::from_hermitian(grid, std::move(ut_new)),
            state.time + t};
}

double linear_energy(const WaveState& state) {
    return radial_quadratic_form(state.ut, [](int) { return 1.0; }) +
           radial_quadratic_form(state.u, [](int q) { return double(q); });
}

} // namespace inflab
