#pragma once

#include "inflab/torus_grid.hpp"

#include <Eigen/Core>

namespace inflab {

/// Real-to-complex transform pair for one grid size.
///
/// Forward output follows u_hat_k = N^{-d} sum_j u_j e^{-ik.x_j}, i.e. the
/// trapezoid discretization of (2π)^{-d} ∫ u e^{-ik.x} dx. Plans are created
/// once, cached, and executed through the new-array interface, so a plan may
/// be used from several threads at once.
class FftPlan {
public:
    FftPlan(int dim, int n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    Eigen::ArrayXcd forward(const Eigen::ArrayXd& physical) const;
    Eigen::ArrayXd inverse(const Eigen::ArrayXcd& spectral) const;

    /// In-place variants writing into preallocated storage.
    void forward(const Eigen::ArrayXd& physical, Eigen::ArrayXcd& spectral) const;
    void inverse(const Eigen::ArrayXcd& spectral, Eigen::ArrayXd& physical) const;

    Eigen::Index physical_size() const { return physical_size_; }
    Eigen::Index spectral_size() const { return spectral_size_; }

private:
    void* r2c_ = nullptr;
    void* c2r_ = nullptr;
    int dim_;
    int n_;
    Eigen::Index physical_size_;
    Eigen::Index spectral_size_;
};

/// Cached plan lookup; safe under concurrent calls.
const FftPlan& fft_plan(int dim, int n);
inline const FftPlan& fft_plan(const TorusGrid& grid) { return fft_plan(grid.dim(), grid.points_per_axis()); }

} // namespace inflab
