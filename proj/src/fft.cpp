#include "inflab/fft.hpp"
#include "inflab/errors.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace inflab {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

FftPlan::FftPlan(int dim, int n) : dim_(dim), n_(n) {
    TorusGrid grid(dim, n);
    physical_size_ = grid.physical_size();
    spectral_size_ = grid.spectral_size();

    int dims[3] = {n, n, n};
    double* real = fftw_alloc_real(static_cast<size_t>(physical_size_));
    fftw_complex* cplx = fftw_alloc_complex(static_cast<size_t>(spectral_size_));
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        r2c_ = fftw_plan_dft_r2c(dim, dims, real, cplx, flags);
        c2r_ = fftw_plan_dft_c2r(dim, dims, cplx, real, flags);
    }
    fftw_free(real);
    fftw_free(cplx);
    if (!r2c_ || !c2r_) throw Error("FFTW failed to create a plan");
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(r2c_));
    fftw_destroy_plan(static_cast<fftw_plan>(c2r_));
}

void FftPlan::forward(const Eigen::ArrayXd& physical, Eigen::ArrayXcd& spectral) const {
    if (physical.size() != physical_size_) throw GridMismatch("forward FFT: wrong input size");
    spectral.resize(spectral_size_);
    // r2c with FFTW_ESTIMATE does not modify its input.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(physical.data()),
                         reinterpret_cast<fftw_complex*>(spectral.data()));
    spectral /= static_cast<double>(physical_size_);
}

void FftPlan::inverse(const Eigen::ArrayXcd& spectral, Eigen::ArrayXd& physical) const {
    if (spectral.size() != spectral_size_) throw GridMismatch("inverse FFT: wrong input size");
    physical.resize(physical_size_);
    Eigen::ArrayXcd scratch = spectral; // c2r destroys its input
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(scratch.data()),
                         physical.data());
}

Eigen::ArrayXcd FftPlan::forward(const Eigen::ArrayXd& physical) const {
    Eigen::ArrayXcd out;
    forward(physical, out);
    return out;
}

Eigen::ArrayXd FftPlan::inverse(const Eigen::ArrayXcd& spectral) const {
    Eigen::ArrayXd out;
    inverse(spectral, out);
    return out;
}

const FftPlan& fft_plan(int dim, int n) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{dim, n}];
    if (!slot) slot = std::make_unique<FftPlan>(dim, n);
    return *slot;
}

} // namespace inflab
