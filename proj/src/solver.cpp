#include "inflab/solver.hpp"
#include "inflab/errors.hpp"
#include "inflab/fft.hpp"
#include "inflab/profile.hpp"
#include "inflab/spectral_ops.hpp"

#include <cmath>
#include <map>

namespace inflab {

namespace {

bool is_235_smooth(int m) {
    for (int p : {2, 3, 5})
        while (m % p == 0) m /= p;
    return m == 1;
}

int padded_size(int n, double padding) {
    if (padding <= 1.0) return n;
    int m = static_cast<int>(std::ceil(padding * n - 1e-9));
    if (m % 2 != 0) ++m;
    while (!is_235_smooth(m)) m += 2;
    return m;
}

// Stored modes with every |k_a| below the smaller Nyquist, as (index in from, index in to).
std::vector<std::pair<Eigen::Index, Eigen::Index>> shared_modes(const TorusGrid& from, const TorusGrid& to) {
    const int cut = std::min(from.points_per_axis(), to.points_per_axis()) / 2;
    const int m = to.points_per_axis();
    const int d = from.dim();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> map;
    for (Eigen::Index i = 0; i < from.spectral_size(); ++i) {
        const auto k = from.wave_vector(i);
        bool keep = true;
        for (int a = 0; a < d; ++a) keep = keep && std::abs(k[a]) < cut;
        if (!keep) continue;
        Eigen::Index j = 0;
        for (int a = 0; a < d - 1; ++a) j = j * m + (k[a] >= 0 ? k[a] : k[a] + m);
        j = j * to.half_axis() + k[d - 1];
        map.emplace_back(i, j);
    }
    return map;
}

struct LinearTables {
    Eigen::ArrayXd cos_t, sinc_t, wsin_t;
};

class Stepper {
public:
    Stepper(const TorusGrid& grid, const SolverConfig& config)
        : grid_(grid), config_(config), geo_(spectral_geometry(grid)), plan_(fft_plan(grid)),
          work_grid_(grid.dim(), padded_size(grid.points_per_axis(), config.dealias_padding)),
          work_plan_(fft_plan(work_grid_)) {
        if (config.sigma > 0.0) profile_ = &shared_profile(config.sigma);
        if (!(work_grid_ == grid_)) modes_ = shared_modes(grid_, work_grid_);
    }

    void linear(Eigen::ArrayXcd& u, Eigen::ArrayXcd& ut, double tau) {
        const auto& tab = tables(tau);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const int q = geo_.k_squared[i];
            const std::complex<double> a = u[i], b = ut[i];
            u[i] = tab.cos_t[q] * a + tab.sinc_t[q] * b;
            ut[i] = -tab.wsin_t[q] * a + tab.cos_t[q] * b;
        }
    }

    // D(-h/2) N(h) D(-h/2) at every node; returns max |u| seen on the work grid.
    double pointwise(Eigen::ArrayXcd& u, Eigen::ArrayXcd& ut, double h) {
        Eigen::ArrayXd a = work_plan_.inverse(lift(u));
        Eigen::ArrayXd b = work_plan_.inverse(lift(ut));
        double peak = 0.0;
        bool finite = true;
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            double x = a[j] - 0.5 * h * b[j];
            auto [y, dy] = profile_->flow(x, b[j], h);
            y -= 0.5 * h * dy;
            a[j] = y;
            b[j] = dy;
            peak = std::max(peak, std::abs(y));
            finite = finite && std::isfinite(y) && std::isfinite(dy);
        }
        if (!finite) throw NonFinite("non-finite value in the nonlinear substep");
        drop(work_plan_.forward(a), u);
        drop(work_plan_.forward(b), ut);
        return peak;
    }

    WaveState snapshot(const Eigen::ArrayXcd& u, const Eigen::ArrayXcd& ut, double time) const {
        return {SpectralField::from_hermitian(grid_, u), SpectralField::from_hermitian(grid_, ut), time};
    }

    double sup(const Eigen::ArrayXcd& u) const { return plan_.inverse(u).abs().maxCoeff(); }

private:
    const LinearTables& tables(double tau) {
        auto it = tables_.find(tau);
        if (it != tables_.end()) return it->second;
        const int qmax = grid_.max_k_squared();
        LinearTables tab{Eigen::ArrayXd(qmax + 1), Eigen::ArrayXd(qmax + 1), Eigen::ArrayXd(qmax + 1)};
        for (int q = 0; q <= qmax; ++q) {
            const double w = std::sqrt(static_cast<double>(q));
            tab.cos_t[q] = std::cos(tau * w);
            tab.sinc_t[q] = q == 0 ? tau : std::sin(tau * w) / w;
            tab.wsin_t[q] = w * std::sin(tau * w);
        }
        return tables_.emplace(tau, std::move(tab)).first->second;
    }

    Eigen::ArrayXcd lift(const Eigen::ArrayXcd& c) const {
        if (modes_.empty()) return c;
        Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(work_grid_.spectral_size());
        for (const auto& [i, j] : modes_) out[j] = c[i];
        return out;
    }

    void drop(const Eigen::ArrayXcd& work, Eigen::ArrayXcd& c) const {
        if (modes_.empty()) {
            c = work;
            return;
        }
        c.setZero();
        for (const auto& [i, j] : modes_) c[i] = work[j];
    }

    const TorusGrid& grid_;
    SolverConfig config_;
    const SpectralGeometry& geo_;
    const FftPlan& plan_;
    TorusGrid work_grid_;
    const FftPlan& work_plan_;
    const ProfileSolution* profile_ = nullptr;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> modes_;
    std::map<double, LinearTables> tables_;
};

void validate(const SolverConfig& config, double T) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw PreconditionViolated("horizon must be finite and >= 0");
    if (!(config.dt > 0.0)) throw PreconditionViolated("time step must be positive");
    if (!(config.sigma >= 0.0)) throw PreconditionViolated("sigma must be >= 0");
    if (!(config.dealias_padding >= 1.0)) throw PreconditionViolated("dealias padding must be >= 1");
    if (!(config.nonlinear_cfl > 0.0)) throw PreconditionViolated("nonlinear cfl must be positive");
    if (config.observe_every < 1) throw PreconditionViolated("observe_every must be >= 1");
}

} // namespace

EvolveResult evolve(const WaveState& initial, double T, const SolverConfig& config,
                    const std::vector<Observer>& observers) {
    validate(config, T);
    require_same_grid(initial.u, initial.ut);
    const TorusGrid& grid = initial.grid();
    Stepper stepper(grid, config);

    Eigen::ArrayXcd u = initial.u.spectral();
    Eigen::ArrayXcd ut = initial.ut.spectral();
    // maxCoeff may step over a NaN, so finiteness is checked on the samples themselves.
    if (!initial.u.physical().allFinite() || !initial.ut.physical().allFinite())
        throw NonFinite("initial state is not finite");
    double sup = sup_norm(initial.u);
    const double guard = config.blowup_guard > 0.0 ? config.blowup_guard : 1e3 * std::max(1.0, sup);
    const bool nonlinear = config.sigma > 0.0;

    auto observe = [&](double time) {
        if (observers.empty()) return;
        const WaveState snap = stepper.snapshot(u, ut, time);
        for (const auto& obs : observers) obs(snap);
    };

    long substeps = 0;
    double max_sup = sup;
    const long steps = T > 0.0 ? std::max(1L, static_cast<long>(std::ceil(T / config.dt - 1e-9))) : 0;
    const double dt = steps > 0 ? T / static_cast<double>(steps) : 0.0;
    observe(initial.time);

    for (long step = 1; step <= steps; ++step) {
        if (nonlinear) {
            const long m = std::max(1L, static_cast<long>(std::ceil(dt * std::pow(sup, config.sigma) /
                                                                    config.nonlinear_cfl)));
            const double h = dt / static_cast<double>(m);
            for (long j = 0; j < m; ++j) {
                stepper.linear(u, ut, 0.5 * h);
                sup = stepper.pointwise(u, ut, h);
                stepper.linear(u, ut, 0.5 * h);
            }
            substeps += m;
            if (sup > guard)
                throw BlowupDetected("sup norm " + std::to_string(sup) + " exceeded guard " +
                                     std::to_string(guard) + " at step " + std::to_string(step));
        } else {
            stepper.linear(u, ut, dt);
            substeps += 1;
        }
        if (!u.allFinite() || !ut.allFinite()) throw NonFinite("non-finite spectrum at step " + std::to_string(step));
        max_sup = std::max(max_sup, sup);
        const double time = initial.time + dt * static_cast<double>(step);
        if (step % config.observe_every == 0 || step == steps) observe(time);
    }
    WaveState final_state = steps > 0 ? stepper.snapshot(u, ut, initial.time + T) : initial;
    if (!nonlinear) {
        sup = sup_norm(final_state.u);
        if (sup > guard) throw BlowupDetected("sup norm exceeded guard in linear mode");
    }
    max_sup = std::max(max_sup, sup);
    return {std::move(final_state), steps, substeps, max_sup};
}

WaveState nonlinear_pointwise_step(const WaveState& state, double dt, double sigma) {
    if (!(sigma > 0.0)) throw PreconditionViolated("pointwise nonlinear step needs sigma > 0");
    require_same_grid(state.u, state.ut);
    const auto& profile = shared_profile(sigma);
    Eigen::ArrayXd a = state.u.physical();
    Eigen::ArrayXd b = state.ut.physical();
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const auto [y, dy] = profile.flow(a[j], b[j], dt);
        if (!std::isfinite(y) || !std::isfinite(dy)) throw NonFinite("non-finite value in pointwise flow");
        a[j] = y;
        b[j] = dy;
    }
    return {SpectralField::from_physical(state.grid(), std::move(a)),
            SpectralField::from_physical(state.grid(), std::move(b)), state.time + dt};
}

EnergyReading hamiltonian(const WaveState& state, double sigma) {
    require_same_grid(state.u, state.ut);
    const TorusGrid& grid = state.grid();
    EnergyReading e;
    e.time = state.time;
    e.kinetic = 0.5 * grid.volume() * radial_quadratic_form(state.ut, [](int) { return 1.0; });
    e.gradient = 0.5 * grid.volume() * radial_quadratic_form(state.u, [](int q) { return double(q); });
    if (sigma > 0.0) {
        const double p = 2.0 * sigma + 2.0;
        e.potential = grid.cell_volume() * state.u.physical().abs().pow(p).sum() / p;
    }
    e.total = e.kinetic + e.gradient + e.potential;
    return e;
}

double semiclassical_energy(const WaveState& w, double n, double s) {
    require_same_grid(w.u, w.ut);
    if (!(n >= 2.0)) throw PreconditionViolated("semiclassical energy needs n >= 2");
    const double low = std::pow(n, -2.0 * (1.0 - s));
    const double high = std::pow(n, -2.0 * (2.0 - s));
    const double l2 = radial_quadratic_form(w.ut, [](int) { return 1.0; }) +
                      radial_quadratic_form(w.u, [](int q) { return double(q); });
    const double h1 = radial_quadratic_form(w.ut, [](int q) { return 1.0 + q; }) +
                      radial_quadratic_form(w.u, [](int q) { return (1.0 + q) * q; });
    return low * l2 + high * h1;
}

} // namespace inflab
