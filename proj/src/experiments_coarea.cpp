#include "inflab/errors.hpp"
#include "inflab/experiments.hpp"
#include "inflab/jobs.hpp"
#include "inflab/profile.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <chrono>
#include <cmath>
#include <numbers>

namespace inflab {

namespace {

double sphere_area(int dim) {
    switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw PreconditionViolated("co-area check supports dim 1, 2 or 3");
    }
}

double max_bump_slope() {
    static const double value = [] {
        double m = 0.0;
        for (int i = 1; i < 20000; ++i) m = std::max(m, std::abs(bump_profile_derivative(i / 20000.0)));
        return m;
    }();
    return value;
}

struct Quadrature {
    double value;
    long panels;
};

Quadrature radial_integral(const std::function<double(double)>& W, double sigma, double lambda,
                           const CoareaOptions& opt) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    auto integrand = [&](double r) {
        const double phi = bump_profile(r);
        if (phi == 0.0) return 0.0;
        const double dphi = bump_profile_derivative(r);
        const double w = W(lambda * phi);
        return dphi * dphi * std::pow(phi, 2.0 * sigma) * w * w * std::pow(r, opt.dim - 1);
    };
    auto composite = [&](long panels) {
        double acc = 0.0;
        for (long p = 0; p < panels; ++p)
            acc += Rule::integrate(integrand, double(p) / panels, double(p + 1) / panels);
        return acc;
    };
    long panels = 64 + static_cast<long>(std::ceil(4.0 * lambda * max_bump_slope()));
    double coarse = composite(panels);
    while (true) {
        if (2 * panels > opt.max_panels)
            throw UnresolvedOscillation("co-area quadrature at lambda=" + format_number(lambda) +
                                        " needs more than " + std::to_string(opt.max_panels) + " panels");
        const double fine = composite(2 * panels);
        panels *= 2;
        if (std::abs(fine - coarse) <= opt.rel_tol * std::abs(fine)) return {fine, panels};
        if (fine == 0.0 && coarse == 0.0) return {0.0, panels};
        coarse = fine;
    }
}

} // namespace

double coarea_norm(const std::function<double(double)>& W, double sigma, double lambda,
                   const CoareaOptions& options) {
    if (!(lambda > 0.0)) throw PreconditionViolated("lambda must be positive");
    if (!(sigma >= 0.0)) throw PreconditionViolated("sigma must be >= 0");
    return std::sqrt(sphere_area(options.dim) * radial_integral(W, sigma, lambda, options).value);
}

ExperimentReport run_coarea_check(const std::function<double(double)>& W, const std::string& w_name, double sigma,
                                  const std::vector<double>& lambda_list, const CoareaOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (lambda_list.empty()) throw PreconditionViolated("co-area check needs at least one lambda");
    for (std::size_t i = 0; i < lambda_list.size(); ++i) {
        if (!(lambda_list[i] > 0.0)) throw PreconditionViolated("lambda values must be positive");
        if (i > 0 && !(lambda_list[i] > lambda_list[i - 1]))
            throw PreconditionViolated("lambda values must be strictly increasing");
    }
    const double area = sphere_area(options.dim);
    auto rows = parallel_map<std::vector<double>>(lambda_list.size(), options.jobs, [&](std::size_t i) {
        const auto q = radial_integral(W, sigma, lambda_list[i], options);
        return std::vector<double>{lambda_list[i], std::sqrt(area * q.value), double(q.panels)};
    });

    ExperimentReport report;
    report.experiment = "coarea";
    report.inputs = {{"sigma", sigma}, {"dim", double(options.dim)}, {"rel_tol", options.rel_tol}};
    report.labels["W"] = w_name;
    Table table({"lambda", "g", "panels"});
    for (auto& r : rows) table.add_row(std::move(r));
    const auto g = table.column("g");
    const double g_min = *std::min_element(g.begin(), g.end());
    report.fitted["g_min"] = g_min;
    report.verdicts.push_back({"min_positive", "criterion-4", g_min > 0.0, true, "min g = " + format_number(g_min)});
    if (g_min > 0.0 && g.size() >= 2) {
        const double slope = loglog_slope(table.column("lambda"), g);
        report.fitted["loglog_slope"] = slope;
        report.verdicts.push_back({"no_decay", "criterion-4", slope >= -0.05, true,
                                   "log-log slope " + format_number(slope) + " (limit -0.05)"});
    } else {
        report.verdicts.push_back({"no_decay", "criterion-4", false, g_min > 0.0,
                                   "slope undefined: g vanishes or a single lambda"});
    }
    report.tables["summary"] = std::move(table);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace inflab
