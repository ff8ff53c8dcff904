#include "inflab/regime.hpp"
#include "inflab/errors.hpp"

#include <cmath>
#include <sstream>

namespace inflab {

double ParameterSchedule::amplitude() const { return kappa * std::pow(n, concentration_exponent()); }

ParameterSchedule make_schedule(double n, const RegimeParams& regime, double c_moll, int dim) {
    if (!(n >= 3.0)) throw InvalidIndex("concentration index must satisfy n >= 3, got " + std::to_string(n));
    if (!(0.0 < regime.delta1 && regime.delta1 < regime.delta2 && regime.delta2 < 1.0)) {
        std::ostringstream os;
        os << "schedule exponents must satisfy 0 < delta1 < delta2 < 1, got delta1=" << regime.delta1
           << " delta2=" << regime.delta2;
        throw InvalidDeltas(os.str());
    }
    ParameterSchedule p;
    p.n = n;
    p.dim = dim;
    p.s = regime.s;
    p.sigma = regime.sigma;
    p.delta1 = regime.delta1;
    p.delta2 = regime.delta2;
    p.theta = regime.theta;
    p.c_moll = c_moll;

    const double log_n = std::log(n);
    const double e = p.concentration_exponent();
    p.kappa = std::pow(log_n, -regime.delta1);
    p.eps = c_moll / n;
    p.t = std::pow(std::pow(log_n, regime.delta2) * std::pow(n, -e), regime.sigma);
    p.lambda = std::pow(p.kappa * std::pow(n, e), regime.sigma);
    return p;
}

RegimeCheck validate_regime(double s, double sigma) {
    RegimeCheck c;
    c.s = s;
    c.sigma = sigma;
    c.s_c = 1.5 - 1.0 / sigma;
    c.lower = (2.0 * sigma - 1.0 > 0.0) ? std::max(0.0, 1.5 - 2.0 / (2.0 * sigma - 1.0)) : 0.0;

    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    if (!(sigma >= 0.5 && sigma <= 2.0)) c.reasons.push_back("sigma=" + fmt(sigma) + " outside [1/2, 2]");
    if (!(c.lower < c.s_c))
        c.reasons.push_back("empty regularity window: lower bound " + fmt(c.lower) + " >= s_c = " + fmt(c.s_c));
    if (!(s > c.lower)) c.reasons.push_back("s=" + fmt(s) + " must exceed lower bound " + fmt(c.lower));
    if (!(s < c.s_c)) c.reasons.push_back("s=" + fmt(s) + " must be below s_c = " + fmt(c.s_c));
    c.valid = c.reasons.empty();
    return c;
}

DeltaCheck validate_inflation_deltas(double s, double sigma, double delta1, double delta2) {
    DeltaCheck d;
    d.margin = s * sigma * (delta2 - delta1) - delta1;
    d.valid = d.margin > 0.0;
    return d;
}

double theta_upper_bound(double s, double sigma) { return sigma * (1.5 - s) / 2.0 - 0.5; }

bool validate_theta(double s, double sigma, double theta) {
    return theta > 0.0 && theta < theta_upper_bound(s, sigma);
}

} // namespace inflab
