#pragma once

#include <string>
#include <vector>

namespace inflab {

/// Regularity and schedule exponents of one run.
struct RegimeParams {
    double s = 0.3;
    double sigma = 1.0;
    double delta1 = 0.05;
    double delta2 = 0.5;
    double theta = 0.05;

    bool operator==(const RegimeParams&) const = default;
};

/// The concentration schedule (κₙ, εₙ, tₙ, λₙ) at index n:
///   κ = (log n)^{-δ₁},  ε = c_moll/n,  t = ((log n)^{δ₂} n^{-e})^σ,  λ = (κ n^{e})^σ
/// with e = d/2 - s (3/2 - s on the 3-torus).
struct ParameterSchedule {
    double n = 0.0;
    int dim = 3;
    double s = 0.0;
    double sigma = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double theta = 0.0;
    double c_moll = 0.0;

    double kappa = 0.0;
    double eps = 0.0;
    double t = 0.0;
    double lambda = 0.0;

    double concentration_exponent() const { return dim / 2.0 - s; }
    /// Peak amplitude κ n^{e} = λ^{1/σ} of the unmollified profile data.
    double amplitude() const;
    /// λₙtₙ, equal to (log n)^{σ(δ₂-δ₁)}.
    double phase() const { return lambda * t; }
};

/// Throws InvalidIndex for n < 3 and InvalidDeltas unless 0 < δ₁ < δ₂ < 1.
ParameterSchedule make_schedule(double n, const RegimeParams& regime, double c_moll = 0.01, int dim = 3);

struct RegimeCheck {
    double s = 0.0;
    double sigma = 0.0;
    double s_c = 0.0;   ///< 3/2 - 1/σ
    double lower = 0.0; ///< max{0, 3/2 - 2/(2σ-1)}
    bool valid = false;
    std::vector<std::string> reasons;
};

/// Window max{0, 3/2-2/(2σ-1)} < s < 3/2-1/σ with 1/2 <= σ <= 2.
RegimeCheck validate_regime(double s, double sigma);

struct DeltaCheck {
    bool valid = false;
    double margin = 0.0; ///< sσ(δ₂-δ₁) - δ₁, the predicted growth exponent of log n
};

/// sσ(δ₂-δ₁) > δ₁ (strict).
DeltaCheck validate_inflation_deltas(double s, double sigma, double delta1, double delta2);

/// Upper end σ(3/2-s)/2 - 1/2 of the perturbation exponent window.
double theta_upper_bound(double s, double sigma);

/// 0 < θ < σ(3/2-s)/2 - 1/2 (strict at both ends).
bool validate_theta(double s, double sigma, double theta);

} // namespace inflab
