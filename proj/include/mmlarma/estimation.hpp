#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "mmlarma/arma.hpp"

namespace mmlarma {

enum class FitObjective {
    css,               // conditional sum of squares only
    exact_likelihood,  // concentrated exact Gaussian likelihood only
    css_then_exact,    // css search, then polish on the exact likelihood
};

std::string to_string(FitObjective objective);
FitObjective parse_fit_objective(const std::string& name);

struct FitConfig {
    int max_iterations = 2000;
    double objective_tolerance = 1e-10;
    int restart_count = 4;
    double pacf_bound = 1.0 - 1e-4;
    FitObjective objective = FitObjective::css_then_exact;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FittedModel {
    ArmaCoefficients<double> coeffs;
    ArmaOrder order;
    double loglik = 0.0;  // exact_loglik at coeffs
    double css = 0.0;     // S(phi, theta) at coeffs
    bool converged = false;
    Index n_obs = 0;
    FitObjective objective = FitObjective::css_then_exact;
};

/// Maximum-likelihood-type fit of a fixed-order zero-mean ARMA model.
///
/// The search runs over partial-autocorrelation coordinates of both the AR
/// and MA polynomials, each squashed into (-pacf_bound, pacf_bound), so every
/// iterate is stationary and invertible.  A Nelder-Mead simplex minimizes the
/// chosen objective from the zero vector plus restart_count seeded random
/// starts; sigma2 is then profiled out of the exact likelihood.
///
/// Throws ArmaError("insufficient data") when N < p + q + 2 and
/// ArmaError("fit failed") when no start yields a finite objective.
FittedModel fit(const Eigen::VectorXd& y, ArmaOrder order, const FitConfig& config = {});

/// Map from search coordinates to coefficients (exposed for tests).
ArmaCoefficients<double> coefficients_from_search(const Eigen::VectorXd& u, ArmaOrder order, double pacf_bound);

}  // namespace mmlarma
