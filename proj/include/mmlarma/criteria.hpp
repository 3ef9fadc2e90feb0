#pragma once

// Model-selection scores.  Every score is "lower is better".
//
// The penalized criteria use the per-observation deviance g = -2 logL / N as
// the goodness term, with m = p + q + k + 1 parameters (k = 1 when an
// intercept is present):
//
//     AIC  = g + 2m / N
//     AICc = g + 2m / (N - m - 1)
//     BIC  = g + m log(N) / N
//     HQ   = g + 2m log(log N) / N
//
// The MML87 message length (nats) for k = p + q + 1 continuous parameters is
//
//     -log pi(beta) - log f(y | beta) + (1/2) log|F(beta)| - N log(eps)
//         + (k/2)(1 + log kappa_k) - log h(k)
//
// with pi(beta) = 1 / (R_p R_q sigma2) uniform over the stationarity and
// invertibility regions and h(k) uniform over the candidate grid.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "mmlarma/arma.hpp"
#include "mmlarma/estimation.hpp"
#include "mmlarma/fisher.hpp"

namespace mmlarma {

enum class Criterion { MML87 = 0, AIC, AICc, BIC, HQ };

inline constexpr std::size_t kCriterionCount = 5;
inline constexpr std::array<Criterion, kCriterionCount> kAllCriteria{Criterion::MML87, Criterion::AIC,
                                                                     Criterion::AICc, Criterion::BIC, Criterion::HQ};

inline constexpr std::string_view criterion_name(Criterion c) {
    constexpr std::array<std::string_view, kCriterionCount> names{"MML87", "AIC", "AICc", "BIC", "HQ"};
    return names[static_cast<std::size_t>(c)];
}

inline constexpr std::size_t index_of(Criterion c) { return static_cast<std::size_t>(c); }

template <typename T>
using PerCriterion = std::array<T, kCriterionCount>;

struct CriterionScore {
    Criterion name;
    double value;
    ArmaOrder order;
};

struct MmlConfig {
    double accuracy_quantum = 0.01;  // eps, data units
    int model_grid_size = 30;        // candidate count behind h(k)
    bool include_constant_terms = true;

    void validate() const {
        if (!(accuracy_quantum > 0.0)) throw ArmaError("accuracy_quantum must be positive");
        if (model_grid_size < 1) throw ArmaError("model_grid_size must be positive");
    }
};

inline CriterionScore penalized_criterion(Criterion name, double loglik, ArmaOrder order, int intercept,
                                          Index n_obs) {
    if (name == Criterion::MML87) throw ArmaError("MML87 is not a penalized-likelihood criterion");
    if (intercept != 0 && intercept != 1) throw ArmaError("intercept flag must be 0 or 1");
    if (n_obs < 1) throw ArmaError("n_obs must be positive");
    const double n = static_cast<double>(n_obs);
    const double m = order.p + order.q + intercept + 1;
    const double g = -2.0 * loglik / n;
    double value = 0.0;
    switch (name) {
        case Criterion::AIC: value = g + 2.0 * m / n; break;
        case Criterion::AICc:
            if (n - m - 1.0 <= 0.0) throw ArmaError("sample too small for AICc");
            value = g + 2.0 * m / (n - m - 1.0);
            break;
        case Criterion::BIC: value = g + m * std::log(n) / n; break;
        case Criterion::HQ:
            if (n <= std::numbers::e) throw ArmaError("sample too small for HQ");
            value = g + 2.0 * m * std::log(std::log(n)) / n;
            break;
        case Criterion::MML87: break;
    }
    return {name, value, order};
}

/// Normalized second moment of the optimal k-dimensional quantizing lattice.
/// Exact for k <= 3; the large-k limit 1/(2 pi e) beyond.
inline double lattice_constant(int k) {
    if (k < 1) throw ArmaError("lattice dimension must be positive");
    switch (k) {
        case 1: return 1.0 / 12.0;
        case 2: return 5.0 / (36.0 * std::sqrt(3.0));
        case 3: return 19.0 / (192.0 * std::cbrt(2.0));
        default: return 1.0 / (2.0 * std::numbers::pi * std::numbers::e);
    }
}

/// Lebesgue volume R_p of the AR(p) stationarity region.
///
/// Integrating the PACF-to-coefficient Jacobian over (-1,1)^p factorizes into
/// one-dimensional integrals int (1-x^2)^{floor((k-1)/2)} dx, giving the
/// factors M_1, M_1, M_3, M_3, M_5, ... with M_1 = 2 and
/// M_{j+2} = (j+1)/(j+2) M_j.  Hence R_1 = 2, R_2 = 4, R_3 = 16/3, R_4 = 64/9.
inline double stationarity_volume(int p) {
    if (p < 0) throw ArmaError("order must be nonnegative");
    double volume = 1.0;
    double m = 2.0;  // M_1
    for (int k = 1; k <= p; ++k) {
        volume *= m;
        if (k % 2 == 0) m *= static_cast<double>(k) / static_cast<double>(k + 1);
    }
    return volume;
}

inline double invertibility_volume(int q) { return stationarity_volume(q); }

template <typename Scalar>
Scalar log_prior(const ArmaCoefficients<Scalar>& coeffs) {
    if (!(coeffs.sigma2 > Scalar(0)) || !is_stationary(coeffs.phi) || !is_invertible(coeffs.theta))
        throw ArmaError("outside prior support");
    const ArmaOrder order = coeffs.order();
    return -std::log(Scalar(stationarity_volume(order.p))) - std::log(Scalar(invertibility_volume(order.q))) -
           std::log(coeffs.sigma2);
}

template <typename Scalar>
Scalar message_length(const ArmaCoefficients<Scalar>& coeffs, Scalar loglik, Index n_obs, const MmlConfig& cfg) {
    cfg.validate();
    const int k = coeffs.order().parameter_count();
    const Scalar logdet = fisher_logdet(fisher_matrix(coeffs, n_obs));
    Scalar value = -log_prior(coeffs) - loglik + logdet / 2 +
                   Scalar(k) / 2 * (Scalar(1) + std::log(Scalar(lattice_constant(k))));
    if (cfg.include_constant_terms) {
        value -= static_cast<Scalar>(n_obs) * std::log(Scalar(cfg.accuracy_quantum));
        value += std::log(Scalar(cfg.model_grid_size));  // -log h(k), h = 1 / grid size
    }
    return value;
}

inline CriterionScore message_length(const FittedModel& fitted, const MmlConfig& cfg) {
    return {Criterion::MML87, message_length(fitted.coeffs, fitted.loglik, fitted.n_obs, cfg), fitted.order};
}

}  // namespace mmlarma
