#include "mmlarma/estimation.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mmlarma/likelihood.hpp"
#include "mmlarma/simplex.hpp"

namespace mmlarma {

std::string to_string(FitObjective objective) {
    switch (objective) {
        case FitObjective::css: return "css";
        case FitObjective::exact_likelihood: return "exact";
        case FitObjective::css_then_exact: return "css_then_exact";
    }
    return "unknown";
}

FitObjective parse_fit_objective(const std::string& name) {
    if (name == "css") return FitObjective::css;
    if (name == "exact" || name == "exact_likelihood") return FitObjective::exact_likelihood;
    if (name == "css_then_exact") return FitObjective::css_then_exact;
    throw ArmaError("unknown fit objective '" + name + "'");
}

void FitConfig::validate() const {
    if (max_iterations < 1) throw ArmaError("max_iterations must be positive");
    if (!(objective_tolerance > 0.0)) throw ArmaError("objective_tolerance must be positive");
    if (restart_count < 0) throw ArmaError("restart_count must be nonnegative");
    if (!(pacf_bound > 0.0 && pacf_bound < 1.0)) throw ArmaError("pacf_bound must lie in (0, 1)");
}

ArmaCoefficients<double> coefficients_from_search(const Eigen::VectorXd& u, ArmaOrder order, double pacf_bound) {
    const Eigen::VectorXd pacf = pacf_bound * u.array().tanh();
    return {pacf_to_ar(pacf.head(order.p)), pacf_to_ar(pacf.tail(order.q)), 1.0};
}

namespace {

constexpr double kInitialStep = 0.5;
constexpr double kRestartStep = 0.1;
constexpr double kPolishStep = 0.05;
constexpr double kStartPacfRange = 0.8;

template <typename Objective>
SimplexResult<double> minimize_with_restart(Objective&& f, const Eigen::VectorXd& start, double step,
                                            const FitConfig& cfg) {
    auto first = nelder_mead<double>(f, start, step, cfg.max_iterations, cfg.objective_tolerance);
    if (!std::isfinite(first.value)) return first;
    // A collapsed simplex can stall away from the optimum; one fresh simplex
    // around the incumbent is enough in practice.
    auto second = nelder_mead<double>(f, first.x, std::min(step, kRestartStep), cfg.max_iterations,
                                      cfg.objective_tolerance);
    if (second.value <= first.value) {
        second.iterations += first.iterations;
        return second;
    }
    return first;
}

}  // namespace

FittedModel fit(const Eigen::VectorXd& y, ArmaOrder order, const FitConfig& config) {
    config.validate();
    order.validate();
    const Index n = y.size();
    if (n < order.p + order.q + 2) throw ArmaError("insufficient data");
    if (!y.allFinite()) throw ArmaError("series contains non-finite values");

    const double bound = config.pacf_bound;
    const Index dim = order.p + order.q;

    // Two PACF coordinates near the bound can still put roots inside the
    // margin, so those points are rejected outright.
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto feasible = [](const ArmaCoefficients<double>& c) {
        return is_stationary(c.phi) && is_invertible(c.theta);
    };
    auto css_objective = [&](const Eigen::VectorXd& u) {
        const auto c = coefficients_from_search(u, order, bound);
        return feasible(c) ? css_sum_squares(c, y) : inf;
    };
    auto exact_objective = [&](const Eigen::VectorXd& u) {
        const auto c = coefficients_from_search(u, order, bound);
        if (!feasible(c)) return inf;
        try {
            const auto terms = gaussian_terms(c.phi, c.theta, y);
            return std::log(terms.quadform / static_cast<double>(n)) + terms.logdet / static_cast<double>(n);
        } catch (const ArmaError&) {
            return inf;
        }
    };

    bool converged = true;
    Eigen::VectorXd best = Eigen::VectorXd::Zero(dim);
    if (dim > 0) {
        std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(dim)};
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> draw(-kStartPacfRange, kStartPacfRange);
        for (int r = 0; r < config.restart_count; ++r) {
            Eigen::VectorXd u(dim);
            for (Index i = 0; i < dim; ++i) u(i) = std::atanh(draw(rng) / bound);
            starts.push_back(std::move(u));
        }

        const bool exact_only = config.objective == FitObjective::exact_likelihood;
        double best_value = std::numeric_limits<double>::infinity();
        bool best_converged = false;
        for (const auto& start : starts) {
            const auto run = exact_only ? minimize_with_restart(exact_objective, start, kInitialStep, config)
                                        : minimize_with_restart(css_objective, start, kInitialStep, config);
            if (run.value < best_value) {
                best_value = run.value;
                best = run.x;
                best_converged = run.converged;
            }
        }
        if (!std::isfinite(best_value)) throw ArmaError("fit failed");
        converged = best_converged;

        if (config.objective == FitObjective::css_then_exact) {
            const auto polish = nelder_mead<double>(exact_objective, best, kPolishStep, config.max_iterations,
                                                    config.objective_tolerance);
            if (std::isfinite(polish.value) && polish.value <= exact_objective(best)) {
                best = polish.x;
                converged = converged && polish.converged;
            }
        }
    }

    FittedModel out;
    out.order = order;
    out.n_obs = n;
    out.objective = config.objective;
    out.converged = converged;
    out.coeffs = coefficients_from_search(best, order, bound);
    if (!is_stationary(out.coeffs.phi) || !is_invertible(out.coeffs.theta)) throw ArmaError("fit failed");
    // One factorization serves both the sigma2 profile and the likelihood.
    const auto terms = gaussian_terms(out.coeffs.phi, out.coeffs.theta, y);
    out.coeffs.sigma2 = terms.quadform / static_cast<double>(n);
    if (!(out.coeffs.sigma2 > 0.0)) throw ArmaError("degenerate series");
    out.loglik = loglik_from_terms(terms, out.coeffs.sigma2, n).loglik;
    out.css = css_sum_squares(out.coeffs, y);
    return out;
}

}  // namespace mmlarma
