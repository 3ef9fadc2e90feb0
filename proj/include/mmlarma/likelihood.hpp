#pragma once

// Exact (unconditional) Gaussian likelihood of a zero-mean ARMA sample:
//
//     L = -(N/2) log(2 pi sigma2) - (1/2) log|S| - y' S^{-1} y / (2 sigma2)
//
// where sigma2 * S is the N x N Toeplitz autocovariance matrix, so S is the
// covariance of the unit-variance process.

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "mmlarma/arma.hpp"

namespace mmlarma {

template <typename Scalar>
using CovarianceMatrix = Matrix<Scalar>;

template <typename Scalar>
struct LikelihoodValue {
    Scalar loglik;
    Scalar logdet_sigma;  // log|S|, unit-variance covariance
    Scalar quadform;      // y' S^{-1} y
};

/// Entry (i,j) = gamma(|i-j|).
template <typename Scalar>
CovarianceMatrix<Scalar> build_covariance(const ArmaCoefficients<Scalar>& coeffs, Index n) {
    if (n < 1) throw ArmaError("covariance dimension must be positive");
    const Vector<Scalar> gamma = theoretical_acvf(coeffs, n - 1);
    CovarianceMatrix<Scalar> cov(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) cov(i, j) = gamma(std::abs(i - j));
    return cov;
}

template <typename Scalar>
struct GaussianTerms {
    Scalar logdet;    // log|S|
    Scalar quadform;  // y' S^{-1} y
};

/// Series longer than this use the Durbin-Levinson factorization below
/// instead of a dense Cholesky factor.
inline constexpr Index kDenseFactorLimit = 1000;

namespace detail {

// Durbin-Levinson on the autocovariances: S = L D L' with L^{-1} holding the
// one-step prediction filters and D the prediction-error variances.  Both
// terms come out of one O(N^2) pass with O(N) memory.
template <typename Scalar, typename Derived>
GaussianTerms<Scalar> toeplitz_terms(const Vector<Scalar>& gamma, const Eigen::MatrixBase<Derived>& y) {
    const Index n = y.size();
    Vector<Scalar> a = Vector<Scalar>::Zero(n);
    Vector<Scalar> prev(n);
    Scalar v = gamma(0);
    if (!(v > Scalar(0))) throw ArmaError("covariance not positive definite");
    Scalar logdet = std::log(v);
    Scalar quad = Scalar(y(0)) * Scalar(y(0)) / v;
    for (Index t = 1; t < n; ++t) {
        Scalar acc = gamma(t);
        for (Index j = 1; j < t; ++j) acc -= a(j - 1) * gamma(t - j);
        const Scalar kappa = acc / v;
        prev.head(t - 1) = a.head(t - 1);
        for (Index j = 1; j < t; ++j) a(j - 1) = prev(j - 1) - kappa * prev(t - 1 - j);
        a(t - 1) = kappa;
        v *= Scalar(1) - kappa * kappa;
        if (!(v > Scalar(0))) throw ArmaError("covariance not positive definite");
        Scalar e = y(t);
        for (Index j = 1; j <= t; ++j) e -= a(j - 1) * Scalar(y(t - j));
        logdet += std::log(v);
        quad += e * e / v;
    }
    return {logdet, quad};
}

}  // namespace detail

/// log|S| and y'S^{-1}y for the unit-variance (phi, theta) process from a
/// factorization of S: dense Cholesky up to kDenseFactorLimit observations,
/// Durbin-Levinson beyond.  S^{-1} is never formed.
template <typename Scalar, typename Derived>
GaussianTerms<Scalar> gaussian_terms(const Vector<Scalar>& phi, const Vector<Scalar>& theta,
                                     const Eigen::MatrixBase<Derived>& y) {
    const Index n = y.size();
    if (n < 1) throw ArmaError("empty series");
    const ArmaCoefficients<Scalar> unit{phi, theta, Scalar(1)};
    if (n > kDenseFactorLimit) return detail::toeplitz_terms(theoretical_acvf(unit, n - 1), y);
    const CovarianceMatrix<Scalar> cov = build_covariance(unit, n);

    Eigen::LLT<Matrix<Scalar>> llt(cov);
    if (llt.info() != Eigen::Success) throw ArmaError("covariance not positive definite");
    const auto lower = llt.matrixL();
    Scalar logdet(0);
    for (Index i = 0; i < n; ++i) {
        const Scalar d = llt.matrixLLT()(i, i);
        if (!(d > Scalar(0))) throw ArmaError("covariance not positive definite");
        logdet += std::log(d);
    }
    const Vector<Scalar> z = lower.solve(y.template cast<Scalar>());
    return {Scalar(2) * logdet, z.squaredNorm()};
}

template <typename Scalar>
LikelihoodValue<Scalar> loglik_from_terms(const GaussianTerms<Scalar>& terms, Scalar sigma2, Index n_obs) {
    if (!(sigma2 > Scalar(0))) throw ArmaError("sigma2 must be positive");
    const Scalar n = static_cast<Scalar>(n_obs);
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const Scalar loglik = -n / 2 * std::log(two_pi * sigma2) - terms.logdet / 2 - terms.quadform / (2 * sigma2);
    return {loglik, terms.logdet, terms.quadform};
}

template <typename Scalar, typename Derived>
LikelihoodValue<Scalar> exact_loglik(const ArmaCoefficients<Scalar>& coeffs, const Eigen::MatrixBase<Derived>& y) {
    if (!(coeffs.sigma2 > Scalar(0))) throw ArmaError("sigma2 must be positive");
    return loglik_from_terms(gaussian_terms(coeffs.phi, coeffs.theta, y), coeffs.sigma2, y.size());
}

/// S(phi, theta): sum of squared zero-presample residuals.
template <typename Scalar, typename Derived>
Scalar css_sum_squares(const ArmaCoefficients<Scalar>& coeffs, const Eigen::MatrixBase<Derived>& y) {
    return residuals_css(coeffs, y).squaredNorm();
}

/// sigma2 maximizing the exact likelihood for fixed (phi, theta): y'S^{-1}y / N.
template <typename Scalar, typename Derived>
Scalar sigma2_profile(const Vector<Scalar>& phi, const Vector<Scalar>& theta, const Eigen::MatrixBase<Derived>& y) {
    const auto terms = gaussian_terms(phi, theta, y);
    const Scalar s2 = terms.quadform / static_cast<Scalar>(y.size());
    if (!(s2 > Scalar(0))) throw ArmaError("degenerate series");
    return s2;
}

}  // namespace mmlarma
