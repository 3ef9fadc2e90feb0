#pragma once

// Asymptotic expected Fisher information of beta = (phi, theta, sigma2).
//
// With u_t = phi(B)^{-1} e_t and v_t = theta(B)^{-1} e_t the residual
// derivatives are
//
//     d e_t / d phi_k   = -u_{t-k}
//     d e_t / d theta_j = +v_{t-j}
//
// so the coefficient block is n * E[grad grad'] / sigma2, which is free of
// sigma2 once the derivative processes are normalized to unit innovations.
// The cross block therefore carries a minus sign:
//
//     I_phiphi(k,j)     =  n gamma_u(k-j)
//     I_thetatheta(k,j) =  n gamma_v(k-j)
//     I_phitheta(k,j)   = -n E[u_{t-k} v_{t-j}]
//
// and this sign is checked against numeric Hessians of exact_loglik in the
// test suite.  The sigma2 entry is n / (2 sigma2^2) with zero cross terms.
// The -(1/2) d^2 log|S| term is O(1) and dropped.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "mmlarma/arma.hpp"

namespace mmlarma {

template <typename Scalar>
struct DerivativeCovariances {
    Vector<Scalar> gamma_u;  // lags 0..max_lag
    Vector<Scalar> gamma_v;  // lags 0..max_lag
    Vector<Scalar> cross;    // E[u_t v_{t-h}] for h = -max_lag..max_lag
    Index max_lag = 0;

    Scalar gamma_uv(Index h) const { return cross(h + max_lag); }
};

template <typename Scalar>
struct FisherMatrix {
    Matrix<Scalar> info;  // ordered (phi_1..phi_p, theta_1..theta_q, sigma2)
    Index n = 0;

    Index dim() const { return info.rows(); }
};

namespace detail {

template <typename Scalar>
Scalar smallest_root_modulus(const Vector<Scalar>& coeffs) {
    Scalar r = std::numeric_limits<Scalar>::infinity();
    for (const auto& z : polynomial_roots(LagPolynomial<Scalar>{coeffs})) r = std::min(r, std::abs(z));
    return r;
}

// Weights of 1 / (1 - sum c_i B^i).
template <typename Scalar>
Vector<Scalar> inverse_weights(const Vector<Scalar>& c, Index count) {
    Vector<Scalar> w = Vector<Scalar>::Zero(count);
    for (Index j = 0; j < count; ++j) {
        Scalar v = j == 0 ? Scalar(1) : Scalar(0);
        for (Index i = 1; i <= std::min<Index>(c.size(), j); ++i) v += c(i - 1) * w(j - i);
        w(j) = v;
    }
    return w;
}

}  // namespace detail

// Longest psi-weight series we are willing to sum; slower decay than this
// (smallest root within about 1.5e-5 of the unit circle) is treated as
// nonstationary.
inline constexpr Index kMaxPsiTerms = Index(1) << 21;

template <typename Scalar>
DerivativeCovariances<Scalar> derivative_process_covariances(const ArmaCoefficients<Scalar>& coeffs, Index max_lag) {
    if (max_lag < 0) throw ArmaError("max_lag must be nonnegative");
    const Scalar limit = Scalar(1) + Scalar(kDefaultRootMargin);
    const Scalar r_phi = detail::smallest_root_modulus(coeffs.phi);
    const Scalar r_theta = detail::smallest_root_modulus(coeffs.theta);
    if (!(r_phi > limit) || !(r_theta > limit)) throw ArmaError("derivative process nonstationary");

    DerivativeCovariances<Scalar> out;
    out.max_lag = max_lag;
    out.gamma_u = theoretical_acvf(ArmaCoefficients<Scalar>{coeffs.phi, {}, Scalar(1)}, max_lag);
    out.gamma_v = theoretical_acvf(ArmaCoefficients<Scalar>{coeffs.theta, {}, Scalar(1)}, max_lag);
    out.cross = Vector<Scalar>::Zero(2 * max_lag + 1);
    if (coeffs.phi.size() == 0 && coeffs.theta.size() == 0) {
        out.cross(max_lag) = Scalar(1);
        return out;
    }

    // Summands a_{i+h} c_i shrink like (r_phi r_theta)^{-i}; choose m with
    // that factor below 1e-14, padded for polynomial factors from repeated
    // roots.  An empty polynomial has r = inf and contributes nothing.
    const Scalar decay = std::log(r_phi) + std::log(r_theta);
    const Scalar needed = std::ceil(std::log(Scalar(1e14)) / decay) + 64;
    if (!(needed <= Scalar(kMaxPsiTerms))) throw ArmaError("derivative process nonstationary");
    const Index terms = static_cast<Index>(needed);
    const Index count = terms + max_lag + 1;
    const Vector<Scalar> a = detail::inverse_weights(coeffs.phi, count);
    const Vector<Scalar> c = detail::inverse_weights(coeffs.theta, count);
    for (Index h = -max_lag; h <= max_lag; ++h) {
        const Index shift = std::abs(h);
        const Index len = count - shift;
        // h >= 0: sum_i a_{i+h} c_i ; h < 0: sum_i a_i c_{i+|h|}
        out.cross(h + max_lag) = h >= 0 ? a.segment(shift, len).dot(c.head(len))
                                        : a.head(len).dot(c.segment(shift, len));
    }
    return out;
}

template <typename Scalar>
FisherMatrix<Scalar> fisher_matrix(const ArmaCoefficients<Scalar>& coeffs, Index n) {
    if (n < 1) throw ArmaError("sample size must be positive");
    if (!(coeffs.sigma2 > Scalar(0))) throw ArmaError("sigma2 must be positive");
    const Index p = coeffs.phi.size();
    const Index q = coeffs.theta.size();
    const Index lags = std::max<Index>(std::max(p, q) - 1, 0);
    const auto cov = derivative_process_covariances(coeffs, lags);
    const Scalar ns = static_cast<Scalar>(n);

    FisherMatrix<Scalar> fm;
    fm.n = n;
    fm.info = Matrix<Scalar>::Zero(p + q + 1, p + q + 1);
    for (Index k = 0; k < p; ++k)
        for (Index j = 0; j < p; ++j) fm.info(k, j) = ns * cov.gamma_u(std::abs(k - j));
    for (Index k = 0; k < q; ++k)
        for (Index j = 0; j < q; ++j) fm.info(p + k, p + j) = ns * cov.gamma_v(std::abs(k - j));
    // E[u_{t-k} v_{t-j}] = gamma_uv(j - k)
    for (Index k = 0; k < p; ++k) {
        for (Index j = 0; j < q; ++j) {
            const Scalar v = -ns * cov.gamma_uv(j - k);
            fm.info(k, p + j) = v;
            fm.info(p + j, k) = v;
        }
    }
    fm.info(p + q, p + q) = ns / (Scalar(2) * coeffs.sigma2 * coeffs.sigma2);
    return fm;
}

template <typename Scalar>
Scalar fisher_logdet(const FisherMatrix<Scalar>& fm) {
    Eigen::LLT<Matrix<Scalar>> llt(fm.info);
    if (llt.info() != Eigen::Success) throw ArmaError("Fisher matrix not positive definite");
    Scalar logdet(0);
    for (Index i = 0; i < fm.dim(); ++i) {
        const Scalar d = llt.matrixLLT()(i, i);
        if (!(d > Scalar(0))) throw ArmaError("Fisher matrix not positive definite");
        logdet += std::log(d);
    }
    return Scalar(2) * logdet;
}

}  // namespace mmlarma
