#pragma once

// ARMA(p,q) process algebra.
//
// Models follow
//
//     y_t = phi_1 y_{t-1} + ... + phi_p y_{t-p} + e_t - theta_1 e_{t-1} - ... - theta_q e_{t-q}
//
// i.e. phi(B) y_t = theta(B) e_t with phi(B) = 1 - sum phi_i B^i and
// theta(B) = 1 - sum theta_j B^j.  Note the minus sign on the MA terms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmlarma/error.hpp"

namespace mmlarma {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Roots closer to the unit circle than this count as on it.
inline constexpr double kDefaultRootMargin = 1e-8;

struct ArmaOrder {
    int p = 0;
    int q = 0;

    /// Continuous parameters including the innovation variance.
    int parameter_count() const { return p + q + 1; }

    void validate(bool allow_white_noise = true) const {
        if (p < 0 || q < 0) throw ArmaError("ARMA order must be nonnegative");
        if (!allow_white_noise && p + q == 0) throw ArmaError("ARMA(0,0) not permitted here");
    }

    friend auto operator<=>(const ArmaOrder&, const ArmaOrder&) = default;
};

inline std::string to_string(ArmaOrder order) {
    return "(" + std::to_string(order.p) + "," + std::to_string(order.q) + ")";
}

template <typename Scalar>
struct ArmaCoefficients {
    Vector<Scalar> phi;
    Vector<Scalar> theta;
    Scalar sigma2 = Scalar(1);

    ArmaOrder order() const { return {static_cast<int>(phi.size()), static_cast<int>(theta.size())}; }

    static ArmaCoefficients white_noise(Scalar sigma2) { return {Vector<Scalar>(), Vector<Scalar>(), sigma2}; }
};

template <typename Scalar>
struct BasicTimeSeries {
    Vector<Scalar> values;
    std::vector<std::string> labels;  // empty or one per observation

    Index size() const { return values.size(); }
};

using TimeSeries = BasicTimeSeries<double>;

/// 1 - c_1 z - ... - c_m z^m.  The unit constant term is implicit.
template <typename Scalar>
struct LagPolynomial {
    Vector<Scalar> coeffs;

    Index degree() const {
        Index m = coeffs.size();
        while (m > 0 && coeffs(m - 1) == Scalar(0)) --m;
        return m;
    }

    std::complex<Scalar> operator()(std::complex<Scalar> z) const {
        std::complex<Scalar> acc(0);
        for (Index i = coeffs.size(); i-- > 0;) acc = (acc + coeffs(i)) * z;
        return Scalar(1) - acc;
    }
};

/// Roots of the lag polynomial from the eigenvalues of its companion matrix.
/// Trailing zero coefficients are dropped first; an all-zero polynomial has
/// no roots.
template <typename Scalar>
std::vector<std::complex<Scalar>> polynomial_roots(const LagPolynomial<Scalar>& poly) {
    const Index m = poly.degree();
    if (m == 0) return {};
    const Scalar lead = poly.coeffs(m - 1);
    if (m == 1) return {std::complex<Scalar>(Scalar(1) / lead)};

    // Monic form: z^m + a_{m-1} z^{m-1} + ... + a_1 z + a_0 with
    // a_k = c_k / c_m and a_0 = -1 / c_m.
    Matrix<Scalar> companion = Matrix<Scalar>::Zero(m, m);
    companion.diagonal(1).setOnes();
    companion(m - 1, 0) = Scalar(1) / lead;
    for (Index k = 1; k < m; ++k) companion(m - 1, k) = -poly.coeffs(k - 1) / lead;

    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, false);
    if (solver.info() != Eigen::Success) throw ArmaError("polynomial root solve failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

namespace detail {

// Roots of 1 - sum c_i z^i lie beyond 1 + margin exactly when the rescaled
// coefficients c_i (1 + margin)^i pass the Schur-Cohn step-down test.
template <typename Derived>
bool roots_outside_unit_circle(const Eigen::MatrixBase<Derived>& coeffs, double margin) {
    using Scalar = typename Derived::Scalar;
    const Index p = coeffs.size();
    if (!coeffs.allFinite()) return false;
    Vector<Scalar> cur(p);
    Scalar scale(1);
    for (Index i = 0; i < p; ++i) {
        scale *= Scalar(1) + Scalar(margin);
        cur(i) = coeffs(i) * scale;
    }
    Vector<Scalar> next(p);
    for (Index k = p; k-- > 0;) {
        const Scalar r = cur(k);
        if (!(std::abs(r) < Scalar(1))) return false;
        const Scalar denom = Scalar(1) - r * r;
        for (Index j = 0; j < k; ++j) next(j) = (cur(j) + r * cur(k - 1 - j)) / denom;
        cur.head(k) = next.head(k);
    }
    return true;
}

}  // namespace detail

template <typename Derived>
bool is_stationary(const Eigen::MatrixBase<Derived>& phi, double margin = kDefaultRootMargin) {
    return detail::roots_outside_unit_circle(phi, margin);
}

template <typename Derived>
bool is_invertible(const Eigen::MatrixBase<Derived>& theta, double margin = kDefaultRootMargin) {
    return detail::roots_outside_unit_circle(theta, margin);
}

/// Durbin-Levinson: partial autocorrelations in (-1,1)^p to the coefficients
/// of a stationary lag polynomial.  The same map serves the MA block.
template <typename Derived>
Vector<typename Derived::Scalar> pacf_to_ar(const Eigen::MatrixBase<Derived>& pacf) {
    using Scalar = typename Derived::Scalar;
    const Index p = pacf.size();
    Vector<Scalar> phi = Vector<Scalar>::Zero(p);
    Vector<Scalar> prev(p);
    for (Index k = 0; k < p; ++k) {
        const Scalar r = pacf(k);
        if (!(std::abs(r) < Scalar(1))) throw ArmaError("partial autocorrelation outside (-1, 1)");
        prev.head(k) = phi.head(k);
        for (Index j = 0; j < k; ++j) phi(j) = prev(j) - r * prev(k - 1 - j);
        phi(k) = r;
    }
    return phi;
}

/// Inverse of pacf_to_ar (step-down recursion).
template <typename Derived>
Vector<typename Derived::Scalar> ar_to_pacf(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Index p = phi.size();
    Vector<Scalar> pacf(p);
    Vector<Scalar> cur = phi;
    Vector<Scalar> next(p);
    for (Index k = p; k-- > 0;) {
        const Scalar r = cur(k);
        if (!(std::abs(r) < Scalar(1))) throw ArmaError("not stationary");
        pacf(k) = r;
        const Scalar denom = Scalar(1) - r * r;
        for (Index j = 0; j < k; ++j) next(j) = (cur(j) + r * cur(k - 1 - j)) / denom;
        cur.head(k) = next.head(k);
    }
    return pacf;
}

inline Index default_burn_in(ArmaOrder order) { return 10 * order.parameter_count() + 100; }

/// Gaussian ARMA sample path, zero presample, first burn_in values dropped.
template <typename Scalar>
Vector<Scalar> simulate(const ArmaCoefficients<Scalar>& coeffs, Index n, Index burn_in, std::uint64_t seed) {
    if (n < 1) throw ArmaError("simulation length must be positive");
    if (burn_in < 0) throw ArmaError("burn-in must be nonnegative");
    if (!is_stationary(coeffs.phi)) throw ArmaError("simulation requires stationarity");
    if (!(coeffs.sigma2 > Scalar(0))) throw ArmaError("sigma2 must be positive");

    const Index p = coeffs.phi.size();
    const Index q = coeffs.theta.size();
    const Index total = n + burn_in;

    std::mt19937_64 rng(seed);
    std::normal_distribution<Scalar> normal(Scalar(0), std::sqrt(coeffs.sigma2));

    Vector<Scalar> y(total);
    Vector<Scalar> e(total);
    for (Index t = 0; t < total; ++t) {
        e(t) = normal(rng);
        Scalar v = e(t);
        for (Index i = 1; i <= std::min(p, t); ++i) v += coeffs.phi(i - 1) * y(t - i);
        for (Index j = 1; j <= std::min(q, t); ++j) v -= coeffs.theta(j - 1) * e(t - j);
        y(t) = v;
    }
    return y.tail(n);
}

template <typename Scalar>
Vector<Scalar> simulate(const ArmaCoefficients<Scalar>& coeffs, Index n, std::uint64_t seed) {
    return simulate(coeffs, n, default_burn_in(coeffs.order()), seed);
}

/// e_t = y_t - sum phi_i y_{t-i} + sum theta_j e_{t-j}, presample y and e zero.
template <typename Scalar, typename Derived>
Vector<Scalar> residuals_css(const ArmaCoefficients<Scalar>& coeffs, const Eigen::MatrixBase<Derived>& y) {
    const Index p = coeffs.phi.size();
    const Index q = coeffs.theta.size();
    const Index n = y.size();
    if (n < p + 1) throw ArmaError("series shorter than AR order + 1");

    Vector<Scalar> e(n);
    const Index warm = std::min(n, std::max(p, q));
    for (Index t = 0; t < warm; ++t) {
        Scalar v = y(t);
        for (Index i = 1; i <= std::min(p, t); ++i) v -= coeffs.phi(i - 1) * y(t - i);
        for (Index j = 1; j <= std::min(q, t); ++j) v += coeffs.theta(j - 1) * e(t - j);
        e(t) = v;
    }
    const Scalar* phi = coeffs.phi.data();
    const Scalar* theta = coeffs.theta.data();
    for (Index t = warm; t < n; ++t) {
        Scalar v = y(t);
        for (Index i = 0; i < p; ++i) v -= phi[i] * y(t - 1 - i);
        for (Index j = 0; j < q; ++j) v += theta[j] * e(t - 1 - j);
        e(t) = v;
    }
    return e;
}

/// psi_0..psi_{count-1} of the MA(infinity) form y_t = sum psi_j e_{t-j}.
template <typename Scalar>
Vector<Scalar> psi_weights(const ArmaCoefficients<Scalar>& coeffs, Index count) {
    const Index p = coeffs.phi.size();
    const Index q = coeffs.theta.size();
    Vector<Scalar> psi = Vector<Scalar>::Zero(count);
    for (Index j = 0; j < count; ++j) {
        Scalar v = j == 0 ? Scalar(1) : (j <= q ? -coeffs.theta(j - 1) : Scalar(0));
        for (Index i = 1; i <= std::min(p, j); ++i) v += coeffs.phi(i - 1) * psi(j - i);
        psi(j) = v;
    }
    return psi;
}

/// gamma(0..max_lag) of the stationary process.  Solves the moment equations
///   gamma(k) - sum_i phi_i gamma(|k-i|) = sigma2 * sum_{j=k}^{q} b_j psi_{j-k},  k = 0..max(p,q)
/// (b_0 = 1, b_j = -theta_j) and extends with the AR recursion beyond.
template <typename Scalar>
Vector<Scalar> theoretical_acvf(const ArmaCoefficients<Scalar>& coeffs, Index max_lag) {
    if (max_lag < 0) throw ArmaError("max_lag must be nonnegative");
    if (!is_stationary(coeffs.phi)) throw ArmaError("autocovariance requires stationarity");

    const Index p = coeffs.phi.size();
    const Index q = coeffs.theta.size();
    const Index m = std::max(p, q);
    const Vector<Scalar> psi = psi_weights(coeffs, q + 1);
    auto ma = [&](Index j) { return j == 0 ? Scalar(1) : -coeffs.theta(j - 1); };

    Matrix<Scalar> lhs = Matrix<Scalar>::Identity(m + 1, m + 1);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(m + 1);
    for (Index k = 0; k <= m; ++k) {
        for (Index i = 1; i <= p; ++i) lhs(k, std::abs(k - i)) -= coeffs.phi(i - 1);
        for (Index j = k; j <= q; ++j) rhs(k) += ma(j) * psi(j - k);
    }
    rhs *= coeffs.sigma2;
    const Vector<Scalar> head = lhs.fullPivLu().solve(rhs);

    Vector<Scalar> gamma(max_lag + 1);
    for (Index h = 0; h <= max_lag; ++h) {
        if (h <= m) {
            gamma(h) = head(h);
        } else {
            Scalar v(0);
            for (Index i = 1; i <= p; ++i) v += coeffs.phi(i - 1) * gamma(h - i);
            gamma(h) = v;
        }
    }
    return gamma;
}

}  // namespace mmlarma
