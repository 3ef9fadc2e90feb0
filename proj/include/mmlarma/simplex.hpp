#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace mmlarma {

template <typename Scalar>
struct SimplexResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Scalar value;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead with standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2).  Stops when the spread of vertex values
/// falls below tolerance * max(1, |f_best|).  Non-finite objective values are
/// treated as +infinity.
template <typename Scalar, typename Objective>
SimplexResult<Scalar> nelder_mead(Objective&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& start,
                                  Scalar step, int max_iterations, Scalar tolerance) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = start.size();
    auto eval = [&](const Vec& x) {
        const Scalar v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<Scalar>::infinity();
    };

    SimplexResult<Scalar> result;
    if (n == 0) {
        result.x = start;
        result.value = eval(start);
        result.converged = true;
        return result;
    }

    const Scalar expand(2);
    const Scalar contract(0.5);
    const Scalar shrink(0.5);

    std::vector<Vec> vertex(n + 1, start);
    for (Eigen::Index i = 0; i < n; ++i) vertex[i + 1](i) += step;
    std::vector<Scalar> value(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) value[i] = eval(vertex[i]);

    std::vector<Eigen::Index> order(n + 1);
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), Eigen::Index(0));
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
        const Eigen::Index best = order.front();
        const Eigen::Index worst = order.back();
        const Eigen::Index second = order[n - 1];

        const Scalar spread = value[worst] - value[best];
        if (std::isfinite(value[worst]) && spread <= tolerance * std::max(Scalar(1), std::abs(value[best]))) {
            result.converged = true;
            break;
        }

        Vec centroid = Vec::Zero(n);
        for (Eigen::Index i = 0; i <= n; ++i)
            if (i != worst) centroid += vertex[i];
        centroid /= static_cast<Scalar>(n);

        const Vec reflected = centroid + (centroid - vertex[worst]);
        const Scalar f_reflected = eval(reflected);
        if (f_reflected < value[best]) {
            const Vec expanded = centroid + expand * (centroid - vertex[worst]);
            const Scalar f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                vertex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < value[second]) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
            continue;
        }

        const bool outside = f_reflected < value[worst];
        const Vec contracted = outside ? Vec(centroid + contract * (reflected - centroid))
                                       : Vec(centroid + contract * (vertex[worst] - centroid));
        const Scalar f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : value[worst])) {
            vertex[worst] = contracted;
            value[worst] = f_contracted;
            continue;
        }

        for (Eigen::Index i = 0; i <= n; ++i) {
            if (i == best) continue;
            vertex[i] = vertex[best] + shrink * (vertex[i] - vertex[best]);
            value[i] = eval(vertex[i]);
        }
    }

    const auto best_it = std::min_element(value.begin(), value.end());
    const auto best = static_cast<std::size_t>(best_it - value.begin());
    result.x = vertex[best];
    result.value = value[best];
    result.iterations = iter;
    return result;
}

}  // namespace mmlarma
