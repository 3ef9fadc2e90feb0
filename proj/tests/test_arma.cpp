#include <doctest.h>

#include <random>

#include "mmlarma/arma.hpp"
#include "oracles.hpp"

using namespace mmlarma;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Eigen::VectorXd random_stationary(int p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    Eigen::VectorXd pacf(p);
    for (int i = 0; i < p; ++i) pacf(i) = u(rng);
    return pacf_to_ar(pacf);
}

}  // namespace

TEST_CASE("ArmaOrder validation and formatting") {
    CHECK(ArmaOrder{2, 1}.parameter_count() == 4);
    CHECK(to_string(ArmaOrder{3, 0}) == "(3,0)");
    const ArmaOrder negative{-1, 0};
    const ArmaOrder empty{0, 0};
    CHECK_THROWS_AS(negative.validate(), ArmaError);
    CHECK_THROWS_AS(empty.validate(false), ArmaError);
    CHECK_NOTHROW(empty.validate(true));
}

TEST_CASE("polynomial roots") {
    auto r1 = polynomial_roots(LagPolynomial<double>{vec({0.5})});
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].real() == doctest::Approx(2.0));

    auto r2 = polynomial_roots(LagPolynomial<double>{vec({0.0, 0.25})});
    REQUIRE(r2.size() == 2);
    for (auto z : r2) CHECK(std::abs(z) == doctest::Approx(2.0));
    CHECK(r2[0].real() + r2[1].real() == doctest::Approx(0.0).epsilon(1e-12));

    auto r3 = polynomial_roots(LagPolynomial<double>{vec({1.2})});
    CHECK(std::abs(r3[0]) == doctest::Approx(1.0 / 1.2));

    SUBCASE("trailing zeros reduce the degree") {
        CHECK(polynomial_roots(LagPolynomial<double>{vec({0.5, 0.0, 0.0})}).size() == 1);
        CHECK(polynomial_roots(LagPolynomial<double>{vec({0.0, 0.0})}).empty());
    }
    SUBCASE("roots satisfy the polynomial") {
        const LagPolynomial<double> poly{vec({0.3, -0.2, 0.45, 0.1})};
        for (auto z : polynomial_roots(poly)) CHECK(std::abs(poly(z)) < 1e-9);
    }
}

TEST_CASE("stationarity and invertibility") {
    CHECK(is_stationary(vec({0.5})));
    CHECK_FALSE(is_stationary(vec({1.0})));
    CHECK_FALSE(is_stationary(vec({0.5, 0.6})));
    CHECK(is_stationary(Eigen::VectorXd()));
    CHECK(is_invertible(vec({-0.9})));
    CHECK_FALSE(is_invertible(vec({1.0 + 1e-10})));

    SUBCASE("margin excludes near-unit roots") {
        CHECK_FALSE(is_stationary(vec({1.0 - 1e-9})));
        CHECK(is_stationary(vec({1.0 - 1e-6})));
        CHECK_FALSE(is_stationary(vec({1.0 - 1e-6}), 1e-3));
    }
    SUBCASE("agrees with root moduli and the PACF map") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 2000; ++trial) {
            const int p = 1 + trial % 5;
            Eigen::VectorXd phi(p);
            for (int i = 0; i < p; ++i) phi(i) = u(rng) / (i + 1);
            const bool via_roots = oracle::roots_outside(phi);
            bool via_pacf = true;
            try {
                const Eigen::VectorXd pacf = ar_to_pacf(phi);
                via_pacf = (pacf.array().abs() < 1.0).all();
            } catch (const ArmaError&) {
                via_pacf = false;
            }
            CHECK(via_roots == via_pacf);
            if (via_roots) {
                double r_min = 1e300;
                for (auto z : polynomial_roots(LagPolynomial<double>{phi})) r_min = std::min(r_min, std::abs(z));
                if (r_min > 1.0 + 1e-6) CHECK(is_stationary(phi));
            } else {
                CHECK_FALSE(is_stationary(phi));
            }
        }
    }
}

TEST_CASE("PACF maps") {
    CHECK(pacf_to_ar(vec({0.5}))(0) == doctest::Approx(0.5));
    CHECK(pacf_to_ar(vec({0.0, 0.0})).isZero());
    const Eigen::VectorXd phi = pacf_to_ar(vec({0.5, 0.4}));
    CHECK(phi(0) == doctest::Approx(0.3));
    CHECK(phi(1) == doctest::Approx(0.4));
    CHECK_THROWS_AS(pacf_to_ar(vec({1.0})), ArmaError);
    CHECK_THROWS_WITH_AS(ar_to_pacf(vec({0.5, 0.6})), "not stationary", ArmaError);

    SUBCASE("round trip on random stationary vectors") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-0.999, 0.999);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int p = 1 + trial % 5;
            Eigen::VectorXd pacf(p);
            for (int i = 0; i < p; ++i) pacf(i) = u(rng);
            const Eigen::VectorXd ar = pacf_to_ar(pacf);
            CHECK(is_stationary(ar, 0.0));
            worst = std::max(worst, (pacf_to_ar(ar_to_pacf(ar)) - ar).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("residuals_css") {
    const ArmaCoefficients<double> wn{{}, {}, 1.0};
    CHECK(residuals_css(wn, vec({1, 2, 3})) == vec({1, 2, 3}));

    const ArmaCoefficients<double> ar{vec({0.5}), {}, 1.0};
    const Eigen::VectorXd e1 = residuals_css(ar, vec({1, 0.5, 0.25}));
    CHECK(e1(0) == doctest::Approx(1.0));
    CHECK(e1(1) == doctest::Approx(0.0));
    CHECK(e1(2) == doctest::Approx(0.0));

    const ArmaCoefficients<double> arma{vec({0.5}), vec({0.4}), 1.0};
    const Eigen::VectorXd e2 = residuals_css(arma, vec({1, 1, 1}));
    CHECK(e2(0) == doctest::Approx(1.0));
    CHECK(e2(1) == doctest::Approx(0.9));
    CHECK(e2(2) == doctest::Approx(0.86));

    CHECK_THROWS_AS(residuals_css(ArmaCoefficients<double>{vec({0.1, 0.1}), {}, 1.0}, vec({1, 2})), ArmaError);

    SUBCASE("inverts the simulation recursion") {
        // Without burn-in the zero-presample recursion recovers the innovations
        // exactly; compare against a replay with the same generator.
        const ArmaCoefficients<double> c{vec({0.6, -0.2}), vec({0.3, 0.25}), 2.0};
        const Eigen::VectorXd y = simulate(c, 200, 0, 42);
        std::mt19937_64 rng(42);
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0));
        const Eigen::VectorXd e = residuals_css(c, y);
        for (Index t = 0; t < 200; ++t) CHECK(e(t) == doctest::Approx(normal(rng)).epsilon(1e-9));
    }
}

TEST_CASE("simulate") {
    SUBCASE("white noise moments") {
        const Eigen::VectorXd y = simulate(ArmaCoefficients<double>{{}, {}, 1.0}, 100000, 1);
        CHECK(std::abs(y.mean()) < 4.0 / std::sqrt(1e5));
        CHECK(y.squaredNorm() / 1e5 == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("AR(1) lag-one autocorrelation") {
        const Eigen::VectorXd y = simulate(ArmaCoefficients<double>{vec({0.5}), {}, 1.0}, 100000, 2);
        const auto g = oracle::sample_acvf(y, 1);
        CHECK(std::abs(g(1) / g(0) - 0.5) < 0.02);
    }
    SUBCASE("MA(1) lag-one autocorrelation uses the minus sign") {
        const Eigen::VectorXd y = simulate(ArmaCoefficients<double>{{}, vec({0.4}), 1.0}, 100000, 3);
        const auto g = oracle::sample_acvf(y, 1);
        CHECK(std::abs(g(1) / g(0) + 0.4 / 1.16) < 0.02);
    }
    SUBCASE("determinism and errors") {
        const ArmaCoefficients<double> c{vec({0.3}), vec({0.2}), 1.0};
        CHECK(simulate(c, 50, 9) == simulate(c, 50, 9));
        CHECK(simulate(c, 50, 9) != simulate(c, 50, 10));
        CHECK(default_burn_in(ArmaOrder{1, 1}) == 130);
        CHECK_THROWS_WITH_AS(simulate(ArmaCoefficients<double>{vec({1.0}), {}, 1.0}, 10, 1),
                             "simulation requires stationarity", ArmaError);
    }
}

TEST_CASE("theoretical autocovariance") {
    const Eigen::VectorXd ar = theoretical_acvf(ArmaCoefficients<double>{vec({0.5}), {}, 1.0}, 2);
    CHECK(ar(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(ar(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(ar(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const Eigen::VectorXd ma = theoretical_acvf(ArmaCoefficients<double>{{}, vec({0.4}), 1.0}, 2);
    CHECK(ma(0) == doctest::Approx(1.16).epsilon(1e-12));
    CHECK(ma(1) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(std::abs(ma(2)) < 1e-15);

    // gamma(0) = (1 + theta^2 - 2 phi theta) / (1 - phi^2), gamma(1) = (1 - phi theta)(phi - theta) / (1 - phi^2)
    const Eigen::VectorXd arma = theoretical_acvf(ArmaCoefficients<double>{vec({0.5}), vec({0.4}), 1.0}, 1);
    CHECK(arma(0) == doctest::Approx(0.76 / 0.75).epsilon(1e-12));
    CHECK(arma(1) == doctest::Approx(0.8 * 0.1 / 0.75).epsilon(1e-12));

    CHECK_THROWS_AS(theoretical_acvf(ArmaCoefficients<double>{vec({1.1}), {}, 1.0}, 3), ArmaError);

    SUBCASE("agrees with a long psi-weight sum") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 50; ++trial) {
            const int p = trial % 4;
            const int q = (trial / 4) % 4;
            const ArmaCoefficients<double> c{random_stationary(p, rng), random_stationary(q, rng), 1.3};
            const Eigen::VectorXd psi = psi_weights(c, 4000);
            const Eigen::VectorXd g = theoretical_acvf(c, 6);
            for (Index h = 0; h <= 6; ++h) {
                const double ref = c.sigma2 * psi.head(4000 - h).dot(psi.tail(4000 - h));
                CHECK(g(h) == doctest::Approx(ref).epsilon(1e-9).scale(g(0)));
            }
        }
    }
    SUBCASE("AR recursion holds beyond q") {
        const ArmaCoefficients<double> c{vec({0.4, 0.2, -0.1}), vec({0.5}), 1.0};
        const Eigen::VectorXd g = theoretical_acvf(c, 30);
        for (Index h = 2; h <= 30; ++h) {
            const double rec = 0.4 * g(h - 1) + 0.2 * g(h - 2) - 0.1 * g(std::abs(h - 3));
            CHECK(std::abs(g(h) - rec) < 1e-10);
        }
    }
    SUBCASE("sample autocovariance converges") {
        const ArmaCoefficients<double> c{vec({0.5}), vec({0.4}), 1.0};
        const Eigen::VectorXd y = simulate(c, 1000000, 77);
        const Eigen::VectorXd g = theoretical_acvf(c, 5);
        const Eigen::VectorXd s = oracle::sample_acvf(y, 5);
        CHECK((g - s).cwiseAbs().maxCoeff() < 0.02 * g(0));
    }
}
