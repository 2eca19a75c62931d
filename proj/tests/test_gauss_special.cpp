#include "doctest.h"

#include "onebit/gauss_special.hpp"
#include "onebit/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace onebit;
namespace val = onebit::validation;

TEST_CASE("standard normal pdf") {
    CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
    CHECK(std_normal_pdf(1.0) == std_normal_pdf(-1.0));
    // mpmath: npdf(10) = 7.69459862670641934e-23
    const double p10 = std_normal_pdf(10.0);
    CHECK(p10 > 0.0);
    CHECK(p10 < 1e-21);
    CHECK(p10 == doctest::Approx(7.69459862670641934e-23).epsilon(1e-13));
    CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    for (double x : {0.1, 0.7, 1.9, 3.3, 6.0}) {
        CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-15);
    }
    // mpmath: ncdf(-8) = 6.22096057427178412e-16
    CHECK(std::abs(std_normal_cdf(-8.0) - 6.2210e-16) <= 1e-19);
    CHECK(std_normal_cdf(-8.0) == doctest::Approx(6.22096057427178412e-16).epsilon(1e-13));
    CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("log cdf and inverse Mills ratio in the far tail") {
    // mpmath at 30 digits.
    CHECK(log_std_normal_cdf(-10.0) == doctest::Approx(-53.2312851505124706).epsilon(1e-14));
    CHECK(log_std_normal_cdf(-40.0) == doctest::Approx(-804.608442013753788).epsilon(1e-14));
    CHECK(inverse_mills_ratio(-10.0) == doctest::Approx(10.0980932339625120).epsilon(1e-13));
    CHECK(inverse_mills_ratio(-100.0) == doctest::Approx(100.009998000999).epsilon(1e-13));
    // Continuity across the switch to the continued fraction.
    const double below = log_std_normal_cdf(std::nextafter(-5.0, -6.0));
    const double above = log_std_normal_cdf(-5.0);
    CHECK(std::abs(below - above) < 1e-13);
    CHECK(std::isfinite(log_std_normal_cdf(-1e5)));
    CHECK(log_std_normal_cdf(9.0) < 0.0);
}

TEST_CASE("probit-Gaussian integrals") {
    const ProbitMoments m = probit_gauss_moments(1.0, 0.0, 1.0);
    CHECK(m.pi0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.pi1 == doctest::Approx(0.2820947918).epsilon(1e-10));

    const ProbitMoments c = probit_gauss_moments(0.5, 1.3, 2.0);
    const ProbitMoments o = val::oracle_probit_integrals(0.5, 1.3, 2.0);
    CHECK(std::abs(c.pi0 - o.pi0) <= 1e-8);
    CHECK(std::abs(c.pi1 - o.pi1) <= 1e-8);
    CHECK(std::abs(c.pi2 - o.pi2) <= 1e-8);

    SUBCASE("noiseless limit is the truncated Gaussian") {
        const ProbitMoments s = probit_gauss_moments(0.0, -0.4, 1.7);
        const TruncMoments t = trunc_gauss_moments(0.0, 0.4, 1.7);
        // z > 0 under N(-0.4, 1.7) mirrors to x < 0 under N(0.4, 1.7).
        CHECK(s.pi0 == doctest::Approx(t.i0).epsilon(1e-12));
        CHECK(s.pi1 == doctest::Approx(-t.i1).epsilon(1e-12));
        CHECK(s.pi2 == doctest::Approx(t.i2).epsilon(1e-12));
    }

    CHECK_THROWS_AS(probit_gauss_moments(1.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(probit_gauss_moments(1.0, 0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(probit_gauss_moments(-1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("truncated Gaussian integrals") {
    const double m = 0.8;
    const double tau = 1.3;
    const TruncMoments full = trunc_gauss_moments(m + 40.0 * std::sqrt(tau), m, tau);
    CHECK(std::abs(full.i0 - 1.0) <= 1e-12);
    CHECK(std::abs(full.i1 - m) <= 1e-12);
    CHECK(std::abs(full.i2 - (m * m + tau)) <= 1e-12);

    CHECK(trunc_gauss_moments(0.0, 0.0, 1.0).i1 == doctest::Approx(-0.3989422804).epsilon(1e-10));

    const TruncMoments c = trunc_gauss_moments(1.7, -0.4, 2.3);
    const TruncMoments o = val::oracle_trunc_integrals(1.7, -0.4, 2.3);
    CHECK(std::abs(c.i0 - o.i0) <= 1e-8);
    CHECK(std::abs(c.i1 - o.i1) <= 1e-8);
    CHECK(std::abs(c.i2 - o.i2) <= 1e-8);

    SUBCASE("deep lower tail keeps a finite conditional") {
        const TruncatedNormal t = truncate_above(-30.0, 0.0, 1.0);
        CHECK(t.mean <= -30.0);
        CHECK(t.mean > -30.1);
        CHECK(t.variance > 0.0);
        CHECK(t.variance < 1.2e-3);
        CHECK(std::isfinite(t.log_mass));
    }
    CHECK_THROWS_AS(trunc_gauss_moments(0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("Gaussian product") {
    const GaussProduct s = gauss_product({0.0, 1.0}, {0.0, 1.0});
    // Integral of N(x;0,1)^2 by mpmath quadrature: 0.282094791773878.
    CHECK(s.scale == doctest::Approx(0.2820947918).epsilon(1e-10));
    CHECK(s.prod.mean == 0.0);
    CHECK(s.prod.variance == doctest::Approx(0.5));

    const GaussProduct f = gauss_product({2.0, 1.0}, {0.0, 3.0});
    CHECK(f.prod.mean == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(f.prod.variance == doctest::Approx(0.75).epsilon(1e-15));

    SUBCASE("grid integration") {
        const GaussParams a{0.7, 0.2};
        const GaussParams b{-1.1, 5.0};
        const GaussProduct p = gauss_product(a, b);
        // Midpoint rule on [-6, 6]; the product is negligible outside.
        const int n = 200000;
        const double h = 12.0 / n;
        double lhs = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = -6.0 + (i + 0.5) * h;
            lhs += std::exp(log_normal_pdf(x, a.mean, a.variance) + log_normal_pdf(x, b.mean, b.variance)) * h;
        }
        CHECK(std::abs(lhs - p.scale) <= 1e-9);
    }
    CHECK_THROWS_AS(gauss_product({0.0, 0.0}, {0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(gauss_product({0.0, 1.0}, {0.0, -2.0}), std::domain_error);
}

TEST_CASE("log-sum-exp and weight normalization") {
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> none{};
    CHECK(log_sum_exp(none) == -std::numeric_limits<double>::infinity());

    std::vector<double> w{-800.0, -800.0 + std::log(3.0)};
    const double lz = normalize_log_weights(w);
    CHECK(w[0] == doctest::Approx(0.25));
    CHECK(w[1] == doctest::Approx(0.75));
    CHECK(lz == doctest::Approx(-800.0 + std::log(4.0)));
}
