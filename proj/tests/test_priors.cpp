#include "doctest.h"

#include "onebit/oracles.hpp"
#include "onebit/priors.hpp"

#include <cmath>
#include <stdexcept>

using namespace onebit;
namespace val = onebit::validation;

namespace {

Vec one(double v) { return Vec::Constant(1, v); }

val::OracleParams denoiser_params(double lambda, double v_x, double r_hat, double tau) {
    val::OracleParams p;
    p.lambda = lambda;
    p.v_x = v_x;
    p.r_hat = r_hat;
    p.tau = tau;
    return p;
}

}  // namespace

TEST_CASE("signal prior") {
    CHECK_NOTHROW(SignalPrior(1.0, 2.0));
    CHECK_THROWS_AS(SignalPrior(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(SignalPrior(1.2, 2.0), std::domain_error);
    CHECK_THROWS_AS(SignalPrior(0.3, 0.0), std::domain_error);
    CHECK(SignalPrior(0.2, 5.0).variance() == doctest::Approx(1.0));
}

TEST_CASE("Bernoulli-Gaussian denoiser") {
    SUBCASE("Gaussian limit") {
        const SignalPrior prior(1.0 - 1e-12, 3.0);
        const DenoiserOutput d = bg_denoise(one(1.7), one(0.6), prior);
        CHECK(std::abs(d.mean[0] - 3.0 * 1.7 / 3.6) <= 1e-6);
    }
    SUBCASE("oracle") {
        const SignalPrior prior(0.15, 5.5);
        const DenoiserOutput d = bg_denoise(one(1.0), one(0.4), prior);
        const val::OracleMoments o = val::oracle_moments(val::PosteriorKind::BG, denoiser_params(0.15, 5.5, 1.0, 0.4));
        CHECK(std::abs(d.mean[0] - o.first) <= 1e-8);
        CHECK(std::abs(d.variance[0] - o.variance()) <= 1e-8);
    }
    SUBCASE("odd in r_hat") {
        const SignalPrior prior(0.3, 2.0);
        const DenoiserOutput a = bg_denoise(one(0.9), one(0.5), prior);
        const DenoiserOutput b = bg_denoise(one(-0.9), one(0.5), prior);
        CHECK(a.mean[0] == -b.mean[0]);
        CHECK(a.variance[0] == b.variance[0]);
    }
    CHECK_THROWS_AS(bg_denoise(one(0.0), one(0.0), SignalPrior(0.1, 1.0)), std::domain_error);
    CHECK_THROWS(bg_denoise(Vec::Zero(2), Vec::Ones(3), SignalPrior(0.1, 1.0)));
}

TEST_CASE("Laplacian side-information denoiser") {
    const SignalPrior prior(0.1, 5.5);
    SUBCASE("symmetric case") {
        const DenoiserOutput d = laplacian_si_denoise(one(0.0), one(0.8), prior, {one(0.0), 0.4});
        CHECK(std::abs(d.mean[0]) < 1e-15);
    }
    SUBCASE("flat side information") {
        const Vec r = (Vec(3) << 0.3, -2.0, 4.5).finished();
        const Vec t = (Vec(3) << 0.5, 1.0, 0.2).finished();
        const Vec xt = (Vec(3) << 1.0, 0.0, -3.0).finished();
        const DenoiserOutput a = laplacian_si_denoise(r, t, prior, {xt, 1e8});
        const DenoiserOutput b = bg_denoise(r, t, prior);
        CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() <= 1e-4);
        CHECK((a.variance - b.variance).cwiseAbs().maxCoeff() <= 1e-4);
    }
    SUBCASE("oracle") {
        const DenoiserOutput d = laplacian_si_denoise(one(0.6), one(0.5), prior, {one(2.0), 0.3});
        val::OracleParams p = denoiser_params(0.1, 5.5, 0.6, 0.5);
        p.x_tilde = 2.0;
        p.v_s = 0.3;
        const val::OracleMoments o = val::oracle_moments(val::PosteriorKind::BgLaplace, p);
        CHECK(std::abs(d.mean[0] - o.first) <= 1e-7);
        CHECK(std::abs(d.variance[0] - o.variance()) <= 1e-7);
    }
    SUBCASE("mixture weights") {
        const LaplacePosterior l = laplacian_si_posterior(0.6, 0.5, prior, 2.0, 0.3);
        CHECK(l.w_spike + l.w_below + l.w_above == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(l.mean_below <= 2.0);
        CHECK(l.mean_above >= 2.0);
    }
    CHECK_THROWS_AS(laplacian_si_denoise(one(0.0), one(0.5), prior, {one(0.0), 0.0}), std::domain_error);
    CHECK_THROWS_AS(laplacian_si_denoise(one(0.0), one(-1.0), prior, {one(0.0), 1.0}), std::domain_error);
}

TEST_CASE("Gaussian side-information denoiser") {
    const SignalPrior prior(0.1, 5.5);
    SUBCASE("flat side information") {
        const Vec r = (Vec(2) << 1.2, -0.4).finished();
        const Vec t = (Vec(2) << 0.3, 2.0).finished();
        const Vec xt = (Vec(2) << -1.0, 2.0).finished();
        const DenoiserOutput a = gaussian_si_denoise(r, t, prior, {xt, 1e8});
        const DenoiserOutput b = bg_denoise(r, t, prior);
        CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() <= 1e-4);
    }
    SUBCASE("oracle") {
        const DenoiserOutput d = gaussian_si_denoise(one(-0.3), one(0.7), prior, {one(1.4), 0.2});
        val::OracleParams p = denoiser_params(0.1, 5.5, -0.3, 0.7);
        p.x_tilde = 1.4;
        p.v_s = 0.2;
        const val::OracleMoments o = val::oracle_moments(val::PosteriorKind::BgGauss, p);
        CHECK(std::abs(d.mean[0] - o.first) <= 1e-8);
        CHECK(std::abs(d.variance[0] - o.variance()) <= 1e-8);
    }
    CHECK_THROWS_AS(gaussian_si_denoise(one(0.0), one(0.5), prior, {one(0.0), -1.0}), std::domain_error);
}

TEST_CASE("support side-information denoiser") {
    const SignalPrior prior(0.1, 5.5);
    SUBCASE("oracle") {
        SignVec xt(1);
        xt << 1;
        const DenoiserOutput d = support_si_denoise(one(1.1), one(0.6), prior, {xt, 0.9});
        val::OracleParams p = denoiser_params(0.1, 5.5, 1.1, 0.6);
        p.x_tilde = 1.0;
        p.beta = 0.9;
        const val::OracleMoments o = val::oracle_moments(val::PosteriorKind::BgSupport, p);
        CHECK(std::abs(d.mean[0] - o.first) <= 1e-9);
        CHECK(std::abs(d.variance[0] - o.variance()) <= 1e-9);
    }
    SUBCASE("coin-flip labels") {
        SignVec xt(2);
        xt << 1, -1;
        const Vec r = (Vec(2) << 0.7, -2.2).finished();
        const Vec t = (Vec(2) << 0.4, 0.9).finished();
        const DenoiserOutput a = support_si_denoise(r, t, prior, {xt, 0.5 + 1e-9});
        const DenoiserOutput b = bg_denoise(r, t, prior);
        CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() <= 1e-7);
    }
    SignVec bad(1);
    bad << 0;
    CHECK_THROWS(support_si_denoise(one(0.0), one(1.0), prior, {bad, 0.9}));
    SignVec ok(1);
    ok << 1;
    CHECK_THROWS(support_si_denoise(one(0.0), one(1.0), prior, {ok, 0.4}));
}

TEST_CASE("denoise dispatch") {
    const SignalPrior prior(0.2, 2.0);
    const Vec r = (Vec(2) << 0.5, -1.5).finished();
    const Vec t = (Vec(2) << 0.3, 0.3).finished();
    const DenoiserOutput a = denoise(r, t, prior, NoSideInfo{});
    const DenoiserOutput b = bg_denoise(r, t, prior);
    CHECK(a.mean == b.mean);
    CHECK_THROWS(validate_side_info(AmplitudeGaussian{Vec::Zero(3), 1.0}, 2));
}
