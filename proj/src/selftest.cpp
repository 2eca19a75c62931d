#include "onebit/validation.hpp"

#include "onebit/channel.hpp"
#include "onebit/em.hpp"
#include "onebit/gamp.hpp"
#include "onebit/gauss_special.hpp"
#include "onebit/oracles.hpp"
#include "onebit/priors.hpp"
#include "onebit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace onebit::validation {

namespace {

// Magnitudes below this are treated as underflow on both sides.
constexpr double kTiny = 1e-280;

class Tally {
public:
    Tally(std::string name, double tol) { r_.name = std::move(name), r_.tolerance = tol; }

    void compare(double got, double want, double scale) {
        const double err = std::abs(got - want) / std::max(std::abs(scale), kTiny);
        note(err);
    }
    void note(double err) {
        if (std::isnan(err) || err > r_.tolerance) ++r_.failures;
        if (!(err <= r_.worst_error)) r_.worst_error = err;
    }
    void require(bool ok) {
        if (!ok) ++r_.failures;
    }
    void next_case() { ++r_.cases; }
    void skip() { ++r_.skipped; }
    CheckResult done() const { return r_; }

private:
    CheckResult r_;
};

struct Draw {
    Rng rng;
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int sign() { return std::bernoulli_distribution(0.5)(rng) ? 1 : -1; }
};

struct DenoiserDraw {
    OracleParams p;
    SignalPrior prior{0.1, 1.0};
};

DenoiserDraw draw_denoiser(Draw& d) {
    DenoiserDraw out;
    out.p.lambda = d.uniform(0.05, 0.5);
    out.p.v_x = d.uniform(0.5, 10.0);
    out.p.tau = d.log_uniform(0.01, 5.0);
    out.p.r_hat = d.uniform(-10.0, 10.0);
    out.p.x_tilde = d.uniform(-10.0, 10.0);
    out.p.v_s = d.log_uniform(0.05, 5.0);
    out.p.beta = d.uniform(0.6, 1.0);
    out.prior = SignalPrior(out.p.lambda, out.p.v_x);
    return out;
}

// A closed-form posterior against oracle_moments: log Z, mean, variance.
template <typename Closed>
void compare_posterior(Tally& t, PosteriorKind kind, const OracleParams& p, Closed&& closed) {
    const OracleMoments o = oracle_moments(kind, p);
    const ScalarPosterior c = closed();
    t.compare(c.log_norm, o.log_z, 1.0);
    t.compare(c.mean, o.first, o.abs_first);
    t.compare(c.variance, o.variance(), o.second);
    t.compare(c.variance + c.mean * c.mean, o.second, o.second);
}

CheckResult check_probit(std::uint64_t seed, int draws, double tol) {
    Tally t("probit integrals PI0 PI1 PI2", tol);
    Draw d{make_stream(seed, 101)};
    // Draws where the integrals underflow are skipped and replaced, so that
    // `draws` comparisons are actually made.
    for (int compared = 0, tries = 0; compared < draws && tries < 4 * draws; ++tries) {
        const double v = d.log_uniform(1e-3, 10.0);
        const double p_hat = d.uniform(-20.0, 20.0);
        const double tau = d.log_uniform(1e-3, 10.0);
        const ProbitMoments c = probit_gauss_moments(v, p_hat, tau);
        const ProbitMoments o = oracle_probit_integrals(v, p_hat, tau);
        if (o.pi0 < kTiny) {
            t.skip();
            t.require(c.pi0 < 1e-250);
            continue;
        }
        ++compared;
        t.next_case();
        const double scale1 = std::sqrt(o.pi0) * std::sqrt(o.pi2);
        t.compare(c.pi0, o.pi0, o.pi0);
        t.compare(c.pi1, o.pi1, scale1);
        t.compare(c.pi2, o.pi2, o.pi2);
    }
    return t.done();
}

CheckResult check_trunc(std::uint64_t seed, int draws, double tol) {
    Tally t("truncated Gaussian I0 I1 I2", tol);
    Draw d{make_stream(seed, 102)};
    // Draws where the integrals underflow are skipped and replaced, so that
    // `draws` comparisons are actually made.
    for (int compared = 0, tries = 0; compared < draws && tries < 4 * draws; ++tries) {
        const double upper = d.uniform(-10.0, 10.0);
        const double m = d.uniform(-10.0, 10.0);
        const double tau = d.log_uniform(0.01, 5.0);
        const TruncMoments c = trunc_gauss_moments(upper, m, tau);
        const TruncMoments o = oracle_trunc_integrals(upper, m, tau);
        if (o.i0 < kTiny) {
            t.skip();
            t.require(c.i0 < 1e-250);
            continue;
        }
        ++compared;
        t.next_case();
        t.compare(c.i0, o.i0, o.i0);
        t.compare(c.i1, o.i1, std::sqrt(o.i0) * std::sqrt(o.i2));
        t.compare(c.i2, o.i2, o.i2);
    }
    return t.done();
}

CheckResult check_channel(std::uint64_t seed, int draws, double tol) {
    Tally t("channel posterior of z", tol);
    Draw d{make_stream(seed, 103)};
    for (int i = 0; i < draws; ++i) {
        OracleParams p;
        p.y = d.sign();
        p.noise_var = d.log_uniform(1e-3, 10.0);
        p.tau = d.log_uniform(1e-2, 10.0);
        p.gamma = i % 4 == 0 ? 1.0 : d.uniform(0.55, 0.999);
        const double s = std::sqrt(p.noise_var + p.tau);
        p.r_hat = d.uniform(-std::min(10.0, 30.0 * s), std::min(10.0, 30.0 * s));
        t.next_case();
        const ChannelParams ch(p.noise_var, p.gamma);
        const PosteriorZ c = posterior_z_moments(p.y, p.r_hat, p.tau, ch);
        const OracleMoments o = oracle_moments(PosteriorKind::ProbitChannel, p);
        t.compare(std::log(c.z_norm), o.log_z, 1.0);
        t.compare(c.mean, o.first, o.abs_first);
        t.compare(c.second, o.second, o.second);
        t.compare(c.variance, o.variance(), o.second);
    }
    return t.done();
}

CheckResult check_bg(std::uint64_t seed, int draws, double tol) {
    Tally t("Bernoulli-Gaussian denoiser", tol);
    Draw d{make_stream(seed, 104)};
    for (int i = 0; i < draws; ++i) {
        const DenoiserDraw dd = draw_denoiser(d);
        t.next_case();
        compare_posterior(t, PosteriorKind::BG, dd.p,
                          [&] { return bg_posterior(dd.p.r_hat, dd.p.tau, dd.prior); });
    }
    return t.done();
}

CheckResult check_laplace(std::uint64_t seed, int draws, double tol) {
    Tally t("Laplacian side-information denoiser", tol);
    Draw d{make_stream(seed, 105)};
    for (int i = 0; i < draws; ++i) {
        const DenoiserDraw dd = draw_denoiser(d);
        t.next_case();
        compare_posterior(t, PosteriorKind::BgLaplace, dd.p, [&] {
            return laplacian_si_posterior(dd.p.r_hat, dd.p.tau, dd.prior, dd.p.x_tilde, dd.p.v_s).summary();
        });
    }
    return t.done();
}

CheckResult check_gauss(std::uint64_t seed, int draws, double tol) {
    Tally t("Gaussian side-information denoiser", tol);
    Draw d{make_stream(seed, 106)};
    for (int i = 0; i < draws; ++i) {
        const DenoiserDraw dd = draw_denoiser(d);
        t.next_case();
        compare_posterior(t, PosteriorKind::BgGauss, dd.p, [&] {
            return gaussian_si_posterior(dd.p.r_hat, dd.p.tau, dd.prior, dd.p.x_tilde, dd.p.v_s);
        });
    }
    return t.done();
}

CheckResult check_support(std::uint64_t seed, int draws, double tol) {
    Tally t("support side-information denoiser", tol);
    Draw d{make_stream(seed, 107)};
    for (int i = 0; i < draws; ++i) {
        DenoiserDraw dd = draw_denoiser(d);
        const int label = d.sign();
        dd.p.x_tilde = label;
        t.next_case();
        compare_posterior(t, PosteriorKind::BgSupport, dd.p, [&] {
            return support_si_posterior(dd.p.r_hat, dd.p.tau, dd.prior, label, dd.p.beta);
        });
    }
    return t.done();
}

CheckResult check_em_laplace(std::uint64_t seed, int draws, double tol) {
    Tally t("EM expectation E|x - x~| (Laplacian)", tol);
    Draw d{make_stream(seed, 108)};
    for (int i = 0; i < draws; ++i) {
        const DenoiserDraw dd = draw_denoiser(d);
        t.next_case();
        const double xt = dd.p.x_tilde;
        const double o = oracle_expectation(PosteriorKind::BgLaplace, dd.p, [xt](double x) { return std::abs(x - xt); });
        const double c = expected_abs_deviation(dd.p.r_hat, dd.p.tau, dd.prior, xt, dd.p.v_s);
        t.compare(c, o, o);
    }
    return t.done();
}

CheckResult check_em_gauss(std::uint64_t seed, int draws, double tol) {
    Tally t("EM expectation E(x - x~)^2 (Gaussian)", tol);
    Draw d{make_stream(seed, 109)};
    for (int i = 0; i < draws; ++i) {
        const DenoiserDraw dd = draw_denoiser(d);
        t.next_case();
        const double xt = dd.p.x_tilde;
        const double o =
            oracle_expectation(PosteriorKind::BgGauss, dd.p, [xt](double x) { return (x - xt) * (x - xt); });
        EmInputs in{Vec::Constant(1, dd.p.r_hat), Vec::Constant(1, dd.p.tau), Vec::Zero(1), dd.prior,
                    AmplitudeGaussian{Vec::Constant(1, xt), dd.p.v_s}};
        const ParamUpdate u = update_vs_gaussian(in);
        if (u.clamped) {
            t.skip();
            continue;
        }
        t.compare(u.value, o, o);
    }
    return t.done();
}

}  // namespace

std::vector<CheckResult> run_oracle_suite(std::uint64_t seed, int draws, double tolerance) {
    using Check = std::function<CheckResult(std::uint64_t, int, double)>;
    const std::vector<Check> checks{check_probit,  check_trunc,  check_channel,    check_bg,      check_laplace,
                                    check_gauss,   check_support, check_em_laplace, check_em_gauss};
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c(seed, draws, tolerance));
        } catch (const std::exception& e) {
            CheckResult r;
            r.name = std::string("oracle error: ") + e.what();
            r.failures = 1;
            r.tolerance = tolerance;
            out.push_back(r);
        }
    }
    return out;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Draw d{make_stream(seed, 201)};

    {
        Tally t("Phi(x) + Phi(-x) = 1 for |x| <= 8", 1e-14);
        for (int i = 0; i < 1000; ++i) {
            const double x = d.uniform(-8.0, 8.0);
            t.next_case();
            t.note(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0));
        }
        out.push_back(t.done());
    }
    {
        Tally t("truncated variance I2 - I1^2 / I0 >= 0", 0.0);
        for (int i = 0; i < 1000; ++i) {
            const double upper = d.uniform(-30.0, 30.0);
            const double mean = d.uniform(-30.0, 30.0);
            const double tau = d.log_uniform(1e-4, 100.0);
            const TruncMoments m = trunc_gauss_moments(upper, mean, tau);
            t.next_case();
            if (m.i0 <= 1e-300) {
                t.skip();
                continue;
            }
            t.require(m.i2 - m.i1 * m.i1 / m.i0 >= 0.0);
        }
        out.push_back(t.done());
    }
    {
        Tally t("Gaussian product identity", 1e-10);
        for (int i = 0; i < 100; ++i) {
            GaussParams a, b;
            a.mean = d.uniform(-5.0, 5.0);
            a.variance = d.log_uniform(0.01, 10.0);
            b.mean = d.uniform(-5.0, 5.0);
            b.variance = d.log_uniform(0.01, 10.0);
            const GaussProduct g = gauss_product(a, b);
            const double x = d.uniform(-5.0, 5.0);
            const double lhs = log_normal_pdf(x, a.mean, a.variance) + log_normal_pdf(x, b.mean, b.variance);
            const double rhs = g.log_scale + log_normal_pdf(x, g.prod.mean, g.prod.variance);
            t.next_case();
            t.note(std::abs(std::expm1(lhs - rhs)));
        }
        out.push_back(t.done());
    }
    {
        Tally t("likelihood(+1, z) + likelihood(-1, z) = 1", 1e-14);
        for (int i = 0; i < 1000; ++i) {
            const double v = i % 5 == 0 ? 0.0 : d.log_uniform(1e-3, 10.0);
            const ChannelParams ch(v, d.uniform(0.51, 1.0));
            const double z = d.uniform(-10.0, 10.0);
            t.next_case();
            t.note(std::abs(likelihood(1, z, ch) + likelihood(-1, z, ch) - 1.0));
        }
        out.push_back(t.done());
    }
    {
        // With flips the likelihood is not log-concave and the posterior
        // variance may exceed tau_p, so the upper bound is checked at gamma = 1 only.
        Tally t("channel posterior variance > 0, <= tau_p if gamma = 1", 0.0);
        for (int i = 0; i < 1000; ++i) {
            const double v = d.log_uniform(1e-3, 10.0);
            const double gamma = i % 2 == 0 ? 1.0 : d.uniform(0.51, 0.999);
            const ChannelParams ch(v, gamma);
            const double tau = d.log_uniform(1e-3, 10.0);
            const int y = d.sign();
            const double p_hat = d.uniform(-20.0, 20.0);
            const PosteriorZ z = posterior_z_moments(y, p_hat, tau, ch);
            t.next_case();
            t.require(z.variance > 0.0);
            if (gamma == 1.0) t.require(z.variance <= tau * (1.0 + 1e-12));
            t.require(z.z_norm >= ch.flip_prob() * (1.0 - 1e-12) && z.z_norm <= ch.gamma() * (1.0 + 1e-12));
        }
        out.push_back(t.done());
    }
    {
        Tally t("BG posterior mean is odd in r_hat", 0.0);
        for (int i = 0; i < 1000; ++i) {
            const double lambda = d.uniform(0.01, 0.99);
            const SignalPrior prior(lambda, d.uniform(0.1, 10.0));
            const double r = d.uniform(-20.0, 20.0);
            const double tau = d.log_uniform(1e-3, 10.0);
            t.next_case();
            t.require(bg_posterior(-r, tau, prior).mean == -bg_posterior(r, tau, prior).mean);
        }
        out.push_back(t.done());
    }
    {
        Tally t("uninformative side information matches BG", 1e-4);
        for (int i = 0; i < 500; ++i) {
            const double lambda = d.uniform(0.05, 0.5);
            const SignalPrior prior(lambda, d.uniform(0.5, 10.0));
            const double r = d.uniform(-10.0, 10.0);
            const double tau = d.log_uniform(0.01, 5.0);
            const double xt = d.uniform(-10.0, 10.0);
            const ScalarPosterior ref = bg_posterior(r, tau, prior);
            const ScalarPosterior lap = laplacian_si_posterior(r, tau, prior, xt, 1e8).summary();
            const ScalarPosterior gau = gaussian_si_posterior(r, tau, prior, xt, 1e8);
            const ScalarPosterior sup = support_si_posterior(r, tau, prior, d.sign(), 0.5 + 1e-9);
            t.next_case();
            for (const ScalarPosterior* p : {&lap, &gau, &sup}) {
                t.note(std::abs(p->mean - ref.mean));
                t.note(std::abs(p->variance - ref.variance));
            }
        }
        out.push_back(t.done());
    }
    {
        Tally t("beta update stays in [0.5 + 1e-9, 1]", 0.0);
        for (int i = 0; i < 200; ++i) {
            const int n = 1 + static_cast<int>(d.uniform(0.0, 50.0));
            SignVec labels(n);
            Vec pi(n);
            for (int k = 0; k < n; ++k) {
                labels[k] = d.sign();
                pi[k] = d.uniform(0.0, 1.0);
            }
            const EmInputs in{Vec::Zero(n), Vec::Ones(n), pi, SignalPrior(0.1, 1.0), SupportSideInfo{labels, 0.9}};
            const double b = update_beta(in).value;
            t.next_case();
            t.require(b >= kBetaMin && b <= kBetaMax);
        }
        out.push_back(t.done());
    }
    {
        Tally t("NMSE scale invariance and symmetry", 1e-12);
        for (int i = 0; i < 200; ++i) {
            Vec x(20), xh(20);
            for (int k = 0; k < 20; ++k) {
                x[k] = d.uniform(-3.0, 3.0);
                xh[k] = d.uniform(-3.0, 3.0);
            }
            const double c = d.log_uniform(1e-3, 1e3);
            const double base = nmse(x, xh).value;
            t.next_case();
            t.note(std::abs(nmse(c * x, xh).value - base));
            t.note(std::abs(nmse(x, c * xh).value - base));
            t.note(std::abs(nmse(xh, x).value - base));
        }
        out.push_back(t.done());
    }
    {
        Tally t("GAMP runs are bitwise reproducible", 0.0);
        ScenarioConfig sc;
        sc.n = 40;
        sc.m = 120;
        for (int i = 0; i < 3; ++i) {
            Rng rng = make_stream(seed, 300 + static_cast<std::uint64_t>(i));
            const TrialData td = gen_trial(sc, rng);
            const GampResult a = run_noisy1bg(td.a, td.y, sc.prior, sc.ch);
            const GampResult b = run_noisy1bg(td.a, td.y, sc.prior, sc.ch);
            t.next_case();
            t.require(a.x_hat == b.x_hat && a.tau_x == b.tau_x &&
                      a.inner_iterations_used == b.inner_iterations_used);
        }
        out.push_back(t.done());
    }
    return out;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
    std::ostringstream os;
    char line[256];
    for (const auto& c : checks) {
        std::snprintf(line, sizeof line, "%-4s %-44s cases=%-5d skipped=%-4d worst=%.3e tol=%.1e\n",
                      c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.cases, c.skipped, c.worst_error,
                      c.tolerance);
        os << line;
    }
    return os.str();
}

}  // namespace onebit::validation
