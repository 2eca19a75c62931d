#include "onebit/channel.hpp"

#include "onebit/gauss_special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace onebit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_sign(int y) {
    if (y != 1 && y != -1) {
        throw std::domain_error("measurement must be -1 or +1, got " + std::to_string(y));
    }
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Moments of Phi(sign * z / sqrt(v)) N(z; p_hat, tau) after normalization.
struct ProbitComponent {
    double log_mass;
    double mean;
    double variance;
};

ProbitComponent probit_component(int sign, double p_hat, double tau, double v) {
    const double s2 = v + tau;
    const double s = std::sqrt(s2);
    const double u = sign * p_hat / s;
    const double r = inverse_mills_ratio(u);
    ProbitComponent c;
    c.log_mass = log_std_normal_cdf(u);
    c.mean = p_hat + sign * tau * r / s;
    // tau - tau^2 r (u + r) / s2; r (u + r) lies in (0, 1).
    double shrink = r * (u + r);
    shrink = std::min(std::max(shrink, 0.0), 1.0);
    c.variance = tau - tau * tau * shrink / s2;
    return c;
}

}  // namespace

ChannelParams::ChannelParams(double noise_var, double gamma) : noise_var_(noise_var), gamma_(gamma) {
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw std::domain_error("ChannelParams: noise variance must be finite and >= 0");
    }
    if (!(gamma > 0.5 && gamma <= 1.0)) {
        throw std::domain_error("ChannelParams: gamma must lie in (0.5, 1]");
    }
}

void require_signs(const SignVec& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i) require_sign(y[i]);
}

double likelihood(int y, double z, const ChannelParams& ch) {
    require_sign(y);
    double above;  // P(z + n > 0)
    if (ch.noise_var() == 0.0) {
        above = z > 0.0 ? 1.0 : 0.0;
    } else {
        above = std_normal_cdf(z / std::sqrt(ch.noise_var()));
    }
    const double agree = y == 1 ? above : 1.0 - above;
    return ch.gamma() * agree + (1.0 - ch.gamma()) * (1.0 - agree);
}

PosteriorZ posterior_z_moments(int y, double p_hat, double tau_p, const ChannelParams& ch) {
    require_sign(y);
    if (!(tau_p > 0.0) || !std::isfinite(tau_p)) {
        throw std::domain_error("posterior_z_moments: tau_p must be positive");
    }
    // The likelihood is gamma * Phi(y z / sqrt v) + (1 - gamma) * Phi(-y z / sqrt v),
    // so the posterior is a two-component mixture of probit-tilted Gaussians.
    const ProbitComponent kept = probit_component(y, p_hat, tau_p, ch.noise_var());
    const ProbitComponent flipped = probit_component(-y, p_hat, tau_p, ch.noise_var());

    std::array<double, 2> w{safe_log(ch.gamma()) + kept.log_mass,
                            safe_log(1.0 - ch.gamma()) + flipped.log_mass};
    const double log_z = normalize_log_weights(w);

    PosteriorZ out;
    out.z_norm = std::exp(log_z);
    out.mean = w[0] * kept.mean + w[1] * flipped.mean;
    const double d0 = kept.mean - out.mean;
    const double d1 = flipped.mean - out.mean;
    out.variance = w[0] * (kept.variance + d0 * d0) + w[1] * (flipped.variance + d1 * d1);
    out.second = out.variance + out.mean * out.mean;
    return out;
}

FUpdate f_update(const SignVec& y, const Vec& p_hat, const Vec& tau_p, const ChannelParams& ch,
                 double tau_s_floor) {
    if (y.size() != p_hat.size() || y.size() != tau_p.size()) {
        throw std::invalid_argument("f_update: length mismatch between y, p_hat and tau_p");
    }
    FUpdate out{Vec(y.size()), Vec(y.size())};
    for (Eigen::Index m = 0; m < y.size(); ++m) {
        const PosteriorZ post = posterior_z_moments(y[m], p_hat[m], tau_p[m], ch);
        const double tp = tau_p[m];
        out.s_hat[m] = (post.mean - p_hat[m]) / tp;
        out.tau_s[m] = std::max((1.0 - post.variance / tp) / tp, tau_s_floor);
    }
    return out;
}

}  // namespace onebit
