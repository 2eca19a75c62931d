#include "onebit/priors.hpp"

#include "onebit/errors.hpp"
#include "onebit/gauss_special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace onebit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

void require_tau(double tau_r) {
    if (!(tau_r > 0.0) || !std::isfinite(tau_r)) {
        throw std::domain_error("denoiser: tau_r must be positive and finite");
    }
}

void require_vs(double v_s) {
    if (!(v_s > 0.0) || !std::isfinite(v_s)) {
        throw std::domain_error("denoiser: v_s must be positive and finite");
    }
}

void require_lengths(const Vec& r_hat, const Vec& tau_r, Eigen::Index si_len) {
    if (r_hat.size() != tau_r.size() || (si_len >= 0 && si_len != r_hat.size())) {
        throw std::invalid_argument("denoiser: length mismatch");
    }
}

// Spike-and-slab posterior where the slab is N(slab_mean, slab_var) and the
// two branches carry the given log evidences.
ScalarPosterior two_point(double log_spike, double log_slab, double slab_mean, double slab_var) {
    std::array<double, 2> w{log_spike, log_slab};
    const double lz = normalize_log_weights(w);
    if (!std::isfinite(lz)) {
        throw NumericalError("denoiser: posterior normalizer degenerated");
    }
    ScalarPosterior out;
    out.log_norm = lz;
    out.active_prob = w[1];
    out.mean = w[1] * slab_mean;
    out.variance = w[1] * slab_var + w[0] * w[1] * slab_mean * slab_mean;
    return out;
}

template <typename Kernel>
DenoiserOutput map_elements(Eigen::Index n, Kernel&& kernel) {
    DenoiserOutput out{Vec(n), Vec(n), Vec(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        ScalarPosterior p;
        try {
            p = kernel(i);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at element " + std::to_string(i));
        }
        out.mean[i] = p.mean;
        out.variance[i] = p.variance;
        out.active_prob[i] = p.active_prob;
    }
    return out;
}

}  // namespace

SignalPrior::SignalPrior(double lambda, double v_x) : lambda_(lambda), v_x_(v_x) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw std::domain_error("SignalPrior: lambda must lie in (0, 1]");
    }
    if (!(v_x > 0.0) || !std::isfinite(v_x)) {
        throw std::domain_error("SignalPrior: v_x must be positive and finite");
    }
}

void validate_side_info(const SideInfo& si, Eigen::Index n) {
    std::visit(
        [n](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NoSideInfo>) {
                return;
            } else if constexpr (std::is_same_v<T, SupportSideInfo>) {
                if (s.x_tilde.size() != n) throw std::invalid_argument("side information length mismatch");
                if (!(s.beta > 0.5 && s.beta <= 1.0)) throw std::domain_error("beta must lie in (0.5, 1]");
                require_signs(s.x_tilde);
            } else {
                if (s.x_tilde.size() != n) throw std::invalid_argument("side information length mismatch");
                require_vs(s.v_s);
                if (!s.x_tilde.allFinite()) throw std::domain_error("side information must be finite");
            }
        },
        si);
}

ScalarPosterior bg_posterior(double r_hat, double tau_r, const SignalPrior& prior) {
    require_tau(tau_r);
    const double vx = prior.v_x();
    const double log_spike = safe_log(1.0 - prior.lambda()) + log_normal_pdf(0.0, r_hat, tau_r);
    const double log_slab = std::log(prior.lambda()) + log_normal_pdf(0.0, r_hat, vx + tau_r);
    const double slab_mean = vx * r_hat / (vx + tau_r);
    const double slab_var = vx * tau_r / (vx + tau_r);
    return two_point(log_spike, log_slab, slab_mean, slab_var);
}

ScalarPosterior gaussian_si_posterior(double r_hat, double tau_r, const SignalPrior& prior,
                                      double x_tilde, double v_s) {
    require_tau(tau_r);
    require_vs(v_s);
    const double vx = prior.v_x();
    const double mg = vx * r_hat / (vx + tau_r);
    const double vg = vx * tau_r / (vx + tau_r);
    const double denom = vx * tau_r + tau_r * v_s + v_s * vx;
    const double m_post = (r_hat * v_s * vx + vx * tau_r * x_tilde) / denom;
    const double v_post = v_s * tau_r * vx / denom;

    // pi = lambda / (lambda + (1 - lambda) Z) with
    // Z = N(0; r, tau) N(0; x~, v_s) / (N(0; r, v_x + tau) N(m_g; x~, v_g + v_s)).
    const double log_spike = safe_log(1.0 - prior.lambda()) + log_normal_pdf(0.0, r_hat, tau_r) +
                             log_normal_pdf(0.0, x_tilde, v_s);
    const double log_slab = std::log(prior.lambda()) + log_normal_pdf(0.0, r_hat, vx + tau_r) +
                            log_normal_pdf(mg, x_tilde, vg + v_s);
    return two_point(log_spike, log_slab, m_post, v_post);
}

ScalarPosterior support_si_posterior(double r_hat, double tau_r, const SignalPrior& prior, int x_tilde,
                                     double beta) {
    require_tau(tau_r);
    if (x_tilde != 1 && x_tilde != -1) {
        throw std::domain_error("support side information must be -1 or +1");
    }
    if (!(beta > 0.5 && beta <= 1.0)) {
        throw std::domain_error("beta must lie in (0.5, 1]");
    }
    const double vx = prior.v_x();
    const double p_active = x_tilde == 1 ? beta : 1.0 - beta;
    const double p_inactive = 1.0 - p_active;
    const double log_spike =
        safe_log(1.0 - prior.lambda()) + safe_log(p_inactive) + log_normal_pdf(0.0, r_hat, tau_r);
    const double log_slab =
        std::log(prior.lambda()) + safe_log(p_active) + log_normal_pdf(0.0, r_hat, vx + tau_r);
    return two_point(log_spike, log_slab, vx * r_hat / (vx + tau_r), vx * tau_r / (vx + tau_r));
}

ScalarPosterior LaplacePosterior::summary() const {
    ScalarPosterior out;
    out.log_norm = log_norm;
    out.active_prob = w_below + w_above;
    out.mean = w_below * mean_below + w_above * mean_above;
    const double db = mean_below - out.mean;
    const double da = mean_above - out.mean;
    out.variance = w_spike * out.mean * out.mean + w_below * (var_below + db * db) +
                   w_above * (var_above + da * da);
    return out;
}

LaplacePosterior laplacian_si_posterior(double r_hat, double tau_r, const SignalPrior& prior,
                                        double x_tilde, double v_s) {
    require_tau(tau_r);
    require_vs(v_s);
    const double vx = prior.v_x();
    const double mg = vx * r_hat / (vx + tau_r);
    const double vg = vx * tau_r / (vx + tau_r);
    const double log_4vs = std::log(4.0 * v_s);
    const double shift = vg / (2.0 * v_s);

    // Slab evidence lambda N(0; r, v_x + tau) split at x~. On x < x~ the
    // Laplacian factor tilts the Gaussian mean up by v_g / (2 v_s) and
    // contributes C1; on x > x~ it tilts down and contributes C2.
    const double log_slab = std::log(prior.lambda()) + log_normal_pdf(0.0, r_hat, vx + tau_r);
    const double log_c1 = -log_4vs - (x_tilde - mg - vg / (4.0 * v_s)) / (2.0 * v_s);
    const double log_c2 = -log_4vs - (-x_tilde + mg - vg / (4.0 * v_s)) / (2.0 * v_s);
    const TruncatedNormal below = truncate_above(x_tilde, mg + shift, vg);
    const TruncatedNormal above = truncate_below(x_tilde, mg - shift, vg);

    std::array<double, 3> w{
        safe_log(1.0 - prior.lambda()) + log_normal_pdf(0.0, r_hat, tau_r) - log_4vs -
            std::abs(x_tilde) / (2.0 * v_s),
        log_slab + log_c1 + below.log_mass,
        log_slab + log_c2 + above.log_mass,
    };
    const double lz = normalize_log_weights(w);
    if (!std::isfinite(lz)) {
        throw NumericalError("laplacian_si_denoise: normalizer Z^l degenerated");
    }

    LaplacePosterior out;
    out.log_norm = lz;
    out.w_spike = w[0];
    out.w_below = w[1];
    out.w_above = w[2];
    out.mean_below = below.mean;
    out.var_below = below.variance;
    out.mean_above = above.mean;
    out.var_above = above.variance;
    return out;
}

DenoiserOutput bg_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior) {
    require_lengths(r_hat, tau_r, -1);
    return map_elements(r_hat.size(), [&](Eigen::Index i) { return bg_posterior(r_hat[i], tau_r[i], prior); });
}

DenoiserOutput laplacian_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                    const AmplitudeLaplacian& si) {
    require_lengths(r_hat, tau_r, si.x_tilde.size());
    require_vs(si.v_s);
    return map_elements(r_hat.size(), [&](Eigen::Index i) {
        return laplacian_si_posterior(r_hat[i], tau_r[i], prior, si.x_tilde[i], si.v_s).summary();
    });
}

DenoiserOutput gaussian_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                   const AmplitudeGaussian& si) {
    require_lengths(r_hat, tau_r, si.x_tilde.size());
    require_vs(si.v_s);
    return map_elements(r_hat.size(), [&](Eigen::Index i) {
        return gaussian_si_posterior(r_hat[i], tau_r[i], prior, si.x_tilde[i], si.v_s);
    });
}

DenoiserOutput support_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                  const SupportSideInfo& si) {
    require_lengths(r_hat, tau_r, si.x_tilde.size());
    return map_elements(r_hat.size(), [&](Eigen::Index i) {
        return support_si_posterior(r_hat[i], tau_r[i], prior, si.x_tilde[i], si.beta);
    });
}

DenoiserOutput denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior, const SideInfo& si) {
    return std::visit(
        [&](const auto& s) -> DenoiserOutput {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NoSideInfo>) {
                return bg_denoise(r_hat, tau_r, prior);
            } else if constexpr (std::is_same_v<T, AmplitudeLaplacian>) {
                return laplacian_si_denoise(r_hat, tau_r, prior, s);
            } else if constexpr (std::is_same_v<T, AmplitudeGaussian>) {
                return gaussian_si_denoise(r_hat, tau_r, prior, s);
            } else {
                return support_si_denoise(r_hat, tau_r, prior, s);
            }
        },
        si);
}

}  // namespace onebit
