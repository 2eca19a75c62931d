#pragma once

#include "onebit/channel.hpp"

#include <variant>

namespace onebit {

/// Bernoulli-Gaussian prior: x = 0 with probability 1 - lambda, otherwise
/// x ~ N(0, v_x).
class SignalPrior {
public:
    /// lambda = 1 is accepted (pure Gaussian prior); lambda <= 0 is not.
    SignalPrior(double lambda, double v_x);

    double lambda() const { return lambda_; }
    double v_x() const { return v_x_; }
    double variance() const { return lambda_ * v_x_; }

private:
    double lambda_;
    double v_x_;
};

struct NoSideInfo {};

/// x_tilde = x + w with w ~ (1 / (4 v_s)) exp(-|w| / (2 v_s)).
struct AmplitudeLaplacian {
    Vec x_tilde;
    double v_s = 1.0;
};

/// x_tilde = x + w with w ~ N(0, v_s).
struct AmplitudeGaussian {
    Vec x_tilde;
    double v_s = 1.0;
};

/// +1 / -1 support labels, each agreeing with the true support w.p. beta.
struct SupportSideInfo {
    SignVec x_tilde;
    double beta = 0.9;
};

using SideInfo = std::variant<NoSideInfo, AmplitudeLaplacian, AmplitudeGaussian, SupportSideInfo>;

/// Structural checks (parameter ranges, label values, length = n).
void validate_side_info(const SideInfo& si, Eigen::Index n);

struct DenoiserOutput {
    Vec mean;
    Vec variance;
    Vec active_prob;
};

/// Scalar posterior summary shared by every denoiser.
struct ScalarPosterior {
    double mean = 0.0;
    double variance = 0.0;
    double active_prob = 0.0;
    double log_norm = 0.0;
};

ScalarPosterior bg_posterior(double r_hat, double tau_r, const SignalPrior& prior);
ScalarPosterior gaussian_si_posterior(double r_hat, double tau_r, const SignalPrior& prior,
                                      double x_tilde, double v_s);
ScalarPosterior support_si_posterior(double r_hat, double tau_r, const SignalPrior& prior,
                                     int x_tilde, double beta);

/// Posterior under the Laplacian side-information factor, kept as a
/// three-way mixture: the spike at zero and the slab split at x_tilde.
struct LaplacePosterior {
    double log_norm = 0.0;    // log Z^l
    double w_spike = 0.0;     // normalized mixture weights
    double w_below = 0.0;
    double w_above = 0.0;
    double mean_below = 0.0;  // slab restricted to x < x_tilde
    double var_below = 0.0;
    double mean_above = 0.0;  // slab restricted to x > x_tilde
    double var_above = 0.0;

    ScalarPosterior summary() const;
};

LaplacePosterior laplacian_si_posterior(double r_hat, double tau_r, const SignalPrior& prior,
                                        double x_tilde, double v_s);

DenoiserOutput bg_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior);
DenoiserOutput laplacian_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                    const AmplitudeLaplacian& si);
DenoiserOutput gaussian_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                   const AmplitudeGaussian& si);
DenoiserOutput support_si_denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior,
                                  const SupportSideInfo& si);

/// Dispatches on the side-information alternative; NoSideInfo maps to bg_denoise.
DenoiserOutput denoise(const Vec& r_hat, const Vec& tau_r, const SignalPrior& prior, const SideInfo& si);

}  // namespace onebit
