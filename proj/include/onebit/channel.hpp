#pragma once

#include <Eigen/Dense>

namespace onebit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
/// One-bit measurements; every entry is -1 or +1.
using SignVec = Eigen::VectorXi;

/// Pre-quantization AWGN variance and the probability that a quantized
/// sign survives the post-quantization flip channel.
class ChannelParams {
public:
    /// Throws std::domain_error unless noise_var >= 0 and 0.5 < gamma <= 1.
    ChannelParams(double noise_var, double gamma);

    double noise_var() const { return noise_var_; }
    double gamma() const { return gamma_; }
    double flip_prob() const { return 1.0 - gamma_; }

    /// Channel the sign-only baseline assumes: no AWGN, no flips.
    static ChannelParams noiseless() { return {0.0, 1.0}; }

private:
    double noise_var_;
    double gamma_;
};

/// p(y | z) for y in {-1, +1}. v = 0 uses the step limit of Phi(z / sqrt(v)).
double likelihood(int y, double z, const ChannelParams& ch);

/// Posterior of z ~ N(p_hat, tau_p) given y. `z_norm` is the normalizer
/// Z^p = integral of p(y|z) N(z; p_hat, tau_p).
struct PosteriorZ {
    double z_norm = 0.0;
    double mean = 0.0;
    double second = 0.0;
    double variance = 0.0;
};

PosteriorZ posterior_z_moments(int y, double p_hat, double tau_p, const ChannelParams& ch);

/// Output-side update of GAMP: s_hat and tau_s for every measurement.
struct FUpdate {
    Vec s_hat;
    Vec tau_s;
};

inline constexpr double kDefaultTauSFloor = 1e-12;

FUpdate f_update(const SignVec& y, const Vec& p_hat, const Vec& tau_p, const ChannelParams& ch,
                 double tau_s_floor = kDefaultTauSFloor);

/// Throws std::domain_error if any entry is not -1 or +1.
void require_signs(const SignVec& y);

}  // namespace onebit
