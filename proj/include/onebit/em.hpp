#pragma once

#include "onebit/priors.hpp"

namespace onebit {

inline constexpr double kVsMin = 1e-8;
inline constexpr double kVsMax = 1e8;
inline constexpr double kBetaMin = 0.5 + 1e-9;
inline constexpr double kBetaMax = 1.0;

/// E-step inputs: the GAMP pseudo-observations and posterior activity at the
/// current parameter value (carried inside `si`).
struct EmInputs {
    Vec r_hat;
    Vec tau_r;
    Vec active_prob;
    SignalPrior prior;
    SideInfo si;
};

/// M-step result. `clamped` is set when the raw maximizer fell outside the
/// legal parameter range and was pulled back to its bound.
struct ParamUpdate {
    double value = 0.0;
    double raw = 0.0;
    bool clamped = false;
};

/// Posterior expectation of |x - x_tilde| under the Laplacian SI model.
double expected_abs_deviation(double r_hat, double tau_r, const SignalPrior& prior, double x_tilde,
                              double v_s);

/// v_s <- (1 / 2N) sum_n E|x_n - x_tilde_n|. Requires AmplitudeLaplacian.
ParamUpdate update_vs_laplacian(const EmInputs& in);

/// v_s <- (1 / N) sum_n E(x_n - x_tilde_n)^2. Requires AmplitudeGaussian.
ParamUpdate update_vs_gaussian(const EmInputs& in);

/// beta <- (sum_{x~=+1} pi_n + sum_{x~=-1} (1 - pi_n)) / N. Requires SupportSideInfo.
ParamUpdate update_beta(const EmInputs& in);

}  // namespace onebit
