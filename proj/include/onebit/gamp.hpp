#pragma once

#include "onebit/channel.hpp"
#include "onebit/priors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace onebit {

/// Per-iteration vectors of the sum-product GAMP recursion.
struct GampState {
    Vec x_hat;
    Vec tau_x;
    Vec s_hat;
    Vec tau_s;
    Vec p_hat;
    Vec tau_p;
    Vec r_hat;
    Vec tau_r;
    int iteration = 0;

    /// Algorithm start: x_hat = E[x] = 0, tau_x = var[x] = lambda v_x, s_hat = 0.
    static GampState initial(Eigen::Index m, Eigen::Index n, const SignalPrior& prior);
};

struct GampConfig {
    int max_inner_iters = 30;
    int max_outer_iters = 10;
    /// x_hat and s_hat are blended as d * new + (1 - d) * old; 1 disables damping.
    double damping = 1.0;
    double tau_floor = 1e-12;
    double tau_s_floor = kDefaultTauSFloor;
    /// Inner loop stops once ||x_new - x_old|| / ||x_new|| falls below this.
    double convergence_tol = 1e-6;
    bool em_enabled = true;
    /// Reuse the last inner state across outer EM iterations.
    bool warm_start = true;

    void validate() const;
};

struct GampResult {
    Vec x_hat;
    Vec tau_x;
    Vec active_prob;
    /// Final v_s or beta when the EM loop ran.
    std::optional<double> estimated_param;
    int inner_iterations_used = 0;
    int outer_iterations_used = 0;
    /// NMSE of x_hat against the supplied truth after every inner iteration.
    std::vector<double> trajectory;
    std::vector<std::string> warnings;
};

/// tau_p = (A.A) tau_x (floored); p_hat = A x_hat - tau_p .* s_hat.
void linear_measurement_step(const Mat& a, GampState& state, double tau_floor = 1e-12);

/// tau_r = 1 ./ ((A.A)^T tau_s) clamped to [floor, 1/floor]; r_hat = x_hat + tau_r .* (A^T s_hat).
void linear_estimation_step(const Mat& a, GampState& state, double tau_floor = 1e-12);

/// Sign-measurement GAMP with the Bernoulli-Gaussian denoiser.
GampResult run_noisy1bg(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                        const GampConfig& cfg = {}, const std::optional<Vec>& truth = std::nullopt);

/// GAMP with a side-information denoiser and, when enabled, an outer EM loop
/// re-estimating v_s (amplitude SI) or beta (support SI).
GampResult run_with_si(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                       const SideInfo& si, const GampConfig& cfg = {},
                       const std::optional<Vec>& truth = std::nullopt);

}  // namespace onebit
