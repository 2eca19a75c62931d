#include "onebit/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace onebit {

namespace {

ParamUpdate clamp_update(double raw, double lo, double hi) {
    ParamUpdate out;
    out.raw = raw;
    out.value = std::clamp(raw, lo, hi);
    out.clamped = !(raw >= lo && raw <= hi);
    if (std::isnan(raw)) out.value = lo;
    return out;
}

template <typename T>
const T& require_variant(const SideInfo& si, const char* who) {
    const T* p = std::get_if<T>(&si);
    if (p == nullptr) {
        throw std::invalid_argument(std::string(who) + ": side information has the wrong variant");
    }
    return *p;
}

void require_lengths(const EmInputs& in, Eigen::Index si_len) {
    const Eigen::Index n = in.r_hat.size();
    if (in.tau_r.size() != n || si_len != n) {
        throw std::invalid_argument("EM update: length mismatch");
    }
    if (n == 0) throw std::invalid_argument("EM update: empty input");
}

}  // namespace

double expected_abs_deviation(double r_hat, double tau_r, const SignalPrior& prior, double x_tilde,
                              double v_s) {
    const LaplacePosterior post = laplacian_si_posterior(r_hat, tau_r, prior, x_tilde, v_s);
    // Spike: |0 - x~|. Lower slab piece: x~ - E[x | x < x~]. Upper: E[x | x > x~] - x~.
    return post.w_spike * std::abs(x_tilde) + post.w_below * std::max(0.0, x_tilde - post.mean_below) +
           post.w_above * std::max(0.0, post.mean_above - x_tilde);
}

ParamUpdate update_vs_laplacian(const EmInputs& in) {
    const auto& si = require_variant<AmplitudeLaplacian>(in.si, "update_vs_laplacian");
    require_lengths(in, si.x_tilde.size());
    const Eigen::Index n = in.r_hat.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        acc += expected_abs_deviation(in.r_hat[i], in.tau_r[i], in.prior, si.x_tilde[i], si.v_s);
    }
    return clamp_update(acc / (2.0 * static_cast<double>(n)), kVsMin, kVsMax);
}

ParamUpdate update_vs_gaussian(const EmInputs& in) {
    const auto& si = require_variant<AmplitudeGaussian>(in.si, "update_vs_gaussian");
    require_lengths(in, si.x_tilde.size());
    const Eigen::Index n = in.r_hat.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const ScalarPosterior p = gaussian_si_posterior(in.r_hat[i], in.tau_r[i], in.prior, si.x_tilde[i], si.v_s);
        // E(x - x~)^2 = E x^2 - 2 x~ E x + x~^2, written as var + bias^2.
        const double bias = p.mean - si.x_tilde[i];
        acc += p.variance + bias * bias;
    }
    return clamp_update(acc / static_cast<double>(n), kVsMin, kVsMax);
}

ParamUpdate update_beta(const EmInputs& in) {
    const auto& si = require_variant<SupportSideInfo>(in.si, "update_beta");
    const Eigen::Index n = si.x_tilde.size();
    if (in.active_prob.size() != n || n == 0) {
        throw std::invalid_argument("update_beta: active_prob length mismatch");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = in.active_prob[i];
        if (si.x_tilde[i] == 1) {
            acc += pi;
        } else if (si.x_tilde[i] == -1) {
            acc += 1.0 - pi;
        } else {
            throw std::domain_error("update_beta: support labels must be -1 or +1");
        }
    }
    return clamp_update(acc / static_cast<double>(n), kBetaMin, kBetaMax);
}

}  // namespace onebit
