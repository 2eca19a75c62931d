#include "onebit/gauss_special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace onebit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this argument the continued-fraction route replaces direct ratios.
constexpr double kTailSwitch = -5.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(what) + ": non-finite argument");
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(what) + ": variance must be positive and finite");
    }
}

// Backward evaluation of the Laplace continued fraction for the Mills ratio
// R(t) = Phi(-t) / phi(t) = 1 / (t + 1/(t + 2/(t + 3/(t + ...)))).
// d_k = t + (k + 1) / d_{k+1} is the k-th tail denominator, d_0 = 1 / R(t).
struct MillsTail {
    double d0, d1, d2, d3;
};

MillsTail mills_tail(double t) {
    constexpr int kDepth = 160;
    MillsTail out{};
    double d = t;
    for (int k = kDepth - 1; k >= 0; --k) {
        d = t + static_cast<double>(k + 1) / d;
        if (k == 3) out.d3 = d;
        if (k == 2) out.d2 = d;
        if (k == 1) out.d1 = d;
    }
    out.d0 = d;
    return out;
}

// Variance factor 1 - a r - r^2 of a standard normal truncated above at a,
// with r = phi(a) / Phi(a).
double upper_trunc_var_factor(double a, double r) {
    if (a >= kTailSwitch) {
        return std::max(0.0, 1.0 - a * r - r * r);
    }
    // With t = -a: 1 + t r - r^2 = (t + 4/d2 - 3/d3) / (d1^2 d2), free of
    // the cancellation the direct expression suffers for large t.
    const MillsTail m = mills_tail(-a);
    const double t = -a;
    return (t + 4.0 / m.d2 - 3.0 / m.d3) / (m.d1 * m.d1 * m.d2);
}

}  // namespace

double std_normal_pdf(double x) {
    require_finite(x, "std_normal_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    require_finite(x, "std_normal_cdf");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double log_std_normal_cdf(double x) {
    require_finite(x, "log_std_normal_cdf");
    if (x < kTailSwitch) {
        const MillsTail m = mills_tail(-x);
        return -0.5 * x * x - kLogSqrt2Pi - std::log(m.d0);
    }
    if (x <= 0.0) {
        return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    }
    return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
}

double inverse_mills_ratio(double x) {
    require_finite(x, "inverse_mills_ratio");
    if (x < kTailSwitch) {
        return mills_tail(-x).d0;
    }
    return std_normal_pdf(x) / std_normal_cdf(x);
}

double log_normal_pdf(double x, double mean, double var) {
    require_positive(var, "log_normal_pdf");
    const double d = x - mean;
    return -0.5 * d * d / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

ProbitMoments probit_gauss_moments(double v, double p_hat, double tau_p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::domain_error("probit_gauss_moments: noise variance must be >= 0");
    }
    require_positive(tau_p, "probit_gauss_moments");
    require_finite(p_hat, "probit_gauss_moments");

    const double s2 = v + tau_p;
    const double s = std::sqrt(s2);
    const double u = p_hat / s;
    const double pdf = std_normal_pdf(u);

    ProbitMoments out;
    out.pi0 = std_normal_cdf(u);
    out.pi1 = p_hat * out.pi0 + tau_p * pdf / s;
    out.pi2 = tau_p * out.pi0 + p_hat * out.pi1 + tau_p * p_hat * v * pdf / (s2 * s);
    return out;
}

TruncatedNormal truncate_above(double upper, double m, double tau) {
    require_positive(tau, "truncate_above");
    require_finite(upper, "truncate_above");
    require_finite(m, "truncate_above");

    const double sd = std::sqrt(tau);
    const double a = (upper - m) / sd;
    const double r = inverse_mills_ratio(a);

    TruncatedNormal out;
    out.log_mass = log_std_normal_cdf(a);
    // The conditional mean can never exceed the truncation point.
    out.mean = std::min(m - sd * r, upper);
    out.variance = tau * upper_trunc_var_factor(a, r);
    return out;
}

TruncatedNormal truncate_below(double lower, double m, double tau) {
    TruncatedNormal mirrored = truncate_above(-lower, -m, tau);
    mirrored.mean = -mirrored.mean;
    return mirrored;
}

TruncMoments trunc_gauss_moments(double upper, double m, double tau) {
    // Algebraically I1 = m I0 - sqrt(tau) phi(a) and
    // I2 = m I1 + tau I0 - upper sqrt(tau) phi(a); the conditional form below
    // is the same quantity without the cancellation in the lower tail.
    const TruncatedNormal t = truncate_above(upper, m, tau);
    TruncMoments out;
    out.i0 = std::exp(t.log_mass);
    out.i1 = out.i0 * t.mean;
    out.i2 = out.i0 * (t.variance + t.mean * t.mean);
    return out;
}

GaussProduct gauss_product(GaussParams a, GaussParams b) {
    require_positive(a.variance, "gauss_product");
    require_positive(b.variance, "gauss_product");
    const double vsum = a.variance + b.variance;

    GaussProduct out;
    out.prod.variance = a.variance * b.variance / vsum;
    out.prod.mean = (a.mean * b.variance + b.mean * a.variance) / vsum;
    out.log_scale = log_normal_pdf(0.0, a.mean - b.mean, vsum);
    out.scale = std::exp(out.log_scale);
    return out;
}

double log_sum_exp(std::span<const double> log_values) {
    double mx = -kInf;
    for (double v : log_values) mx = std::max(mx, v);
    if (mx == -kInf) return -kInf;
    if (mx == kInf) return kInf;
    double acc = 0.0;
    for (double v : log_values) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

double normalize_log_weights(std::span<double> log_weights) {
    const double lz = log_sum_exp(log_weights);
    if (!std::isfinite(lz)) {
        for (double& w : log_weights) w = std::numeric_limits<double>::quiet_NaN();
        return lz;
    }
    for (double& w : log_weights) w = std::exp(w - lz);
    return lz;
}

}  // namespace onebit
