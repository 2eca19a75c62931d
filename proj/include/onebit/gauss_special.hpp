#pragma once

#include <span>

namespace onebit {

/// Mean/variance pair of a scalar Gaussian. Variance must be strictly positive.
struct GaussParams {
    double mean = 0.0;
    double variance = 1.0;
};

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

/// phi(x) = N(x; 0, 1).
double std_normal_pdf(double x);

/// Phi(x), evaluated through erfc so both tails keep relative accuracy.
double std_normal_cdf(double x);

/// log Phi(x). Finite for every finite x (no underflow in the lower tail).
double log_std_normal_cdf(double x);

/// phi(x) / Phi(x), stable for x -> -inf where both factors underflow.
double inverse_mills_ratio(double x);

/// log N(x; mean, var).
double log_normal_pdf(double x, double mean, double var);

/// Integrals of z^q Phi(z / sqrt(v)) N(z; p_hat, tau_p) for q = 0, 1, 2.
struct ProbitMoments {
    double pi0 = 0.0;
    double pi1 = 0.0;
    double pi2 = 0.0;
};

/// Closed forms for the probit-Gaussian integrals. v = 0 is the noiseless
/// step limit and goes through the same expressions.
ProbitMoments probit_gauss_moments(double v, double p_hat, double tau_p);

/// Integrals of x^q N(x; m, tau) over (-inf, upper] for q = 0, 1, 2.
struct TruncMoments {
    double i0 = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
};

TruncMoments trunc_gauss_moments(double upper, double m, double tau);

/// N(m, tau) conditioned on a half line: log of the retained mass plus the
/// normalized mean and variance. Stays accurate when the mass underflows.
struct TruncatedNormal {
    double log_mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

TruncatedNormal truncate_above(double upper, double m, double tau);
TruncatedNormal truncate_below(double lower, double m, double tau);

/// N(x; a) N(x; b) = scale * N(x; prod).
struct GaussProduct {
    double log_scale = 0.0;
    double scale = 0.0;
    GaussParams prod;
};

GaussProduct gauss_product(GaussParams a, GaussParams b);

/// log(sum_i exp(v_i)); -inf for an empty span or all -inf entries.
double log_sum_exp(std::span<const double> log_values);

/// Max-shifted exponentiation: replaces log weights by normalized
/// probabilities in place and returns the log of the normalizer.
double normalize_log_weights(std::span<double> log_weights);

}  // namespace onebit
