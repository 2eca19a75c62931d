#pragma once

#include "onebit/channel.hpp"
#include "onebit/gauss_special.hpp"
#include "onebit/priors.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

/// Brute-force references for every closed-form moment in the library.
/// They integrate the unnormalized densities numerically on each smooth
/// piece and add point masses exactly; nothing here calls the closed forms.
namespace onebit::validation {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
    /// Extra split points on top of the kinks each integrand declares.
    std::vector<double> splits;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Adaptive bisection depth; depth d allows up to 2^d subintervals.
    unsigned max_depth = 18;
};

enum class PosteriorKind { BG, BgLaplace, BgGauss, BgSupport, ProbitChannel };

struct OracleParams {
    // Scalar pseudo-observation (denoiser kinds) or p_hat / tau_p (channel).
    double r_hat = 0.0;
    double tau = 1.0;
    double lambda = 0.1;
    double v_x = 1.0;
    // Side information: x_tilde and v_s (amplitude) or label and beta (support).
    double x_tilde = 0.0;
    double v_s = 1.0;
    double beta = 0.9;
    // Channel.
    int y = 1;
    double noise_var = 1.0;
    double gamma = 1.0;
};

/// Normalizer and moments of a posterior. abs_first = E|x| is the natural
/// scale for judging the error of a first moment that may be near zero.
struct OracleMoments {
    double log_z = 0.0;
    double z = 0.0;
    double first = 0.0;
    double second = 0.0;
    double abs_first = 0.0;
    double variance() const { return second - first * first; }
};

OracleMoments oracle_moments(PosteriorKind kind, const OracleParams& params, const QuadratureSpec& spec = {});

/// Posterior expectation of an arbitrary function under `kind`.
double oracle_expectation(PosteriorKind kind, const OracleParams& params, const std::function<double(double)>& h,
                          const QuadratureSpec& spec = {});

/// Integrals of z^q Phi(z / sqrt(v)) N(z; p_hat, tau_p), q = 0, 1, 2.
ProbitMoments oracle_probit_integrals(double v, double p_hat, double tau_p, const QuadratureSpec& spec = {});

/// Integrals of x^q N(x; m, tau) over (-inf, upper], q = 0, 1, 2.
TruncMoments oracle_trunc_integrals(double upper, double m, double tau, const QuadratureSpec& spec = {});

/// Exact posterior mean of a two-coefficient spike-and-slab signal given sign
/// measurements y = eta .* Q(A x + n), by brute force: the atom at the origin,
/// the two axis lines on 1-D grids and the plane on a 2-D grid that is first
/// scanned coarsely and then refined on the box holding the mass. `fine` is
/// the number of points per side of the refined grid.
Vec oracle_posterior_mean_2d(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                             int fine = 201);

/// Phi via boost::math::erfc, independent of the library's own routine.
double reference_normal_cdf(double x);

}  // namespace onebit::validation
