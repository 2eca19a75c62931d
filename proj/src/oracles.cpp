#include "onebit/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace onebit::validation {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.918938533204672741780329736406;
constexpr double kReach = 40.0;  // standard deviations kept on each side

double log_gauss(double x, double m, double v) {
    const double d = x - m;
    return -0.5 * d * d / v - 0.5 * std::log(v) - kHalfLog2Pi;
}

// log(gamma Phi(x) + (1 - gamma) Phi(-x)). Below -100 the lower tail leaves
// the long double range; there the asymptotic series
// Phi(x) = phi(x) / |x| (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8) is exact to
// double precision.
double log_flip_likelihood(double x, double gamma) {
    if (x >= -100.0) {
        const long double lo = 0.5L * boost::math::erfc(-static_cast<long double>(x) / std::numbers::sqrt2_v<long double>);
        const long double lik = gamma * lo + (1.0L - gamma) * (1.0L - lo);
        return lik > 0.0L ? static_cast<double>(std::log(lik)) : kNegInf;
    }
    if (gamma < 1.0) {
        // Phi(x) < 1e-2000 is invisible next to (1 - gamma) Phi(-x).
        return std::log1p(-gamma);
    }
    const double w = 1.0 / (x * x);
    const double series = 1.0 - w * (1.0 - w * (3.0 - w * (15.0 - w * 105.0)));
    return -0.5 * x * x - std::log(-x) - kHalfLog2Pi + std::log(series);
}

// An unnormalized density on the real line: a smooth part exp(log_smooth(x))
// supported (to double precision) on [lo, hi], plus an optional point mass
// exp(log_atom) at zero.
struct Density {
    std::function<double(double)> log_smooth;
    double log_atom = kNegInf;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> kinks;
};

constexpr int kGrid = 2001;
// Cells whose log density stays this far below the peak are dropped; their
// share of the mass is below 1e-40.
constexpr double kCut = 100.0;

double grid_point(const Density& d, int i) {
    return d.lo + (d.hi - d.lo) * static_cast<double>(i) / (kGrid - 1);
}

// Maximum of the smooth log density over a grid and the declared kinks.
double find_shift(const Density& d) {
    double best = kNegInf;
    for (double k : d.kinks) {
        if (k >= d.lo && k <= d.hi) best = std::max(best, d.log_smooth(k));
    }
    for (int i = 0; i < kGrid; ++i) best = std::max(best, d.log_smooth(grid_point(d, i)));
    return best;
}

// Integration pieces: runs of grid cells where the density is within kCut of
// the peak (padded by one cell), split at every kink and extra split point.
std::vector<std::pair<double, double>> live_pieces(const Density& d, double shift, const QuadratureSpec& spec) {
    std::vector<double> lf(kGrid);
    for (int i = 0; i < kGrid; ++i) lf[i] = d.log_smooth(grid_point(d, i));
    std::vector<char> live(kGrid - 1, 0);
    for (int i = 0; i + 1 < kGrid; ++i) live[i] = std::max(lf[i], lf[i + 1]) >= shift - kCut;
    for (double k : d.kinks) {
        if (k < d.lo || k > d.hi || d.log_smooth(k) < shift - kCut) continue;
        const double pos = (k - d.lo) / (d.hi - d.lo) * (kGrid - 1);
        live[std::min(static_cast<int>(pos), kGrid - 2)] = 1;
    }

    std::vector<double> cuts;
    for (double k : d.kinks) cuts.push_back(k);
    for (double k : spec.splits) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());

    std::vector<std::pair<double, double>> out;
    int i = 0;
    while (i < kGrid - 1) {
        if (!live[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < kGrid - 1 && live[j + 1]) ++j;
        const double a = grid_point(d, std::max(i - 1, 0));
        const double b = grid_point(d, std::min(j + 2, kGrid - 1));
        double left = a;
        for (double c : cuts) {
            if (c > left && c < b) {
                out.emplace_back(left, c);
                left = c;
            }
        }
        out.emplace_back(left, b);
        i = j + 1;
    }
    return out;
}

// Integral of h(x) exp(log_smooth(x) - shift) over the live part of [lo, hi].
double integrate_smooth(const Density& d, double shift, const std::function<double(double)>& h,
                        const QuadratureSpec& spec) {
    auto f = [&](double x) {
        const double lf = d.log_smooth(x);
        return lf == kNegInf ? 0.0 : h(x) * std::exp(lf - shift);
    };
    double total = 0.0;
    double total_l1 = 0.0;
    double total_err = 0.0;
    for (const auto& [a, b] : live_pieces(d, shift, spec)) {
        // Boost reports the error of the [-1, 1] rule without the interval
        // scale, so short pieces would look inaccurate. Map them ourselves.
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        auto g = [&](double t) { return half * f(mid + half * t); };
        double err = 0.0;
        double l1 = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -1.0, 1.0, spec.max_depth,
                                                                              spec.rel_tol, &err, &l1);
        total_l1 += l1;
        total_err += err;
    }
    if (!std::isfinite(total) || total_err > std::max(spec.abs_tol, 10.0 * spec.rel_tol * total_l1)) {
        throw OracleError("oracle quadrature did not converge (error estimate " + std::to_string(total_err) +
                          ", L1 " + std::to_string(total_l1) + ")");
    }
    return total;
}

Density make_density(PosteriorKind kind, const OracleParams& p) {
    Density d;
    if (kind == PosteriorKind::ProbitChannel) {
        const double sd = std::sqrt(p.tau);
        const double sv = std::sqrt(p.noise_var);
        // Where the Gaussian approximation of the tilted density peaks when the
        // measurement disagrees with p_hat; the window must cover it as well.
        const double mode = p.r_hat * p.noise_var / (p.noise_var + p.tau);
        const double sd_post = std::sqrt(p.noise_var * p.tau / (p.noise_var + p.tau));
        d.lo = std::min(p.r_hat - kReach * sd, mode - kReach * sd_post);
        d.hi = std::max(p.r_hat + kReach * sd, mode + kReach * sd_post);
        d.kinks = {0.0, p.r_hat, mode};
        for (double k : {-8.0, -2.0, 2.0, 8.0}) {
            d.kinks.push_back(k * sv);
            d.kinks.push_back(p.r_hat + k * sd);
            d.kinks.push_back(mode + k * sd_post);
        }
        d.log_smooth = [p, sv](double z) {
            const double t = p.y == 1 ? z : -z;
            double log_lik;
            if (p.noise_var == 0.0) {
                const double lik = t > 0.0 ? p.gamma : 1.0 - p.gamma;
                log_lik = lik > 0.0 ? std::log(lik) : kNegInf;
            } else {
                log_lik = log_flip_likelihood(t / sv, p.gamma);
            }
            return log_lik + log_gauss(z, p.r_hat, p.tau);
        };
        return d;
    }

    // Spike-and-slab times the side-information factor.
    std::function<double(double)> log_si = [](double) { return 0.0; };
    double log_si_at_zero = 0.0;
    double log_atom_weight = std::log1p(-p.lambda);
    double log_slab_weight = std::log(p.lambda);
    std::vector<double> centers{0.0, p.r_hat, p.v_x * p.r_hat / (p.v_x + p.tau)};
    switch (kind) {
        case PosteriorKind::BG:
            break;
        case PosteriorKind::BgLaplace: {
            log_si = [p](double x) { return -std::log(4.0 * p.v_s) - std::abs(x - p.x_tilde) / (2.0 * p.v_s); };
            log_si_at_zero = log_si(0.0);
            const double tilt = p.v_x * p.tau / (p.v_x + p.tau) / (2.0 * p.v_s);
            centers.push_back(p.x_tilde);
            centers.push_back(centers[2] + tilt);
            centers.push_back(centers[2] - tilt);
            break;
        }
        case PosteriorKind::BgGauss: {
            log_si = [p](double x) { return log_gauss(x, p.x_tilde, p.v_s); };
            log_si_at_zero = log_si(0.0);
            const double denom = p.v_x * p.tau + p.tau * p.v_s + p.v_s * p.v_x;
            centers.push_back(p.x_tilde);
            centers.push_back((p.r_hat * p.v_s * p.v_x + p.v_x * p.tau * p.x_tilde) / denom);
            break;
        }
        case PosteriorKind::BgSupport: {
            const bool label_active = p.x_tilde > 0.0;
            const double agree = std::log(p.beta);
            const double disagree = p.beta < 1.0 ? std::log1p(-p.beta) : kNegInf;
            log_slab_weight += label_active ? agree : disagree;
            log_atom_weight += label_active ? disagree : agree;
            break;
        }
        case PosteriorKind::ProbitChannel:
            break;
    }
    const double lo_c = *std::min_element(centers.begin(), centers.end());
    const double hi_c = *std::max_element(centers.begin(), centers.end());
    double sd = std::sqrt(p.v_x * p.tau / (p.v_x + p.tau));
    d.lo = lo_c - kReach * sd;
    d.hi = hi_c + kReach * sd;
    if (kind == PosteriorKind::BgGauss) sd = std::min(sd, std::sqrt(p.v_s));
    d.kinks = centers;
    for (double c : centers) {
        for (double k : {-8.0, -2.0, 2.0, 8.0}) d.kinks.push_back(c + k * sd);
    }
    if (kind == PosteriorKind::BgLaplace) {
        // The Laplace cusp can be much narrower than the Gaussian part.
        for (double k : {1.0, 4.0, 16.0, 64.0}) {
            d.kinks.push_back(p.x_tilde - 2.0 * k * p.v_s);
            d.kinks.push_back(p.x_tilde + 2.0 * k * p.v_s);
        }
    }
    d.log_smooth = [p, log_si, log_slab_weight](double x) {
        return log_slab_weight + log_gauss(x, p.r_hat, p.tau) + log_gauss(x, 0.0, p.v_x) + log_si(x);
    };
    d.log_atom = p.lambda < 1.0 ? log_atom_weight + log_gauss(0.0, p.r_hat, p.tau) + log_si_at_zero : kNegInf;
    return d;
}

}  // namespace

double reference_normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

namespace {

// Smooth part and atom each carry their own log scale, so neither is
// resolved against a reference it underflows relative to.
struct Split {
    Density d;
    double shift;
    double log_smooth_z;  // log of the smooth part's mass
    double log_z;
    double smooth_share;  // fractions of the total mass
    double atom_share;
};

Split split_mass(PosteriorKind kind, const OracleParams& params, const QuadratureSpec& spec) {
    Split s{make_density(kind, params), 0.0, 0.0, 0.0, 0.0, 0.0};
    s.shift = find_shift(s.d);
    if (s.shift == kNegInf) throw OracleError("oracle density vanishes everywhere");
    const double mass = integrate_smooth(s.d, s.shift, [](double) { return 1.0; }, spec);
    s.log_smooth_z = s.shift + std::log(mass);
    const double hi = std::max(s.log_smooth_z, s.d.log_atom);
    s.log_z = hi + std::log(std::exp(s.log_smooth_z - hi) + std::exp(s.d.log_atom - hi));
    s.smooth_share = std::exp(s.log_smooth_z - s.log_z);
    s.atom_share = std::exp(s.d.log_atom - s.log_z);
    return s;
}

double expect(const Split& s, const std::function<double(double)>& h, const QuadratureSpec& spec) {
    const double smooth = integrate_smooth(s.d, s.shift, h, spec) / std::exp(s.log_smooth_z - s.shift);
    return s.smooth_share * smooth + (s.atom_share > 0.0 ? s.atom_share * h(0.0) : 0.0);
}

}  // namespace

double oracle_expectation(PosteriorKind kind, const OracleParams& params, const std::function<double(double)>& h,
                          const QuadratureSpec& spec) {
    return expect(split_mass(kind, params, spec), h, spec);
}

OracleMoments oracle_moments(PosteriorKind kind, const OracleParams& params, const QuadratureSpec& spec) {
    const Split s = split_mass(kind, params, spec);
    OracleMoments out;
    out.log_z = s.log_z;
    out.z = std::exp(s.log_z);
    out.first = expect(s, [](double x) { return x; }, spec);
    out.second = expect(s, [](double x) { return x * x; }, spec);
    out.abs_first = expect(s, [](double x) { return std::abs(x); }, spec);
    return out;
}

ProbitMoments oracle_probit_integrals(double v, double p_hat, double tau_p, const QuadratureSpec& spec) {
    OracleParams p;
    p.r_hat = p_hat;
    p.tau = tau_p;
    p.noise_var = v;
    p.gamma = 1.0;
    p.y = 1;
    const Density d = make_density(PosteriorKind::ProbitChannel, p);
    const double shift = find_shift(d);
    if (shift == kNegInf) return {};
    const double scale = std::exp(shift);
    ProbitMoments out;
    out.pi0 = scale * integrate_smooth(d, shift, [](double) { return 1.0; }, spec);
    out.pi1 = scale * integrate_smooth(d, shift, [](double x) { return x; }, spec);
    out.pi2 = scale * integrate_smooth(d, shift, [](double x) { return x * x; }, spec);
    return out;
}

TruncMoments oracle_trunc_integrals(double upper, double m, double tau, const QuadratureSpec& spec) {
    const double sd = std::sqrt(tau);
    Density d;
    d.lo = m - kReach * sd;
    d.hi = std::min(upper, m + kReach * sd);
    if (!(d.hi > d.lo)) return {};
    d.kinks = {m};
    d.log_smooth = [m, tau](double x) { return log_gauss(x, m, tau); };
    const double shift = find_shift(d);
    const double scale = std::exp(shift);
    TruncMoments out;
    out.i0 = scale * integrate_smooth(d, shift, [](double) { return 1.0; }, spec);
    out.i1 = scale * integrate_smooth(d, shift, [](double x) { return x; }, spec);
    out.i2 = scale * integrate_smooth(d, shift, [](double x) { return x * x; }, spec);
    return out;
}

namespace {

// log p(y | z) for the flip channel; std::erfc is enough on a grid this size
// and the boost series takes over where it underflows.
double grid_log_lik(int y, double z, const ChannelParams& ch) {
    if (ch.noise_var() == 0.0) {
        return y * z > 0.0 ? std::log(ch.gamma()) : (ch.gamma() < 1.0 ? std::log1p(-ch.gamma()) : kNegInf);
    }
    const double u = y * z / std::sqrt(ch.noise_var());
    const double hit = 0.5 * std::erfc(-u / std::numbers::sqrt2);
    const double miss = 0.5 * std::erfc(u / std::numbers::sqrt2);
    const double lik = ch.gamma() * hit + (1.0 - ch.gamma()) * miss;
    return lik > 1e-280 ? std::log(lik) : log_flip_likelihood(u, ch.gamma());
}

struct Accum {
    double shift = kNegInf;
    double z = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;

    // Adds weight exp(lw) at (x1, x2), rescaling to the running maximum.
    void add(double lw, double x1, double x2) {
        if (lw == kNegInf) return;
        if (lw > shift) {
            const double r = std::exp(shift - lw);
            z *= r;
            m1 *= r;
            m2 *= r;
            shift = lw;
        }
        const double w = std::exp(lw - shift);
        z += w;
        m1 += w * x1;
        m2 += w * x2;
    }
    double log_z() const { return z > 0.0 ? shift + std::log(z) : kNegInf; }
};

// Trapezoid weights vanish at the ends, where the density is negligible.
std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

Vec oracle_posterior_mean_2d(const Mat& a, const SignVec& y, const SignalPrior& prior, const ChannelParams& ch,
                             int fine) {
    if (a.cols() != 2 || a.rows() != y.size()) throw std::invalid_argument("oracle_posterior_mean_2d: needs M x 2");
    if (fine < 11) throw std::invalid_argument("oracle_posterior_mean_2d: grid too coarse");
    const double lam = prior.lambda();
    const double vx = prior.v_x();
    const double reach = 8.0 * std::sqrt(vx);

    auto log_lik = [&](double x1, double x2) {
        double acc = 0.0;
        for (Eigen::Index m = 0; m < a.rows(); ++m) acc += grid_log_lik(y[m], a(m, 0) * x1 + a(m, 1) * x2, ch);
        return acc;
    };
    const double log_off = lam < 1.0 ? std::log1p(-lam) : kNegInf;
    const double log_on = std::log(lam);

    // Atom at the origin: mass (1 - lambda)^2 L(0).
    const double log_atom = 2.0 * log_off + log_lik(0.0, 0.0);

    // Axis lines: x_k ~ N(0, v_x), the other coefficient zero.
    const int n_line = 20 * fine + 1;
    const auto line = uniform_grid(-reach, reach, n_line);
    const double h_line = line[1] - line[0];
    Accum axis[2];
    for (int k = 0; k < 2; ++k) {
        for (double t : line) {
            const double lw = log_gauss(t, 0.0, vx) + (k == 0 ? log_lik(t, 0.0) : log_lik(0.0, t));
            axis[k].add(lw, k == 0 ? t : 0.0, k == 0 ? 0.0 : t);
        }
    }

    // Plane: coarse scan for the live box, then a fine grid on it.
    const int n_coarse = 161;
    const auto coarse = uniform_grid(-reach, reach, n_coarse);
    std::vector<double> lc(n_coarse * n_coarse);
    double peak = kNegInf;
    for (int i = 0; i < n_coarse; ++i) {
        for (int j = 0; j < n_coarse; ++j) {
            const double v = log_gauss(coarse[i], 0.0, vx) + log_gauss(coarse[j], 0.0, vx) + log_lik(coarse[i], coarse[j]);
            lc[i * n_coarse + j] = v;
            peak = std::max(peak, v);
        }
    }
    int i_lo = n_coarse, i_hi = -1, j_lo = n_coarse, j_hi = -1;
    for (int i = 0; i < n_coarse; ++i) {
        for (int j = 0; j < n_coarse; ++j) {
            if (lc[i * n_coarse + j] < peak - 60.0) continue;
            i_lo = std::min(i_lo, i);
            i_hi = std::max(i_hi, i);
            j_lo = std::min(j_lo, j);
            j_hi = std::max(j_hi, j);
        }
    }
    const auto g1 = uniform_grid(coarse[std::max(i_lo - 2, 0)], coarse[std::min(i_hi + 2, n_coarse - 1)], fine);
    const auto g2 = uniform_grid(coarse[std::max(j_lo - 2, 0)], coarse[std::min(j_hi + 2, n_coarse - 1)], fine);
    const double h_plane = (g1[1] - g1[0]) * (g2[1] - g2[0]);
    Accum plane;
    for (double x1 : g1) {
        const double p1 = log_gauss(x1, 0.0, vx);
        for (double x2 : g2) plane.add(p1 + log_gauss(x2, 0.0, vx) + log_lik(x1, x2), x1, x2);
    }

    const double lw_line0 = log_on + log_off + axis[0].log_z() + std::log(h_line);
    const double lw_line1 = log_on + log_off + axis[1].log_z() + std::log(h_line);
    const double lw_plane = 2.0 * log_on + plane.log_z() + std::log(h_plane);
    const double parts[] = {log_atom, lw_line0, lw_line1, lw_plane};
    const double lz = log_sum_exp(parts);

    auto mean_of = [](const Accum& acc, int k) { return (k == 0 ? acc.m1 : acc.m2) / acc.z; };
    Vec out(2);
    for (int k = 0; k < 2; ++k) {
        double m = 0.0;
        if (lw_plane > kNegInf) m += std::exp(lw_plane - lz) * mean_of(plane, k);
        const double lw_axis = k == 0 ? lw_line0 : lw_line1;
        if (lw_axis > kNegInf) m += std::exp(lw_axis - lz) * mean_of(axis[k], k);
        out[k] = m;
    }
    return out;
}

}  // namespace onebit::validation
