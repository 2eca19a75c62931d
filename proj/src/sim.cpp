#include "onebit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace onebit {

namespace {

void require_fraction(double f, const char* what) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

std::vector<Eigen::Index> indices_where(const Vec& x, bool active) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x[i] != 0.0) == active) out.push_back(i);
    }
    return out;
}

// Moves `count` randomly chosen active entries of x to randomly chosen
// inactive positions; moved entries get fresh slab amplitudes.
void move_support(Vec& x, std::size_t count, const SignalPrior& prior, Rng& rng) {
    std::vector<Eigen::Index> active = indices_where(x, true);
    std::vector<Eigen::Index> inactive = indices_where(x, false);
    count = std::min({count, active.size(), inactive.size()});
    std::shuffle(active.begin(), active.end(), rng);
    std::shuffle(inactive.begin(), inactive.end(), rng);
    std::normal_distribution<double> slab(0.0, std::sqrt(prior.v_x()));
    for (std::size_t k = 0; k < count; ++k) {
        x[active[k]] = 0.0;
        double amp = slab(rng);
        while (amp == 0.0) amp = slab(rng);
        x[inactive[k]] = amp;
    }
}

double laplace_draw(double v_s, Rng& rng) {
    // Scale b = 2 v_s: density (1 / (2b)) exp(-|w| / b).
    std::exponential_distribution<double> expo(1.0 / (2.0 * v_s));
    std::bernoulli_distribution sign(0.5);
    const double mag = expo(rng);
    return sign(rng) ? mag : -mag;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) {
    const std::uint64_t s = splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Rng(seq);
}

void ScenarioConfig::validate() const {
    if (n < 1 || m < 0) throw std::invalid_argument("ScenarioConfig: N must be >= 1 and M >= 0");
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoisyAmplitude>) {
                require_fraction(p.support_error_frac, "support_error_frac");
                if (!(p.add_noise_var >= 0.0)) throw std::invalid_argument("add_noise_var must be >= 0");
            } else if constexpr (std::is_same_v<T, NoisySupport>) {
                require_fraction(p.flip_frac, "flip_frac");
            } else if constexpr (std::is_same_v<T, SlowVarying>) {
                require_fraction(p.support_change_frac, "support_change_frac");
                if (!(p.amp_innovation_var >= 0.0)) throw std::invalid_argument("amp_innovation_var must be >= 0");
                if (p.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
            }
        },
        si_protocol);
}

Vec gen_signal(const SignalPrior& prior, int n, Rng& rng) {
    std::bernoulli_distribution active(prior.lambda());
    std::normal_distribution<double> slab(0.0, std::sqrt(prior.v_x()));
    Vec x(n);
    for (int i = 0; i < n; ++i) {
        const bool on = active(rng);
        const double amp = slab(rng);
        x[i] = on ? amp : 0.0;
    }
    return x;
}

Mat gen_matrix(int m, int n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(m, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) a(i, j) = g(rng);
    }
    return a;
}

SignVec gen_measurements(const Vec& x, const Mat& a, const ChannelParams& ch, Rng& rng) {
    if (a.cols() != x.size()) throw std::invalid_argument("gen_measurements: A and x dimensions differ");
    const Vec z = a * x;
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sd = std::sqrt(ch.noise_var());
    SignVec y(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double zeta = z[i] + sd * noise(rng);
        const int q = zeta > 0.0 ? 1 : -1;
        // The uniform draw is consumed for every entry so flip patterns
        // stay nested across values of gamma.
        const bool flip = u(rng) < ch.flip_prob();
        y[i] = flip ? -q : q;
    }
    return y;
}

SignVec support_labels(const Vec& x) {
    SignVec s(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) s[i] = x[i] != 0.0 ? 1 : -1;
    return s;
}

SiMaterial gen_side_info(const Vec& x, const SiProtocol& protocol, const SignalPrior& prior, Rng& rng) {
    SiMaterial out;
    if (const auto* p = std::get_if<NoisyAmplitude>(&protocol)) {
        require_fraction(p->support_error_frac, "support_error_frac");
        Vec xt = x;
        const auto k = static_cast<double>(indices_where(x, true).size());
        move_support(xt, static_cast<std::size_t>(std::llround(p->support_error_frac * k)), prior, rng);
        out.support = support_labels(xt);
        if (p->add_noise_var > 0.0) {
            std::normal_distribution<double> g(0.0, std::sqrt(p->add_noise_var));
            for (Eigen::Index i = 0; i < xt.size(); ++i) {
                xt[i] += p->noise_kind == NoiseKind::Gaussian ? g(rng) : laplace_draw(p->add_noise_var, rng);
            }
        }
        out.amplitude = std::move(xt);
    } else if (const auto* p = std::get_if<NoisySupport>(&protocol)) {
        require_fraction(p->flip_frac, "flip_frac");
        SignVec s = support_labels(x);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (u(rng) < p->flip_frac) s[i] = -s[i];
        }
        out.support = std::move(s);
    } else {
        throw std::invalid_argument("gen_side_info: protocol does not produce side information directly");
    }
    return out;
}

std::vector<Vec> gen_epoch_sequence(const Vec& x0, const SlowVarying& protocol, const SignalPrior& prior,
                                    Rng& rng) {
    require_fraction(protocol.support_change_frac, "support_change_frac");
    std::vector<Vec> seq{x0};
    std::normal_distribution<double> innov(0.0, std::sqrt(protocol.amp_innovation_var));
    for (int e = 1; e < protocol.epochs; ++e) {
        Vec x = seq.back();
        const auto k = static_cast<double>(indices_where(x, true).size());
        // Exactly ceil((1 - f) K) indices persist.
        const auto moved = static_cast<std::size_t>(std::floor(protocol.support_change_frac * k + 1e-9));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] != 0.0 && protocol.amp_innovation_var > 0.0) {
                double v = x[i] + innov(rng);
                while (v == 0.0) v = x[i] + innov(rng);
                x[i] = v;
            }
        }
        move_support(x, moved, prior, rng);
        seq.push_back(std::move(x));
    }
    return seq;
}

TrialData gen_trial(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    TrialData t;
    t.a = gen_matrix(cfg.m, cfg.n, rng);
    t.x_true = gen_signal(cfg.prior, cfg.n, rng);
    t.y = gen_measurements(t.x_true, t.a, cfg.ch, rng);
    if (const auto* sv = std::get_if<SlowVarying>(&cfg.si_protocol)) {
        t.epoch_signals = gen_epoch_sequence(t.x_true, *sv, cfg.prior, rng);
        t.epoch_measurements.push_back(t.y);
        for (std::size_t e = 1; e < t.epoch_signals.size(); ++e) {
            t.epoch_measurements.push_back(gen_measurements(t.epoch_signals[e], t.a, cfg.ch, rng));
        }
    } else if (!std::holds_alternative<NoSiProtocol>(cfg.si_protocol)) {
        t.si = gen_side_info(t.x_true, cfg.si_protocol, cfg.prior, rng);
    }
    return t;
}

Nmse nmse(const Vec& x_true, const Vec& x_hat) {
    if (x_true.size() != x_hat.size()) throw std::invalid_argument("nmse: length mismatch");
    const double nx = x_true.norm();
    if (!(nx > 0.0)) throw std::domain_error("nmse: undefined for an all-zero true signal");
    const double nh = x_hat.norm();
    if (nh == 0.0) return {1.0, true};
    return {(x_true / nx - x_hat / nh).norm(), false};
}

}  // namespace onebit
