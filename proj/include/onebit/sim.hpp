#pragma once

#include "onebit/channel.hpp"
#include "onebit/priors.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace onebit {

using Rng = std::mt19937_64;

/// Stream splitting: every (master, stream) pair gets an independent
/// generator seeded from two rounds of splitmix64. Trials use stream = trial index.
Rng make_stream(std::uint64_t master_seed, std::uint64_t stream);
std::uint64_t splitmix64(std::uint64_t x);

enum class NoiseKind { Gaussian, Laplacian };

struct NoSiProtocol {};

/// Support of the SI differs from the signal's on `support_error_frac` of the
/// active indices; amplitude noise is then added to every entry. For
/// Gaussian noise `add_noise_var` is the variance; for Laplacian noise it is
/// the v_s of the density (1 / (4 v_s)) exp(-|w| / (2 v_s)).
struct NoisyAmplitude {
    double support_error_frac = 0.1;
    double add_noise_var = 0.15;
    NoiseKind noise_kind = NoiseKind::Gaussian;
};

/// Support labels of the signal, each flipped independently w.p. flip_frac.
struct NoisySupport {
    double flip_frac = 0.1;
};

/// A sequence of signals whose support turns over slowly.
struct SlowVarying {
    double support_change_frac = 0.1;
    double amp_innovation_var = 0.1;
    int epochs = 10;
};

using SiProtocol = std::variant<NoSiProtocol, NoisyAmplitude, NoisySupport, SlowVarying>;

struct ScenarioConfig {
    int n = 200;
    int m = 600;
    SignalPrior prior{0.1, 5.5};
    ChannelParams ch{0.15, 0.85};
    SiProtocol si_protocol = NoSiProtocol{};
    std::uint64_t seed = 1;

    void validate() const;
};

/// What a side-information protocol hands to the receiver. Amplitude
/// protocols also carry the support labels of the SI before amplitude noise.
struct SiMaterial {
    std::optional<Vec> amplitude;
    std::optional<SignVec> support;
};

struct TrialData {
    Vec x_true;
    Mat a;
    SignVec y;
    SiMaterial si;
    /// Slow-varying scenarios: one signal and measurement vector per epoch
    /// (x_true / y hold epoch 0).
    std::vector<Vec> epoch_signals;
    std::vector<SignVec> epoch_measurements;
};

Vec gen_signal(const SignalPrior& prior, int n, Rng& rng);

/// i.i.d. N(0, 1) entries, no column normalization.
Mat gen_matrix(int m, int n, Rng& rng);

/// y = eta .* Q(A x + noise), Q(z) = +1 if z > 0 else -1.
SignVec gen_measurements(const Vec& x, const Mat& a, const ChannelParams& ch, Rng& rng);

/// Side information for the amplitude and support protocols.
SiMaterial gen_side_info(const Vec& x, const SiProtocol& protocol, const SignalPrior& prior, Rng& rng);

/// Epoch sequence for the slow-varying protocol; element 0 is `x0`.
std::vector<Vec> gen_epoch_sequence(const Vec& x0, const SlowVarying& protocol, const SignalPrior& prior,
                                    Rng& rng);

/// Support encoding: +1 where x != 0, -1 elsewhere.
SignVec support_labels(const Vec& x);

/// Full trial under `cfg`, drawn from `rng` in a fixed order (A, x, y, SI).
TrialData gen_trial(const ScenarioConfig& cfg, Rng& rng);

struct Nmse {
    double value = 0.0;
    /// Set when x_hat was exactly zero; value is then 1 by convention.
    bool zero_estimate = false;
};

/// || x / ||x|| - x_hat / ||x_hat|| ||_2. Throws std::domain_error if x == 0.
Nmse nmse(const Vec& x_true, const Vec& x_hat);

}  // namespace onebit
