#pragma once

#include "onebit/benchmark.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace onebit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment description in JSON. Every key is optional and falls back to
/// the defaults of ExperimentConfig; unknown keys are rejected.
///
///   {
///     "seed": 1, "trials": 50, "threads": 1, "timing": false,
///     "scenario": {
///       "n": 200, "m": 600, "lambda": 0.1, "v_x": 5.5,
///       "noise_var": 0.15, "flip_prob": 0.15,
///       "side_info": {"kind": "noisy_amplitude", "support_error_frac": 0.1,
///                     "add_noise_var": 0.15, "noise_kind": "gaussian"}
///     },
///     "algorithms": ["Noisy1bG", "LaplacianSI"],
///     "sweep": {"param": "M", "values": [400, 600, 800]},
///     "gamp": {"max_inner_iters": 30, "max_outer_iters": 10, "damping": 1.0,
///              "tau_floor": 1e-12, "tau_s_floor": 1e-12,
///              "convergence_tol": 1e-6, "warm_start": true},
///     "em": {"enabled": true, "initial_vs": 1.0, "initial_beta": 0.9,
///            "sequential": false}
///   }
///
/// side_info kinds: "none", "noisy_amplitude", "noisy_support" {flip_frac},
/// "slow_varying" {support_change_frac, amp_innovation_var, epochs}.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace onebit
