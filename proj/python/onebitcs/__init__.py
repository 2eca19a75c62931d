"""One-bit compressed sensing by GAMP, with optional side information."""

from ._onebitcs import (
    AmplitudeGaussian,
    AmplitudeLaplacian,
    ChannelParams,
    ConfigError,
    GampConfig,
    GampResult,
    NoSideInfo,
    SignalPrior,
    SupportSideInfo,
    generate,
    nmse,
    oracle_suite,
    posterior_mean_2d,
    run_config,
    run_noisy1bg,
    run_with_si,
)

__all__ = [
    "AmplitudeGaussian",
    "AmplitudeLaplacian",
    "ChannelParams",
    "ConfigError",
    "GampConfig",
    "GampResult",
    "NoSideInfo",
    "SignalPrior",
    "SupportSideInfo",
    "generate",
    "nmse",
    "oracle_suite",
    "posterior_mean_2d",
    "run_config",
    "run_noisy1bg",
    "run_with_si",
]
