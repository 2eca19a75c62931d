import json

import numpy as np
import pytest

import onebitcs as ob


def problem(seed=4, n=60, m=240):
    prior = ob.SignalPrior(0.1, 5.5)
    ch = ob.ChannelParams(0.15, 0.9)
    a, x, y = ob.generate(n, m, prior, ch, seed=seed)
    return prior, ch, a, x, y


def test_generate_shapes_and_signs():
    _, _, a, x, y = problem()
    assert a.shape == (240, 60)
    assert x.shape == (60,)
    assert set(np.unique(y)) <= {-1, 1}


def test_noisy1bg_recovers_direction():
    prior, ch, a, x, y = problem()
    r = ob.run_noisy1bg(a, y, prior, ch, truth=x)
    assert r.x_hat.shape == x.shape
    assert ob.nmse(x, r.x_hat) < 0.8
    assert len(r.trajectory) == r.inner_iterations_used


def test_flat_side_information_matches_plain():
    prior, ch, a, x, y = problem()
    cfg = ob.GampConfig()
    cfg.em_enabled = False
    base = ob.run_noisy1bg(a, y, prior, ch, cfg).x_hat
    si = ob.AmplitudeGaussian(np.zeros_like(x), 1e8)
    got = ob.run_with_si(a, y, prior, ch, si, cfg).x_hat
    assert np.max(np.abs(got - base)) <= 1e-3


def test_support_side_information_estimates_beta():
    prior, ch, a, x, y = problem()
    labels = np.where(x != 0, 1, -1).astype(np.int32)
    r = ob.run_with_si(a, y, prior, ch, ob.SupportSideInfo(labels, 0.8))
    assert 0.5 < r.estimated_param <= 1.0


def test_run_config_csv():
    cfg = {
        "seed": 3,
        "trials": 2,
        "scenario": {"n": 30, "m": 90, "side_info": {"kind": "noisy_support", "flip_frac": 0.1}},
        "algorithms": ["Noisy1bG", "SupportSI"],
    }
    csv = ob.run_config(json.dumps(cfg))
    lines = csv.splitlines()
    assert lines[0].startswith("sweep_param,sweep_value,algorithm")
    assert len(lines) == 3
    assert csv == ob.run_config(json.dumps(cfg))


def test_config_errors_raise():
    with pytest.raises(ValueError):
        ob.run_config('{"trails": 3}')
