import math

import numpy as np
import pytest

from conic_mfbm import (DistortionSpec, DriftConvention, JumpParams, ModelParams, OptionSpec,
                        build_law, closed_form_price, quote)
from conic_mfbm.mc import McConfig, mc_quote, sample_batches, sample_terminal
from conic_mfbm.terminal_law import base_drift

COMP = DriftConvention.COMPENSATED


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_samples=1, n_batches=2)
    with pytest.raises(ValueError):
        McConfig(n_batches=1)
    with pytest.raises(ValueError):
        McConfig(seed=-1)
    with pytest.raises(ValueError):
        McConfig(seed=2 ** 64)
    assert sum(McConfig(1003, 0, 20).batch_sizes()) == 1003


def test_seed_determinism(model, jumps):
    cfg = McConfig(10_000, 42)
    a = sample_terminal(model, jumps, COMP, cfg)
    b = sample_terminal(model, jumps, COMP, cfg)
    np.testing.assert_array_equal(a[:10], b[:10])
    np.testing.assert_array_equal(a, b)
    c = sample_terminal(model, jumps, COMP, McConfig(10_000, 43))
    assert not np.array_equal(a[:10], c[:10])


def test_batches_are_fixed_substreams(model, jumps):
    cfg = McConfig(4000, 7, 4)
    batches = sample_batches(model, jumps, COMP, cfg)
    assert [len(b) for b in batches] == cfg.batch_sizes()
    np.testing.assert_array_equal(np.concatenate(batches), sample_terminal(model, jumps, COMP, cfg))


def test_gaussian_log_return_moments(model):
    jumps = JumpParams()
    n = 1_000_000
    lr = np.log(sample_terminal(model, jumps, COMP, McConfig(n, 42)) / model.s0)
    m0 = base_drift(model, jumps)
    v0 = model.continuous_variance
    assert abs(lr.mean() - m0) <= 4 * math.sqrt(v0 / n)
    # var of the sample variance of a Gaussian is 2 v^2 / (n - 1)
    assert abs(lr.var(ddof=1) - v0) <= 4 * v0 * math.sqrt(2.0 / (n - 1))


def test_empirical_cdf_matches_law(model, jumps, law):
    n = 1_000_000
    x = sample_terminal(model, jumps, COMP, McConfig(n, 42))
    for point in (70.0, 90.0, 100.0, 115.0, 140.0):
        p = law.cdf(point)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(np.mean(x <= point) - p) <= 3 * se


@pytest.mark.parametrize("kind", ["call", "put"])
def test_identity_distortion_is_sample_mean(model, jumps, kind):
    opt = OptionSpec(100, kind)
    cfg = McConfig(200_000, 42)
    q = mc_quote(opt, model, jumps, COMP, DistortionSpec.identity(), cfg)
    mean = math.exp(-model.r * model.maturity) * opt.payoff(sample_terminal(model, jumps, COMP, cfg)).mean()
    assert q.bid == q.ask
    assert q.bid == pytest.approx(mean, abs=1e-12 * max(1.0, mean))


@pytest.mark.parametrize("K", [80.0, 100.0, 120.0])
def test_no_jumps_matches_closed_form(model, K):
    q = mc_quote(OptionSpec(K), model, JumpParams(), COMP, DistortionSpec.identity(),
                 McConfig(1_000_000, 42))
    cf = closed_form_price(model.s0, K, model.r, model.maturity, model.continuous_variance)
    assert abs(q.bid - cf) <= 3 * q.se_bid


def test_standard_error_shrinks(model, jumps):
    opt, d = OptionSpec(100), DistortionSpec.wang(0.25)
    n = 20_000
    small = [mc_quote(opt, model, jumps, COMP, d, McConfig(n, s)).se_bid for s in range(10)]
    big = [mc_quote(opt, model, jumps, COMP, d, McConfig(4 * n, 100 + s)).se_bid for s in range(10)]
    assert np.mean(big) <= 0.6 * np.mean(small)


@pytest.mark.parametrize("gamma", [0.0, 0.25])
@pytest.mark.parametrize("kind", ["call", "put"])
def test_agrees_with_quadrature(model, jumps, law, gamma, kind):
    opt, d = OptionSpec(100, kind), DistortionSpec.wang(gamma)
    mq = mc_quote(opt, model, jumps, COMP, d, McConfig(1_000_000, 42))
    q = quote(opt, law, d)
    assert abs(mq.bid - q.bid) <= 3 * mq.se_bid
    assert abs(mq.ask - q.ask) <= 3 * mq.se_ask
    assert mq.bid <= mq.ask


def test_uncompensated_sampler_matches_law(model, jumps):
    law = build_law(model, jumps, DriftConvention.UNCOMPENSATED)
    n = 400_000
    x = sample_terminal(model, jumps, DriftConvention.UNCOMPENSATED, McConfig(n, 3))
    se = x.std(ddof=1) / math.sqrt(n)
    assert abs(x.mean() - law.expected_terminal_price()) <= 4 * se
