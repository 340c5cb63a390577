"""Monte Carlo oracle for conic quotes.

Terminal prices are drawn from the exact mixture law (jump count by inversion
of the Poisson CDF, then a Gaussian log-return), so there is no time
discretisation. Each batch has its own PCG64 stream spawned from the seed,
which makes results independent of the order in which batches run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distortion import DistortionSpec, distorted_expectation_sorted, dual
from .pricing import OptionSpec
from .terminal_law import DriftConvention, JumpParams, ModelParams, base_drift
from .numerics import poisson_weights


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1_000_000
    seed: int = 42
    n_batches: int = 20

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.n_samples >= self.n_batches >= 2:
            raise ValueError("need n_samples >= n_batches >= 2")

    def batch_sizes(self) -> list[int]:
        base, extra = divmod(self.n_samples, self.n_batches)
        return [base + (1 if i < extra else 0) for i in range(self.n_batches)]


class McQuote(NamedTuple):
    bid: float
    ask: float
    se_bid: float
    se_ask: float


def _batch_generators(cfg: McConfig) -> list[np.random.Generator]:
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_batches)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def sample_batches(model: ModelParams, jumps: JumpParams,
                   conv: DriftConvention = DriftConvention.COMPENSATED,
                   cfg: McConfig | None = None, tail_tol: float = 1e-12) -> list[np.ndarray]:
    """Terminal prices, one array per batch."""
    cfg = cfg or McConfig()
    pw = poisson_weights(jumps.lam * model.maturity, tail_tol)
    cum = np.cumsum(pw.weights)
    g = base_drift(model, jumps, conv)
    v0 = model.continuous_variance
    out = []
    for rng, size in zip(_batch_generators(cfg), cfg.batch_sizes()):
        u = rng.random(size)
        n = np.minimum(np.searchsorted(cum, u, side="right"), pw.n_max)
        z = rng.standard_normal(size)
        log_ret = g + n * jumps.mu1 + np.sqrt(v0 + n * jumps.sigma1_sq) * z
        out.append(model.s0 * np.exp(log_ret))
    return out


def sample_terminal(model: ModelParams, jumps: JumpParams,
                    conv: DriftConvention = DriftConvention.COMPENSATED,
                    cfg: McConfig | None = None, tail_tol: float = 1e-12) -> np.ndarray:
    """Draws of ``S_T``; the same config always gives the same array."""
    return np.concatenate(sample_batches(model, jumps, conv, cfg, tail_tol))


def mc_quote(opt: OptionSpec, model: ModelParams, jumps: JumpParams,
             conv: DriftConvention, d: DistortionSpec, cfg: McConfig | None = None) -> McQuote:
    """Empirical conic bid/ask with batch-means standard errors.

    The point estimates use the whole sample; the standard errors are the
    spread of the per-batch estimates divided by ``sqrt(n_batches)``.
    """
    cfg = cfg or McConfig()
    disc = math.exp(-model.r * model.maturity)
    d_ask = dual(d)
    batches = [np.sort(opt.payoff(b)) for b in sample_batches(model, jumps, conv, cfg)]
    batch_bid = [disc * distorted_expectation_sorted(b, d) for b in batches]
    batch_ask = [disc * distorted_expectation_sorted(b, d_ask) for b in batches]
    full = np.sort(np.concatenate(batches))
    bid = disc * distorted_expectation_sorted(full, d)
    ask = disc * distorted_expectation_sorted(full, d_ask)
    k = cfg.n_batches
    se_bid = float(np.std(batch_bid, ddof=1) / math.sqrt(k))
    se_ask = float(np.std(batch_ask, ddof=1) / math.sqrt(k))
    return McQuote(bid, ask, se_bid, se_ask)


def sample_jump_factor(jumps: JumpParams, t: float, n_samples: int, seed: int = 0) -> np.ndarray:
    """Draws of ``J(t)``, the product of the jump sizes up to time ``t``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n = rng.poisson(jumps.lam * t, size=n_samples)
    log_j = n * jumps.mu1 + np.sqrt(n * jumps.sigma1_sq) * rng.standard_normal(n_samples)
    return np.exp(log_j)
