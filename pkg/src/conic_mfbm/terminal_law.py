"""Law of the terminal price under mixed fBM with lognormal Poisson jumps.

Conditional on ``n`` jumps by maturity, ``log(S_T / S_0)`` is Gaussian with

    mean     m_n = rT - sigma^2 T / 2 - epsilon^2 T^{2H} / 2 [+ compensator] + n mu1
    variance s_n^2 = sigma^2 T + epsilon^2 T^{2H} + n sigma1^2

so ``S_T`` is a Poisson-weighted mixture of lognormals. ``sigma`` drives the
Brownian leg and ``epsilon`` the fractional one.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConvergenceError, RegimeWarning
from .numerics import normal_quantile, poisson_weights

_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DriftConvention(str, enum.Enum):
    COMPENSATED = "compensated"
    UNCOMPENSATED = "uncompensated"


@dataclass(frozen=True)
class ModelParams:
    s0: float
    r: float
    sigma: float
    epsilon: float
    hurst: float
    maturity: float

    def __post_init__(self):
        for name in ("s0", "r", "sigma", "epsilon", "hurst", "maturity"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.s0 <= 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if self.maturity <= 0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")
        if self.sigma < 0 or self.epsilon < 0:
            raise ValueError("sigma and epsilon must be non-negative")
        if self.sigma == 0 and self.epsilon == 0:
            raise ValueError("sigma and epsilon cannot both be zero")
        if not 0.0 < self.hurst <= 1.0:
            raise ValueError(f"hurst must lie in (0, 1], got {self.hurst}")
        if not self.in_arbitrage_free_regime:
            warnings.warn(f"hurst={self.hurst} is outside the arbitrage-free range (0.75, 1]",
                          RegimeWarning, stacklevel=3)

    @property
    def in_arbitrage_free_regime(self) -> bool:
        return 0.75 < self.hurst <= 1.0

    @property
    def continuous_variance(self) -> float:
        """Variance of the continuous part of the log-return over ``[0, T]``."""
        T = self.maturity
        return self.sigma ** 2 * T + self.epsilon ** 2 * T ** (2 * self.hurst)


@dataclass(frozen=True)
class JumpParams:
    lam: float = 0.0
    mu1: float = 0.0
    sigma1_sq: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.mu1)
                and math.isfinite(self.sigma1_sq)):
            raise ValueError("jump parameters must be finite")
        if self.lam < 0:
            raise ValueError(f"jump intensity must be non-negative, got {self.lam}")
        if self.sigma1_sq < 0:
            raise ValueError(f"sigma1_sq must be non-negative, got {self.sigma1_sq}")

    @property
    def mean_jump(self) -> float:
        return math.exp(self.mu1 + 0.5 * self.sigma1_sq)

    @property
    def second_moment_jump(self) -> float:
        return math.exp(2.0 * self.mu1 + 2.0 * self.sigma1_sq)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TerminalLaw:
    """Truncated Poisson mixture of lognormals for ``S_T``."""

    weights: np.ndarray
    log_means: np.ndarray
    log_sds: np.ndarray
    s0: float
    r: float
    maturity: float
    tail_tol_used: float
    drift: DriftConvention = DriftConvention.COMPENSATED
    log_s0: float = field(init=False)
    _grids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_grids", {})
        object.__setattr__(self, "weights", _frozen(self.weights))
        object.__setattr__(self, "log_means", _frozen(self.log_means))
        object.__setattr__(self, "log_sds", _frozen(self.log_sds))
        object.__setattr__(self, "log_s0", math.log(self.s0))
        if not (len(self.weights) == len(self.log_means) == len(self.log_sds) >= 1):
            raise ValueError("weights, log_means and log_sds must have equal non-zero length")
        if np.any(self.log_sds <= 0):
            raise ValueError("every mixture component needs a positive log-sd")

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1

    @property
    def discount_rT(self) -> float:
        return self.r * self.maturity

    @property
    def discount_factor(self) -> float:
        return math.exp(-self.r * self.maturity)

    def _args(self):
        return self.weights, self.log_means, self.log_sds, self.log_s0

    def cdf(self, x: float) -> float:
        return kernels.mix_cdf(float(x), *self._args())

    def sf(self, x: float) -> float:
        """``1 - cdf(x)``, computed without cancellation."""
        return kernels.mix_sf(float(x), *self._args())

    def cdf_many(self, xs) -> np.ndarray:
        return kernels.mix_cdf_many(xs, *self._args())

    def sf_many(self, xs) -> np.ndarray:
        return kernels.mix_cdf_many(xs, *self._args(), upper=True)

    def g_n_cdf(self, n: int, x: float) -> float:
        """CDF of ``S_T`` conditional on exactly ``n`` jumps."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"component {n} outside 0..{self.n_max}")
        if x <= 0:
            return 0.0
        z = (math.log(x) - self.log_s0 - self.log_means[n]) / self.log_sds[n]
        return kernels.norm_cdf(z)

    def median_of_term(self, n: int) -> float:
        return self.s0 * math.exp(self.log_means[n])

    def quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise ValueError(f"quantile level must lie in (0, 1), got {p}")
        return float(self.quantile_many(np.array([p]))[0])

    def quantile_many(self, ps) -> np.ndarray:
        ps = np.asarray(ps, dtype=float)
        if ps.size and (ps.min() <= 0.0 or ps.max() >= 1.0):
            raise ValueError("quantile levels must lie in (0, 1)")
        out = np.empty_like(ps)
        lower = ps <= 0.5
        out[lower] = self._invert(ps[lower], upper=False)
        out[~lower] = self._invert(1.0 - ps[~lower], upper=True)
        return out

    def quantile_at_scores(self, z) -> np.ndarray:
        """Quantiles at levels ``Phi(z)``, with the upper half solved on the survival side."""
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        lower = z <= 0.0
        out[lower] = self._invert(kernels.norm_cdf_many(z[lower]), upper=False, z=z[lower])
        out[~lower] = self._invert(kernels.norm_cdf_many(-z[~lower]), upper=True, z=z[~lower])
        return out

    def score_grid(self, z_max: float, n: int) -> np.ndarray:
        """Read-only quantiles at ``n + 1`` scores spaced evenly on ``[-z_max, z_max]``.

        Cached per ``(z_max, n)``, since the law is immutable.
        """
        key = (float(z_max), int(n))
        if key not in self._grids:
            self._grids[key] = _frozen(self.quantile_at_scores(np.linspace(-z_max, z_max, n + 1)))
        return self._grids[key]

    def upper_quantile(self, q: float) -> float:
        """The price exceeded with probability ``q``; accurate for tiny ``q``."""
        if not 0.0 < q < 1.0:
            raise ValueError(f"tail probability must lie in (0, 1), got {q}")
        return float(self._invert(np.array([q]), upper=True)[0])

    def _invert(self, targets: np.ndarray, upper: bool, z=None, max_iter: int = 200) -> np.ndarray:
        """Solve cdf(x) = t (or sf(x) = t) by safeguarded Newton in log-price.

        ``z`` are the standard normal scores of the levels, if already known.
        """
        if targets.size == 0:
            return targets.copy()
        m, s = self.log_means, self.log_sds
        if z is None:
            z = np.array([normal_quantile(t) for t in targets])
            if upper:
                z = -z
        # mixture quantile lies between the extreme component quantiles
        comp = m[None, :] + s[None, :] * z[:, None]
        lo = comp.min(axis=1) - 1e-12
        hi = comp.max(axis=1) + 1e-12
        y = 0.5 * (lo + hi)
        sign = -1.0 if upper else 1.0
        done = np.zeros(targets.shape, dtype=bool)
        for _ in range(max_iter):
            x = self.s0 * np.exp(y)
            val = self.sf_many(x) if upper else self.cdf_many(x)
            g = sign * (val - targets)  # increasing in y
            done = (np.abs(g) <= 1e-14 * targets) | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(y)))
            if done.all():
                break
            lo = np.where(g < 0, y, lo)
            hi = np.where(g > 0, y, hi)
            zz = (y[:, None] - m[None, :]) / s[None, :]
            dens = (self.weights[None, :] * np.exp(-0.5 * zz * zz) / s[None, :]).sum(axis=1)
            dens *= _INV_SQRT2PI
            with np.errstate(divide="ignore", invalid="ignore"):
                step = y - g / dens
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            y_new = np.where(bad, 0.5 * (lo + hi), step)
            y = np.where(done, y, y_new)
        else:
            if not done.all():
                raise ConvergenceError("terminal-law quantile did not converge")
        return self.s0 * np.exp(y)

    def expected_terminal_price(self) -> float:
        return float(np.sum(self.weights * self.s0
                            * np.exp(self.log_means + 0.5 * self.log_sds ** 2)))


def base_drift(model: ModelParams, jumps: JumpParams,
               conv: DriftConvention = DriftConvention.COMPENSATED) -> float:
    T, H = model.maturity, model.hurst
    g = model.r * T - 0.5 * model.sigma ** 2 * T - 0.5 * model.epsilon ** 2 * T ** (2 * H)
    if DriftConvention(conv) is DriftConvention.COMPENSATED:
        g += jumps.lam * T * (1.0 - jumps.mean_jump)
    return g


def build_law(model: ModelParams, jumps: JumpParams,
              conv: DriftConvention = DriftConvention.COMPENSATED,
              tail_tol: float = 1e-12) -> TerminalLaw:
    conv = DriftConvention(conv)
    v0 = model.continuous_variance
    if not v0 > 0:
        raise ValueError("continuous log-variance must be positive")
    pw = poisson_weights(jumps.lam * model.maturity, tail_tol)
    n = np.arange(pw.n_max + 1, dtype=float)
    means = base_drift(model, jumps, conv) + n * jumps.mu1
    sds = np.sqrt(v0 + n * jumps.sigma1_sq)
    return TerminalLaw(pw.weights, means, sds, model.s0, model.r, model.maturity,
                       tail_tol, conv)


def jump_factor_moments(jumps: JumpParams, t: float) -> tuple[float, float]:
    """Mean and variance of the cumulative jump factor ``J(t)``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    mean = math.exp(-jumps.lam * t * (1.0 - jumps.mean_jump))
    second = math.exp(-jumps.lam * t * (1.0 - jumps.second_moment_jump))
    return mean, second - mean * mean
