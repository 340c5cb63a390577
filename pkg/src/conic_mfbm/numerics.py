"""Special functions, Poisson weights and adaptive quadrature."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import _pykernels, kernels
from .errors import ConvergenceError

MAX_POISSON_RATE = 700.0


@dataclass(frozen=True)
class Tolerance:
    """Absolute error target and subdivision budget for adaptive quadrature."""

    abs_tol: float = 1e-8
    max_subdivisions: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


@dataclass(frozen=True)
class PoissonWeights:
    weights: tuple[float, ...]
    n_max: int
    renormalization: float  # raw retained mass the weights were divided by

    def __iter__(self):
        # allows ``weights, n_max = poisson_weights(...)``
        yield self.weights
        yield self.n_max


def normal_cdf(x: float) -> float:
    """Standard normal distribution function, via the complementary error function."""
    return kernels.norm_cdf(float(x))


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on the open unit interval.

    Acklam's rational approximation followed by one Halley refinement step.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile requires 0 < p < 1, got {p}")
    return kernels.norm_ppf(float(p))


def poisson_weights(rate: float, tail_tol: float = 1e-12) -> PoissonWeights:
    """Truncated, renormalised Poisson probabilities.

    Parameters
    ----------
    rate : float
        Poisson mean (``lambda * T``), in ``[0, 700]``.
    tail_tol : float
        Truncate at the first ``N`` whose remaining tail mass is below this.

    Returns
    -------
    PoissonWeights
        ``weights[n]`` for ``n = 0..n_max``, summing to one.
    """
    if rate < 0 or not math.isfinite(rate):
        raise ValueError(f"Poisson rate must be a finite non-negative number, got {rate}")
    if rate > MAX_POISSON_RATE:
        raise OverflowError(f"Poisson rate {rate} exceeds {MAX_POISSON_RATE}")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")

    w = math.exp(-rate)
    raw = [w]
    cum = w
    n = 0
    # tail computed as 1 - cum bottoms out near 1e-16; stop there at the latest
    while 1.0 - cum >= tail_tol and (w > 0.0 or n < rate):
        n += 1
        w = w * rate / n
        raw.append(w)
        cum += w
        if n > 10_000:
            break
    total = math.fsum(raw)
    return PoissonWeights(tuple(x / total for x in raw), n, total)


def integrate_adaptive(f: Callable[[float], float], lo: float, hi: float,
                       tol: Tolerance | None = None) -> float:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[lo, hi]``.

    Raises :class:`ConvergenceError` if the subdivision budget runs out before
    the error estimate drops below ``tol.abs_tol``.
    """
    tol = tol or Tolerance()
    if not lo < hi:
        raise ValueError(f"integration bounds must satisfy lo < hi, got [{lo}, {hi}]")
    value, err, ok = _pykernels.adaptive_gk(f, float(lo), float(hi), tol.abs_tol,
                                            tol.max_subdivisions)
    if not ok:
        raise ConvergenceError(
            f"quadrature on [{lo}, {hi}] did not reach {tol.abs_tol:g} "
            f"within {tol.max_subdivisions} subdivisions (estimate {err:.3g})")
    return value
