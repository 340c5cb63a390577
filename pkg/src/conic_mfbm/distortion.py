"""Distortion functions and distorted expectations.

Only two families are supported: the identity and the Wang transform
``f(u) = Phi(Phi^{-1}(u) + gamma)``. The Wang family is closed under the dual
map ``f -> 1 - f(1 - .)`` (it flips the sign of ``gamma``) and under
composition (the shifts add), which the pricing code relies on.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels


class DistortionKind(str, enum.Enum):
    IDENTITY = "identity"
    WANG = "wang"


@dataclass(frozen=True)
class DistortionSpec:
    kind: DistortionKind = DistortionKind.IDENTITY
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistortionKind(self.kind))
        object.__setattr__(self, "gamma", float(self.gamma))
        if not np.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma}")

    @classmethod
    def identity(cls) -> "DistortionSpec":
        return cls(DistortionKind.IDENTITY, 0.0)

    @classmethod
    def wang(cls, gamma: float) -> "DistortionSpec":
        return cls(DistortionKind.WANG, gamma)

    @property
    def shift(self) -> float:
        """Normal-score shift; zero for the identity."""
        return self.gamma if self.kind is DistortionKind.WANG else 0.0

    def __call__(self, u: float) -> float:
        return apply(self, u)


def apply(d: DistortionSpec, u: float) -> float:
    """Evaluate the distortion at ``u``; ``f(0) = 0`` and ``f(1) = 1`` exactly."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"distortion argument must lie in [0, 1], got {u}")
    return kernels.wang(float(u), d.shift)


def apply_many(d: DistortionSpec, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.size and (u.min() < 0.0 or u.max() > 1.0):
        raise ValueError("distortion arguments must lie in [0, 1]")
    return kernels.wang_many(u, d.shift)


def dual(d: DistortionSpec) -> DistortionSpec:
    """The dual distortion ``u -> 1 - f(1 - u)``."""
    if d.kind is DistortionKind.IDENTITY:
        return d
    return DistortionSpec.wang(-d.gamma)


def check_monotone(d: DistortionSpec, n: int = 101) -> None:
    """Spot-check the distortion axioms on an ``n``-point grid."""
    grid = apply_many(d, np.linspace(0.0, 1.0, n))
    if grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) < 0.0):
        raise ValueError(f"{d} is not a valid distortion function")


def distorted_expectation_sorted(values: Sequence[float], d: DistortionSpec) -> float:
    """Distorted mean of an empirical distribution (an L-statistic).

    ``values`` must be sorted ascending. Atom ``i`` (1-based) gets weight
    ``f(i/n) - f((i-1)/n)``.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("distorted expectation needs a non-empty 1-d sample")
    return float(np.dot(kernels.lstat_weights(x.size, d.shift), x))
