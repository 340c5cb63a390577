"""Conic bid and ask prices for European calls and puts.

The bid is the discounted distorted expectation of the payoff and the ask is
the same under the dual distortion. Three independent evaluation routes:

* ``bid`` / ``ask``: survival-integral form, integrated by adaptive GK15.
  The strike sits on an integration endpoint, so the integrand is smooth.
* ``stieltjes_reference``: midpoint Riemann-Stieltjes sums of
  ``x d f(F(x))`` on a quantile-spaced grid.
* ``series_price_gamma0``: undistorted Poisson series of lognormal prices.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .distortion import DistortionSpec, apply_many, check_monotone, dual
from .errors import ConvergenceError
from .numerics import Tolerance, normal_cdf, normal_quantile
from .terminal_law import TerminalLaw

# distorted survival below this (per unit of s0) is dropped from call integrals
CALL_TAIL_THRESHOLD = 1e-12
# probability left outside each end of the Stieltjes grid
STIELTJES_TAIL = 1e-10


class OptionKind(str, enum.Enum):
    CALL = "call"
    PUT = "put"


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    STIELTJES = "stieltjes"
    MONTE_CARLO = "montecarlo"


@dataclass(frozen=True)
class OptionSpec:
    strike: float
    kind: OptionKind = OptionKind.CALL

    def __post_init__(self):
        kind = self.kind.value if isinstance(self.kind, OptionKind) else str(self.kind)
        object.__setattr__(self, "kind", OptionKind(kind.lower()))
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise ValueError(f"strike must be positive, got {self.strike}")

    def payoff(self, prices) -> np.ndarray:
        prices = np.asarray(prices, dtype=float)
        if self.kind is OptionKind.CALL:
            return np.maximum(prices - self.strike, 0.0)
        return np.maximum(self.strike - prices, 0.0)


@dataclass(frozen=True)
class Quote:
    bid: float
    ask: float
    gamma: float
    method: Method = Method.QUADRATURE

    @property
    def mid(self) -> float:
        return 0.5 * (self.bid + self.ask)

    @property
    def spread(self) -> float:
        return self.ask - self.bid


def _distorted_payoff_mean(opt: OptionSpec, law: TerminalLaw, shift: float,
                           tol: Tolerance) -> float:
    """Undiscounted ``E_f[payoff]`` for the Wang distortion with the given shift.

    Uses ``1 - f_g(u) = f_{-g}(1 - u)`` so every integrand is a distortion of a
    small probability:

        call: int_K^inf f_{-g}(S(x)) dx      put: int_0^K f_{-g}(F(x)) dx
    """
    args = (law.weights, law.log_means, law.log_sds, law.log_s0)
    K = opt.strike
    if opt.kind is OptionKind.CALL:
        eps = min(CALL_TAIL_THRESHOLD, tol.abs_tol / (law.s0 * law.discount_factor))
        # f_{-g}(q) < eps  <=>  q < f_{g}(eps)
        q_star = kernels.wang(eps, shift)
        hi = law.upper_quantile(q_star)
        if hi <= K:
            return 0.0
        value, err, ok = kernels.distorted_integral(True, -shift, K, hi, *args,
                                                    tol.abs_tol, tol.max_subdivisions)
    else:
        value, err, ok = kernels.distorted_integral(False, -shift, 0.0, K, *args,
                                                    tol.abs_tol, tol.max_subdivisions)
    if not ok:
        raise ConvergenceError(
            f"{opt.kind.value} integral did not reach {tol.abs_tol:g} "
            f"within {tol.max_subdivisions} subdivisions (estimate {err:.3g})")
    return value


def bid(opt: OptionSpec, law: TerminalLaw, d: DistortionSpec,
        tol: Tolerance | None = None) -> float:
    """Conic bid: discounted distorted expectation of the payoff."""
    tol = tol or Tolerance()
    check_monotone(d)
    return law.discount_factor * _distorted_payoff_mean(opt, law, d.shift, tol)


def ask(opt: OptionSpec, law: TerminalLaw, d: DistortionSpec,
        tol: Tolerance | None = None) -> float:
    """Conic ask: the bid under the dual distortion."""
    return bid(opt, law, dual(d), tol)


def quote(opt: OptionSpec, law: TerminalLaw, d: DistortionSpec,
          tol: Tolerance | None = None, method: Method | str = Method.QUADRATURE,
          n_grid: int = 100_000) -> Quote:
    method = Method(method)
    if method is Method.QUADRATURE:
        b, a = bid(opt, law, d, tol), ask(opt, law, d, tol)
    elif method is Method.STIELTJES:
        b = stieltjes_reference(opt, law, d, n_grid, side="bid")
        a = stieltjes_reference(opt, law, d, n_grid, side="ask")
    else:
        raise ValueError("Monte Carlo quotes come from mc.mc_quote")
    slack = 2.0 * (tol or Tolerance()).abs_tol if method is Method.QUADRATURE else 1e-4 * law.s0
    if d.shift >= 0 and not (b >= -slack and b <= a + slack):
        raise ConvergenceError(f"inconsistent quote: bid={b!r}, ask={a!r}")
    return Quote(b, a, d.shift, method)


def closed_form_price(s0: float, strike: float, r: float, T: float,
                      total_variance: float, kind: OptionKind | str = OptionKind.CALL) -> float:
    """Black-Scholes type price for a lognormal terminal law.

    ``total_variance`` is the variance of ``log S_T`` (for mixed fBM,
    ``sigma^2 T + epsilon^2 T^{2H}``). Puts follow from parity.
    """
    if not total_variance > 0:
        raise ValueError(f"total variance must be positive, got {total_variance}")
    v = math.sqrt(total_variance)
    d1 = (math.log(s0 / strike) + r * T + 0.5 * total_variance) / v
    d2 = d1 - v
    disc_k = strike * math.exp(-r * T)
    call = s0 * normal_cdf(d1) - disc_k * normal_cdf(d2)
    if OptionKind(kind) is OptionKind.CALL:
        return call
    return call - s0 + disc_k


def lognormal_european(log_mean: float, log_sd: float, strike: float, discount: float,
                       kind: OptionKind) -> float:
    """``discount * E[(L - K)^+]`` (or the put) for ``log L ~ N(log_mean, log_sd^2)``."""
    d2 = (log_mean - math.log(strike)) / log_sd
    d1 = d2 + log_sd
    fwd = math.exp(log_mean + 0.5 * log_sd * log_sd)
    if kind is OptionKind.CALL:
        return discount * (fwd * normal_cdf(d1) - strike * normal_cdf(d2))
    return discount * (strike * normal_cdf(-d2) - fwd * normal_cdf(-d1))


def series_price_gamma0(opt: OptionSpec, law: TerminalLaw) -> float:
    """Risk-neutral price as a Poisson-weighted sum of lognormal prices."""
    disc = law.discount_factor
    terms = [w * lognormal_european(law.log_s0 + m, s, opt.strike, disc, opt.kind)
             for w, m, s in zip(law.weights, law.log_means, law.log_sds)]
    return math.fsum(terms)


def stieltjes_reference(opt: OptionSpec, law: TerminalLaw, d: DistortionSpec,
                        n_grid: int = 100_000, side: str = "bid") -> float:
    """Bid or ask from midpoint Riemann-Stieltjes sums.

    Grid nodes are the quantiles at ``n_grid + 1`` levels from ``1e-10`` to
    ``1 - 1e-10``, equally spaced in normal score so both tails are resolved,
    with the strike inserted as a node. Integrals:

        call bid:  int_K^inf x df(F) - K int_K^inf df(F)
        call ask: -int_K^inf x df(1-F) + K int_K^inf df(1-F)
        put bid:  -K int_0^K df(1-F) + int_0^K x df(1-F)
        put ask:   K int_0^K df(F) - int_0^K x df(F)
    """
    if n_grid < 100:
        raise ValueError(f"n_grid must be at least 100, got {n_grid}")
    if side not in ("bid", "ask"):
        raise ValueError(f"side must be 'bid' or 'ask', got {side!r}")
    K = opt.strike
    z_max = -normal_quantile(STIELTJES_TAIL)
    x = law.score_grid(z_max, n_grid)
    x = np.unique(np.append(x, K))
    F = law.cdf_many(x)
    S = law.sf_many(x)
    xbar = 0.5 * (x[1:] + x[:-1])
    call = opt.kind is OptionKind.CALL
    cells = xbar > K if call else xbar < K
    use_survival = (side == "ask") == call
    G = apply_many(d, S if use_survival else F)
    dG = np.diff(G)[cells]
    xb = xbar[cells]
    x_part = math.fsum(xb * dG)
    k_part = K * math.fsum(dG)
    if call and side == "bid":
        value = x_part - k_part
    elif call:
        value = -x_part + k_part
    elif side == "bid":
        value = -k_part + x_part
    else:
        value = k_part - x_part
    return law.discount_factor * value
