"""Conic bid/ask pricing under mixed fractional Brownian motion with jumps."""
from .distortion import (DistortionKind, DistortionSpec, apply, apply_many, check_monotone,
                         distorted_expectation_sorted, dual)
from .errors import ConvergenceError, RegimeWarning
from .kernels import BACKEND
from .numerics import Tolerance, integrate_adaptive, normal_cdf, normal_quantile, poisson_weights
from .pricing import (Method, OptionKind, OptionSpec, Quote, ask, bid, closed_form_price, quote,
                      series_price_gamma0, stieltjes_reference)
from .terminal_law import (DriftConvention, JumpParams, ModelParams, TerminalLaw, build_law,
                           jump_factor_moments)

__version__ = "0.1.0"
