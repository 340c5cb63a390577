"""Backend selection for the numerical kernels.

The compiled extension is used when it imports cleanly. Setting
``CONIC_MFBM_PURE=1`` forces the pure-Python implementation, which is also
the fallback when the extension was never built.
"""
import os

if os.environ.get("CONIC_MFBM_PURE", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND

norm_cdf = _impl.norm_cdf
norm_ppf = _impl.norm_ppf
norm_cdf_many = _impl.norm_cdf_many
wang = _impl.wang
mix_cdf = _impl.mix_cdf
mix_sf = _impl.mix_sf
mix_cdf_many = _impl.mix_cdf_many
wang_many = _impl.wang_many
lstat_weights = _impl.lstat_weights
distorted_integral = _impl.distorted_integral
