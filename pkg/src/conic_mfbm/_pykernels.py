"""Pure-Python kernels.

Reference implementation of every routine exported by the compiled
``_ckernels`` extension. Selected automatically when the extension is not
built, or when ``CONIC_MFBM_PURE=1`` is set in the environment.
"""
import heapq
import math

import numpy as np
from scipy import special

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the normal quantile (rel. err. 1.15e-9)
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425

# Gauss-Kronrod 7/15 abscissae and weights
XGK = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
       0.207784955007898467600689403773245, 0.0)
WGK = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
       0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
WG = (0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327)

EPS = 2.220446049250313e-16

BACKEND = "python"


def norm_cdf(x):
    return 0.5 * math.erfc(-x / SQRT2)


def norm_ppf(p):
    """Normal quantile, Acklam start plus one Halley step. NaN outside (0, 1)."""
    if not 0.0 < p < 1.0:
        return math.nan
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    # exp(x^2/2) overflows past |x| ~ 37.6; Acklam alone is within 1e-9 there
    if abs(x) < 37.0:
        if x <= 0.0:
            e = norm_cdf(x) - p
        else:
            e = (1.0 - p) - norm_cdf(-x)
        u = e * SQRT2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


def wang(u, gamma):
    if gamma == 0.0:
        return u
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    v = norm_cdf(norm_ppf(u) + gamma)
    # keep f(u) >= u for gamma > 0 (and <= for gamma < 0) through rounding
    return max(v, u) if gamma > 0.0 else min(v, u)


def mix_cdf(x, weights, means, sds, log_s0):
    if x <= 0.0:
        return 0.0
    lx = math.log(x) - log_s0
    total = 0.0
    for w, m, s in zip(weights, means, sds):
        total += w * 0.5 * math.erfc(-(lx - m) / (s * SQRT2))
    return min(total, 1.0)


def mix_sf(x, weights, means, sds, log_s0):
    if x <= 0.0:
        return 1.0
    lx = math.log(x) - log_s0
    total = 0.0
    for w, m, s in zip(weights, means, sds):
        total += w * 0.5 * math.erfc((lx - m) / (s * SQRT2))
    return min(total, 1.0)


def mix_cdf_many(xs, weights, means, sds, log_s0, upper=False):
    """Vectorised mixture CDF (or survival when ``upper``) over an array."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros_like(xs) if not upper else np.ones_like(xs)
    pos = xs > 0.0
    lx = np.log(xs[pos]) - log_s0
    z = (lx[:, None] - np.asarray(means)[None, :]) / np.asarray(sds)[None, :]
    if upper:
        z = -z
    out[pos] = np.minimum(special.ndtr(z) @ np.asarray(weights), 1.0)
    return out


def norm_cdf_many(xs):
    return special.ndtr(np.asarray(xs, dtype=float))


def wang_many(us, gamma):
    us = np.asarray(us, dtype=float)
    if gamma == 0.0:
        return us.copy()
    out = np.where(us >= 1.0, 1.0, 0.0)
    inner = (us > 0.0) & (us < 1.0)
    v = special.ndtr(special.ndtri(us[inner]) + gamma)
    out[inner] = np.maximum(v, us[inner]) if gamma > 0.0 else np.minimum(v, us[inner])
    return out


def lstat_weights(n, gamma):
    """Increments f(i/n) - f((i-1)/n) of the distorted empirical CDF."""
    grid = wang_many(np.arange(n + 1, dtype=float) / n, gamma)
    grid[0] = 0.0
    grid[n] = 1.0
    return np.diff(grid)


def gk15(f, a, b):
    """One Gauss-Kronrod 7/15 panel: (integral, error estimate)."""
    centr = 0.5 * (a + b)
    hlgth = 0.5 * (b - a)
    fc = f(centr)
    resk = fc * WGK[7]
    resg = fc * WG[3]
    resabs = abs(resk)
    fv1 = [0.0] * 7
    fv2 = [0.0] * 7
    for j in range(7):
        dx = hlgth * XGK[j]
        f1 = f(centr - dx)
        f2 = f(centr + dx)
        fv1[j] = f1
        fv2[j] = f2
        resk += WGK[j] * (f1 + f2)
        resabs += WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resasc = WGK[7] * abs(fc - reskh)
    for j in range(7):
        resasc += WGK[j] * (abs(fv1[j] - reskh) + abs(fv2[j] - reskh))
    result = resk * hlgth
    resabs *= abs(hlgth)
    resasc *= abs(hlgth)
    err = abs((resk - resg) * hlgth)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > 2.2250738585072014e-308 / (50.0 * EPS):
        err = max(50.0 * EPS * resabs, err)
    return result, err


def adaptive_gk(f, a, b, abs_tol, max_sub):
    """Globally adaptive GK15. Returns (value, error estimate, converged)."""
    val, err = gk15(f, a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    n = 1
    while total_err > abs_tol:
        if n >= max_sub:
            return total, total_err, False
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n += 1
        # resum rather than update incrementally to avoid drift
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    return total, total_err, True


def distorted_integral(upper, gamma, a, b, weights, means, sds, log_s0, abs_tol, max_sub):
    """Integrate wang(F(x)) (or wang(1 - F(x)) when ``upper``) over [a, b]."""
    weights = tuple(float(w) for w in weights)
    means = tuple(float(m) for m in means)
    sds = tuple(float(s) for s in sds)
    if upper:
        def integrand(x):
            return wang(mix_sf(x, weights, means, sds, log_s0), gamma)
    else:
        def integrand(x):
            return wang(mix_cdf(x, weights, means, sds, log_s0), gamma)
    return adaptive_gk(integrand, a, b, abs_tol, max_sub)
