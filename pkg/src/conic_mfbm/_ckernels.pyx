# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same surface and algorithms as ``_pykernels``."""
from libc.math cimport erfc, sqrt, log, log1p, exp, fabs, NAN, pow as cpow
from libc.stdlib cimport malloc, free

import numpy as np

BACKEND = "cython"

cdef double SQRT2 = 1.4142135623730950488
cdef double SQRT2PI = 2.5066282746310005024
cdef double EPS = 2.220446049250313e-16
cdef double TINY = 2.2250738585072014e-308

cdef double[6] _A = [-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                     1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00]
cdef double[5] _B = [-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                     6.680131188771972e+01, -1.328068155288572e+01]
cdef double[6] _C = [-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                     -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00]
cdef double[4] _D = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                     3.754408661907416e+00]
cdef double _P_LOW = 0.02425

cdef double[8] XGK = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                      0.207784955007898467600689403773245, 0.0]
cdef double[8] WGK = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
cdef double[4] WG = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327]


cdef inline double _cdf(double x) noexcept nogil:
    return 0.5 * erfc(-x / SQRT2)


cdef double _ppf(double p) noexcept nogil:
    cdef double q, r, x, e, u
    if not (0.0 < p < 1.0):
        return NAN
    if p < _P_LOW:
        q = sqrt(-2.0 * log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = sqrt(-2.0 * log1p(-p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if fabs(x) < 37.0:
        if x <= 0.0:
            e = _cdf(x) - p
        else:
            e = (1.0 - p) - _cdf(-x)
        u = e * SQRT2PI * exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


cdef inline double _wang(double u, double gamma) noexcept nogil:
    if gamma == 0.0:
        return u
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    cdef double v = _cdf(_ppf(u) + gamma)
    if gamma > 0.0:
        return v if v > u else u
    return v if v < u else u


cdef struct Mixture:
    int n
    const double *w
    const double *m
    const double *s
    double log_s0
    double gamma
    int upper


cdef double _mix(double x, Mixture *mx) noexcept nogil:
    # CDF of the lognormal mixture, or survival when mx.upper
    cdef double lx, z, total = 0.0
    cdef int i
    if x <= 0.0:
        return 1.0 if mx.upper else 0.0
    lx = log(x) - mx.log_s0
    for i in range(mx.n):
        z = (lx - mx.m[i]) / (mx.s[i] * SQRT2)
        if mx.upper:
            total += mx.w[i] * 0.5 * erfc(z)
        else:
            total += mx.w[i] * 0.5 * erfc(-z)
    return total if total < 1.0 else 1.0


cdef inline double _integrand(double x, Mixture *mx) noexcept nogil:
    return _wang(_mix(x, mx), mx.gamma)


cdef void _gk15(Mixture *mx, double a, double b, double *res, double *err) noexcept nogil:
    cdef double centr = 0.5 * (a + b)
    cdef double hlgth = 0.5 * (b - a)
    cdef double fc = _integrand(centr, mx)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double resabs = fabs(resk)
    cdef double fv1[7]
    cdef double fv2[7]
    cdef double dx, f1, f2, reskh, resasc, e
    cdef int j
    for j in range(7):
        dx = hlgth * XGK[j]
        f1 = _integrand(centr - dx, mx)
        f2 = _integrand(centr + dx, mx)
        fv1[j] = f1
        fv2[j] = f2
        resk += WGK[j] * (f1 + f2)
        resabs += WGK[j] * (fabs(f1) + fabs(f2))
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resasc = WGK[7] * fabs(fc - reskh)
    for j in range(7):
        resasc += WGK[j] * (fabs(fv1[j] - reskh) + fabs(fv2[j] - reskh))
    res[0] = resk * hlgth
    resabs *= fabs(hlgth)
    resasc *= fabs(hlgth)
    e = fabs((resk - resg) * hlgth)
    if resasc != 0.0 and e != 0.0:
        e = resasc * min(1.0, cpow(200.0 * e / resasc, 1.5))
    if resabs > TINY / (50.0 * EPS):
        e = max(50.0 * EPS * resabs, e)
    err[0] = e


def norm_cdf(double x):
    return _cdf(x)


def norm_ppf(double p):
    return _ppf(p)


def wang(double u, double gamma):
    return _wang(u, gamma)


cdef Mixture _pack(double log_s0, double gamma, int upper,
                   const double[::1] w, const double[::1] m,
                   const double[::1] s):
    cdef Mixture mx
    mx.n = w.shape[0]
    mx.w = &w[0]
    mx.m = &m[0]
    mx.s = &s[0]
    mx.log_s0 = log_s0
    mx.gamma = gamma
    mx.upper = upper
    return mx


def mix_cdf(double x, weights, means, sds, double log_s0):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef const double[::1] m = np.ascontiguousarray(means, dtype=float)
    cdef const double[::1] s = np.ascontiguousarray(sds, dtype=float)
    cdef Mixture mx = _pack(log_s0, 0.0, 0, w, m, s)
    return _mix(x, &mx)


def mix_sf(double x, weights, means, sds, double log_s0):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef const double[::1] m = np.ascontiguousarray(means, dtype=float)
    cdef const double[::1] s = np.ascontiguousarray(sds, dtype=float)
    cdef Mixture mx = _pack(log_s0, 0.0, 1, w, m, s)
    return _mix(x, &mx)


def mix_cdf_many(xs, weights, means, sds, double log_s0, upper=False):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=float).ravel()
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef const double[::1] m = np.ascontiguousarray(means, dtype=float)
    cdef const double[::1] s = np.ascontiguousarray(sds, dtype=float)
    cdef Mixture mx = _pack(log_s0, 0.0, 1 if upper else 0, w, m, s)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _mix(xv[i], &mx)
    return out.reshape(np.shape(xs))


def norm_cdf_many(xs):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=float).ravel()
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _cdf(xv[i])
    return out.reshape(np.shape(xs))


def wang_many(us, double gamma):
    cdef const double[::1] uv = np.ascontiguousarray(us, dtype=float).ravel()
    out = np.empty(uv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            ov[i] = _wang(uv[i], gamma)
    return out.reshape(np.shape(us))


def lstat_weights(Py_ssize_t n, double gamma):
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double prev = 0.0, cur, dn = <double>n
    with nogil:
        for i in range(1, n + 1):
            cur = 1.0 if i == n else _wang(i / dn, gamma)
            ov[i - 1] = cur - prev
            prev = cur
    return out


def distorted_integral(upper, double gamma, double a, double b, weights, means, sds,
                       double log_s0, double abs_tol, int max_sub):
    """Globally adaptive GK15 of wang(F) or wang(1 - F) over [a, b]."""
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef const double[::1] m = np.ascontiguousarray(means, dtype=float)
    cdef const double[::1] s = np.ascontiguousarray(sds, dtype=float)
    cdef Mixture mx = _pack(log_s0, gamma, 1 if upper else 0, w, m, s)
    cdef int cap = max(max_sub, 1)
    cdef double *lo = <double *> malloc(cap * sizeof(double))
    cdef double *hi = <double *> malloc(cap * sizeof(double))
    cdef double *val = <double *> malloc(cap * sizeof(double))
    cdef double *er = <double *> malloc(cap * sizeof(double))
    cdef int n = 1, i, worst
    cdef double total, total_err, mid, v1, e1, v2, e2
    cdef bint ok = True
    if lo == NULL or hi == NULL or val == NULL or er == NULL:
        free(lo); free(hi); free(val); free(er)
        raise MemoryError()
    try:
        with nogil:
            lo[0] = a
            hi[0] = b
            _gk15(&mx, a, b, &val[0], &er[0])
            total = val[0]
            total_err = er[0]
            while total_err > abs_tol:
                if n >= cap:
                    ok = False
                    break
                worst = 0
                for i in range(1, n):
                    if er[i] > er[worst]:
                        worst = i
                mid = 0.5 * (lo[worst] + hi[worst])
                _gk15(&mx, lo[worst], mid, &v1, &e1)
                _gk15(&mx, mid, hi[worst], &v2, &e2)
                lo[n] = mid
                hi[n] = hi[worst]
                val[n] = v2
                er[n] = e2
                hi[worst] = mid
                val[worst] = v1
                er[worst] = e1
                n += 1
                total = 0.0
                total_err = 0.0
                for i in range(n):
                    total += val[i]
                    total_err += er[i]
        return total, total_err, ok
    finally:
        free(lo); free(hi); free(val); free(er)
