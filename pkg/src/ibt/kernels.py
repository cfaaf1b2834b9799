"""Single-core numba kernels for large ensemble experiments.

The statistically heavy experiments (correlation decay, Birkhoff-sum
ensembles, excursion sampling) run 1e9-1e10 map steps, far beyond what
the vectorized object layer can do.  These kernels specialize the three
symmetric beta cut-function families used by the quantitative fixtures,

    family 0: beta(1, 1)       phi(s) = 1 - s            (closed-form inverse)
    family 1: beta(2, 2)       phi(s) = 1 - s^2 (3 - 2s)
    family 2: beta(1/2, 1/2)   phi(s) = 1 - (2/pi) asin(sqrt(s))

whose branch integrals are elementary, so each map step is a few-iteration
safeguarded Newton solve.  All kernels are strictly sequential with a
fixed accumulation order: identical inputs give bit-identical outputs.

For symmetric families A = 1/2, slip1 = slip0, and the right branch is
the reflection f(x) = 1 - f_left(1 - x); only the left-branch inverse is
implemented.

Near-cut policy: a trajectory landing within CUT_EPS of the cut abscissa
is restarted from a caller-supplied spare start and the event is counted;
spares exhausted means the slot is reported censored (NaN / r = -1).
Nothing is silently perturbed or dropped.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import InvalidParameterError
from .factor import CUT_EPS
from .icf import CutFunction

__all__ = [
    "FAM_BETA_1_1",
    "FAM_BETA_2_2",
    "FAM_BETA_H_H",
    "family_code",
    "factor_step",
    "trajectory",
    "correlation_accumulate",
    "birkhoff_sums",
    "excursion_samples",
    "xi_series",
    "induced_images",
    "return_times",
    "OBS_Y_CENTERED",
    "OBS_X_CENTERED",
    "OBS_WEIGHTED",
]

FAM_BETA_1_1 = 0
FAM_BETA_2_2 = 1
FAM_BETA_H_H = 2

# observable codes for birkhoff_sums / excursion_samples
OBS_Y_CENTERED = 0   # X(x, y) = y - 1/2
OBS_X_CENTERED = 1   # X(x, y) = 1/2 - x
OBS_WEIGHTED = 2     # X(x, y) = (1/2 - x) + t (y - 1/2)

_SUPPORTED = {(1.0, 1.0): FAM_BETA_1_1, (2.0, 2.0): FAM_BETA_2_2,
              (0.5, 0.5): FAM_BETA_H_H}

_TWO_OVER_PI = 2.0 / math.pi


def family_code(cf: CutFunction) -> int:
    """Kernel family code for a cut function, or raise if unsupported."""
    if cf.beta_params is not None and tuple(cf.beta_params) in _SUPPORTED:
        return _SUPPORTED[tuple(cf.beta_params)]
    raise InvalidParameterError(
        "compiled kernels support the symmetric beta families "
        "(1,1), (2,2), (1/2,1/2); use the object layer for other cut functions"
    )


@njit(cache=True, inline="always")
def _phi(fam, s):
    if fam == 0:
        return 1.0 - s
    if fam == 1:
        return 1.0 - s * s * (3.0 - 2.0 * s)
    return 1.0 - _TWO_OVER_PI * math.asin(math.sqrt(s))


@njit(cache=True, inline="always")
def _slip0(fam, s):
    # integral_0^s (1 - phi)
    if fam == 0:
        return 0.5 * s * s
    if fam == 1:
        return s * s * s * (1.0 - 0.5 * s)
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 0.5
    r = math.sqrt(s * (1.0 - s))
    return _TWO_OVER_PI * ((s - 0.5) * math.asin(math.sqrt(s)) + 0.5 * r)


@njit(cache=True)
def _finv_left(fam, x):
    """Inverse of w0(s) = s - slip0(s) on [0, 1/2), safeguarded Newton."""
    if fam == 0:
        # s - s^2/2 = x
        return 1.0 - math.sqrt(1.0 - 2.0 * x)
    if x <= 0.0:
        return 0.0
    # bracket [lo, hi] with w0(lo) <= x <= w0(hi)
    lo = x
    hi = 1.0
    s = x + _slip0(fam, x)  # one fixed-point sweep; always <= root
    for _ in range(200):
        g = s - _slip0(fam, s) - x
        if g < 0.0:
            lo = s
        elif g > 0.0:
            hi = s
        else:
            return s
        d = _phi(fam, s)
        if d > 0.0:
            cand = s - g / d
        else:
            cand = lo - 1.0  # force bisection
        if cand <= lo or cand >= hi:
            cand = 0.5 * (lo + hi)
        if abs(cand - s) <= 2.3e-16 * cand:
            return cand
        s = cand
        if hi - lo <= 4.5e-16 * hi:
            return 0.5 * (lo + hi)
    return s


@njit(cache=True, inline="always")
def factor_step(fam, x):
    """(f(x), phi(f(x))); symmetric families, A = 1/2 exactly."""
    if x <= 0.0:
        return 0.0, 1.0
    if x >= 1.0:
        return 1.0, 0.0
    if x < 0.5:
        s = _finv_left(fam, x)
        return s, _phi(fam, s)
    s = 1.0 - _finv_left(fam, 1.0 - x)
    return s, _phi(fam, s)


@njit(cache=True, inline="always")
def _near_cut(x):
    return abs(x - 0.5) < CUT_EPS


@njit(cache=True)
def trajectory(fam, x0, y0, n):
    """(xs, ys, hit): trajectory of length n+1; hit = first iterate index
    landing in the cut window (trajectory truncated there), else -1."""
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0] = x0
    ys[0] = y0
    x = x0
    y = y0
    for k in range(n):
        if _near_cut(x):
            return xs[: k + 1], ys[: k + 1], k
        fx, ph = factor_step(fam, x)
        if x < 0.5:
            y = ph * y
        else:
            y = (1.0 - ph) * y + ph
        x = fx
        xs[k + 1] = x
        ys[k + 1] = y
    return xs, ys, -1


@njit(cache=True, inline="always")
def _ramp(x, p, q, inv_width):
    """Lipschitz mollified indicator of [p, q] in the x coordinate."""
    if x < p:
        d = p - x
    elif x > q:
        d = x - q
    else:
        return 1.0
    v = 1.0 - d * inv_width
    return v if v > 0.0 else 0.0


@njit(cache=True)
def correlation_accumulate(fam, x0s, length, lags, p, q, inv_width, spares):
    """Streaming autocorrelation sums of the mollified base indicator.

    Each start is iterated `length` steps; for every lag k the products
    psi(x_t) psi(x_{t+k}) over all t are accumulated in fixed order.
    Returns (lag_sums, lag_counts, psi_sum, psi_count, redraws).
    """
    n_lags = lags.shape[0]
    lag_sums = np.zeros(n_lags)
    lag_counts = np.zeros(n_lags, dtype=np.int64)
    psi_sum = 0.0
    psi_count = 0
    redraws = 0
    spare_i = 0
    psi = np.empty(length + 1)
    for j in range(x0s.shape[0]):
        x = x0s[j]
        # fill one trajectory's psi values; restart on a cut hit
        t = 0
        guard = 0
        while t <= length:
            if _near_cut(x):
                if spare_i >= spares.shape[0] or guard > 64:
                    break
                x = spares[spare_i]
                spare_i += 1
                redraws += 1
                t = 0
                guard += 1
                continue
            psi[t] = _ramp(x, p, q, inv_width)
            fx, _ = factor_step(fam, x)
            x = fx
            t += 1
        if t <= length:
            continue  # censored slot, reported via redraws/spare exhaustion
        for t in range(length + 1):
            psi_sum += psi[t]
        psi_count += length + 1
        for li in range(n_lags):
            k = lags[li]
            acc = 0.0
            for t in range(length + 1 - k):
                acc += psi[t] * psi[t + k]
            lag_sums[li] += acc
            lag_counts[li] += length + 1 - k
    return lag_sums, lag_counts, psi_sum, psi_count, redraws


@njit(cache=True, inline="always")
def _observe(code, t, x, y):
    if code == 0:
        return y - 0.5
    if code == 1:
        return 0.5 - x
    # quadratic y-weight: breaks the (x,y) -> (1-x,1-y) antisymmetry so the
    # two boundary-line averages can differ in magnitude, not just sign
    d = y - 0.5
    return (0.5 - x) + t * (d * d - 1.0 / 12.0)


@njit(cache=True)
def birkhoff_sums(fam, x0s, y0s, n, obs_code, obs_t, spares_x, spares_y):
    """S_n = sum_{k<n} X(B^k(x,y)) for each start; cut hits restart the
    slot from the spare pool.  Returns (sums, redraws, censored)."""
    m = x0s.shape[0]
    out = np.empty(m)
    redraws = 0
    censored = 0
    spare_i = 0
    for j in range(m):
        x = x0s[j]
        y = y0s[j]
        s = 0.0
        k = 0
        guard = 0
        while k < n:
            if _near_cut(x):
                if spare_i >= spares_x.shape[0] or guard > 64:
                    s = np.nan
                    break
                x = spares_x[spare_i]
                y = spares_y[spare_i]
                spare_i += 1
                redraws += 1
                guard += 1
                s = 0.0
                k = 0
                continue
            s += _observe(obs_code, obs_t, x, y)
            fx, ph = factor_step(fam, x)
            if x < 0.5:
                y = ph * y
            else:
                y = (1.0 - ph) * y + ph
            x = fx
            k += 1
        if np.isnan(s):
            censored += 1
        out[j] = s
    return out, redraws, censored


@njit(cache=True)
def excursion_samples(fam, x0s, y0s, p, q, obs_code, obs_t, r_max):
    """Per start in the base: (xi, r, x_ret, y_ret).

    xi sums the observable over the excursion (start included, return
    point excluded); r is the first-return time.  r = -1 flags a cut hit,
    r = -2 a censored excursion exceeding r_max.
    """
    m = x0s.shape[0]
    xi = np.empty(m)
    rr = np.empty(m, dtype=np.int64)
    xr = np.empty(m)
    yr = np.empty(m)
    for j in range(m):
        x = x0s[j]
        y = y0s[j]
        s = 0.0
        r = 0
        ok = True
        while True:
            if _near_cut(x):
                rr[j] = -1
                xi[j] = np.nan
                xr[j] = np.nan
                yr[j] = np.nan
                ok = False
                break
            s += _observe(obs_code, obs_t, x, y)
            fx, ph = factor_step(fam, x)
            if x < 0.5:
                y = ph * y
            else:
                y = (1.0 - ph) * y + ph
            x = fx
            r += 1
            if p <= x <= q:
                break
            if r >= r_max:
                rr[j] = -2
                xi[j] = np.nan
                xr[j] = np.nan
                yr[j] = np.nan
                ok = False
                break
        if ok:
            xi[j] = s
            rr[j] = r
            xr[j] = x
            yr[j] = y
    return xi, rr, xr, yr


@njit(cache=True)
def xi_series(fam, x0, y0, n_ret, p, q, obs_code, obs_t, r_max):
    """n_ret consecutive excursion sums along one induced orbit.

    Returns (xi, r, n_done): the series is truncated at a cut hit or a
    censored excursion, with n_done the number of completed entries.
    """
    xi = np.empty(n_ret)
    rr = np.empty(n_ret, dtype=np.int64)
    x = x0
    y = y0
    for i in range(n_ret):
        s = 0.0
        r = 0
        while True:
            if _near_cut(x):
                return xi, rr, i
            s += _observe(obs_code, obs_t, x, y)
            fx, ph = factor_step(fam, x)
            if x < 0.5:
                y = ph * y
            else:
                y = (1.0 - ph) * y + ph
            x = fx
            r += 1
            if p <= x <= q:
                break
            if r >= r_max:
                return xi, rr, i
        xi[i] = s
        rr[i] = r
    return xi, rr, n_ret


@njit(cache=True)
def induced_images(fam, x0s, y0s, p, q, r_max):
    """First-return images T(x, y) on the base; r = -1 / -2 as above."""
    m = x0s.shape[0]
    xr = np.empty(m)
    yr = np.empty(m)
    rr = np.empty(m, dtype=np.int64)
    for j in range(m):
        x = x0s[j]
        y = y0s[j]
        r = 0
        while True:
            if _near_cut(x):
                rr[j] = -1
                xr[j] = np.nan
                yr[j] = np.nan
                break
            fx, ph = factor_step(fam, x)
            if x < 0.5:
                y = ph * y
            else:
                y = (1.0 - ph) * y + ph
            x = fx
            r += 1
            if p <= x <= q:
                xr[j] = x
                yr[j] = y
                rr[j] = r
                break
            if r >= r_max:
                rr[j] = -2
                xr[j] = np.nan
                yr[j] = np.nan
                break
    return xr, yr, rr


@njit(cache=True)
def return_times(fam, x0s, p, q, r_max):
    """Return times of base points under the factor map alone."""
    m = x0s.shape[0]
    rr = np.empty(m, dtype=np.int64)
    for j in range(m):
        x = x0s[j]
        r = 0
        while True:
            if _near_cut(x):
                rr[j] = -1
                break
            fx, _ = factor_step(fam, x)
            x = fx
            r += 1
            if p <= x <= q:
                rr[j] = r
                break
            if r >= r_max:
                rr[j] = -2
                break
    return rr
