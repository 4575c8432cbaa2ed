"""Hot inner loops, compiled with numba when available.

Each kernel has a pure-numpy twin with identical semantics. The numba path is
used unless numba is missing or the environment variable
``GKPGATE_DISABLE_NUMBA`` is set to a non-empty value other than ``0``.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_FLAG = "GKPGATE_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba = None


def _flag_disables() -> bool:
    value = os.environ.get(ENV_FLAG, "")
    return value not in ("", "0")


USE_NUMBA = numba is not None and not _flag_disables()

# Gaussian tails beyond exp(-PIECE_CUT) are dropped when rendering.
PIECE_CUT = 40.0
SINC_TAPS = 32
SINC_SIGMA = 5.0


def _piece_windows(x0, h, n, a, center, lo, hi):
    reach = np.sqrt(PIECE_CUT / a)
    wlo = np.maximum(lo, center - reach)
    whi = np.minimum(hi, center + reach)
    start = np.maximum(np.ceil((wlo - x0) / h), 0.0)
    stop = np.minimum(np.floor((whi - x0) / h), n - 1.0)
    return start.astype(np.int64), stop.astype(np.int64)


def render_pieces_numpy(x0, h, n, coef, a, center, lo, hi):
    """Sum truncated Gaussian pieces ``coef*exp(-a*(x-center)**2)`` on [lo, hi].

    The grid is ``x_k = x0 + k*h`` for ``k < n``. Returns a complex array.
    """
    coef = np.asarray(coef, dtype=np.complex128)
    a = np.asarray(a, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    start, stop = _piece_windows(x0, h, n, a, center, np.asarray(lo, float), np.asarray(hi, float))
    counts = np.maximum(stop - start + 1, 0)
    total = int(counts.sum())
    out = np.zeros(n, dtype=np.complex128)
    if total == 0:
        return out
    owner = np.repeat(np.arange(coef.size), counts)
    offsets = np.cumsum(counts) - counts
    k = start[owner] + (np.arange(total) - offsets[owner])
    x = x0 + k * h
    vals = coef[owner] * np.exp(-a[owner] * (x - center[owner]) ** 2)
    out.real = np.bincount(k, weights=vals.real, minlength=n)
    out.imag = np.bincount(k, weights=vals.imag, minlength=n)
    return out


def sinc_resample_numpy(samples, x0, h, new_x):
    """Band-limited interpolation of uniform samples at arbitrary points.

    Uses a Gaussian-windowed sinc kernel with ``SINC_TAPS`` taps per side.
    Points outside the sampled range read zeros.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    t = (np.asarray(new_x, dtype=np.float64) - x0) / h
    base = np.floor(t).astype(np.int64)
    out = np.zeros(t.shape, dtype=np.complex128)
    n = samples.size
    for tap in range(-SINC_TAPS + 1, SINC_TAPS + 1):
        k = base + tap
        u = t - k
        w = np.sinc(u) * np.exp(-0.5 * (u / SINC_SIGMA) ** 2)
        valid = (k >= 0) & (k < n)
        out[valid] += w[valid] * samples[k[valid]]
    return out


def _significant(w, rel=1e-18):
    w = np.asarray(w, dtype=np.float64)
    top = np.max(np.abs(w)) if w.size else 0.0
    return np.abs(w) > rel * top


def chirp_sum_numpy(wa, c, wb, x, theta):
    """``sum_i sum_l wa[i] wb[l] exp(i theta c[i] x[l])`` over non-negligible weights."""
    ka, kb = _significant(wa), _significant(wb)
    wa, c = np.asarray(wa)[ka], np.asarray(c, dtype=np.float64)[ka]
    wb, x = np.asarray(wb)[kb], np.asarray(x, dtype=np.float64)[kb]
    total = 0j
    step = max(1, (1 << 22) // max(x.size, 1))
    for s0 in range(0, c.size, step):
        ph = theta * np.outer(c[s0 : s0 + step], x)
        total += complex(wa[s0 : s0 + step] @ (np.cos(ph) + 1j * np.sin(ph)) @ wb)
    return total


if numba is not None:

    @numba.njit(cache=True)
    def chirp_sum_numba(wa, c, wb, x, theta):
        re = 0.0
        im = 0.0
        for i in range(wa.size):
            tc = theta * c[i]
            sr = 0.0
            si = 0.0
            for l in range(wb.size):
                ph = tc * x[l]
                sr += wb[l] * math.cos(ph)
                si += wb[l] * math.sin(ph)
            re += wa[i] * sr
            im += wa[i] * si
        return complex(re, im)

    @numba.njit(cache=True)
    def render_pieces_numba(x0, h, n, coef, a, center, lo, hi):
        out = np.zeros(n, dtype=np.complex128)
        for i in range(coef.size):
            reach = math.sqrt(PIECE_CUT / a[i])
            wlo = max(lo[i], center[i] - reach)
            whi = min(hi[i], center[i] + reach)
            k0 = max(int(math.ceil((wlo - x0) / h)), 0)
            k1 = min(int(math.floor((whi - x0) / h)), n - 1)
            c = coef[i]
            ai = a[i]
            m = center[i]
            for k in range(k0, k1 + 1):
                dx = x0 + k * h - m
                out[k] += c * math.exp(-ai * dx * dx)
        return out

    @numba.njit(cache=True)
    def sinc_resample_numba(samples, x0, h, new_x):
        n = samples.size
        out = np.zeros(new_x.size, dtype=np.complex128)
        for i in range(new_x.size):
            t = (new_x[i] - x0) / h
            base = int(math.floor(t))
            acc = 0j
            for tap in range(-SINC_TAPS + 1, SINC_TAPS + 1):
                k = base + tap
                if k < 0 or k >= n:
                    continue
                u = t - k
                if u == 0.0:
                    w = 1.0
                else:
                    w = math.sin(math.pi * u) / (math.pi * u)
                w *= math.exp(-0.5 * (u / SINC_SIGMA) ** 2)
                acc += w * samples[k]
            out[i] = acc
        return out

else:  # pragma: no cover
    render_pieces_numba = None
    sinc_resample_numba = None
    chirp_sum_numba = None


def render_pieces(x0, h, n, coef, a, center, lo, hi):
    if USE_NUMBA:
        return render_pieces_numba(
            float(x0), float(h), int(n),
            np.ascontiguousarray(coef, dtype=np.complex128),
            np.ascontiguousarray(a, dtype=np.float64),
            np.ascontiguousarray(center, dtype=np.float64),
            np.ascontiguousarray(lo, dtype=np.float64),
            np.ascontiguousarray(hi, dtype=np.float64),
        )
    return render_pieces_numpy(x0, h, n, coef, a, center, lo, hi)


def sinc_resample(samples, x0, h, new_x):
    if USE_NUMBA:
        return sinc_resample_numba(
            np.ascontiguousarray(samples, dtype=np.complex128), float(x0), float(h),
            np.ascontiguousarray(new_x, dtype=np.float64),
        )
    return sinc_resample_numpy(samples, x0, h, new_x)


def chirp_sum(wa, c, wb, x, theta):
    """Bilinear chirp sum with real weights; see ``chirp_sum_numpy``."""
    if USE_NUMBA:
        ka, kb = _significant(wa), _significant(wb)
        return chirp_sum_numba(
            np.ascontiguousarray(np.asarray(wa, dtype=np.float64)[ka]),
            np.ascontiguousarray(np.asarray(c, dtype=np.float64)[ka]),
            np.ascontiguousarray(np.asarray(wb, dtype=np.float64)[kb]),
            np.ascontiguousarray(np.asarray(x, dtype=np.float64)[kb]),
            float(theta),
        )
    return chirp_sum_numpy(wa, c, wb, x, theta)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
