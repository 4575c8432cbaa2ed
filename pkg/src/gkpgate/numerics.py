"""Gaussian special functions, lattice sums and complex quadrature."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DomainError, ResourceError

MAX_LATTICE_TERMS = 10_000_000


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 0.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol >= 0:
            raise DomainError(f"rel_tol must be non-negative, got {self.rel_tol}")

    def allows(self, value: complex, error: float) -> bool:
        return error <= max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class LatticeSumSpec:
    """Parameters of the shifted lattice sum of ``rho_s``."""

    s: float
    shift: float = 0.0
    tail_tol: float = 1e-12

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError(f"Gaussian width s must be positive, got {self.s}")
        if not self.tail_tol > 0:
            raise DomainError(f"tail_tol must be positive, got {self.tail_tol}")

    @property
    def radius(self) -> float:
        """Radius r at which the discrete Gaussian tail bound drops below tail_tol."""
        return tail_radius(self.s, self.tail_tol)


def rho(s: float, x):
    """``exp(-pi x^2 / s^2)``."""
    if not s > 0:
        raise DomainError(f"Gaussian width s must be positive, got {s}")
    x = np.asarray(x, dtype=float)
    out = np.exp(-math.pi * x * x / (s * s))
    return float(out) if out.ndim == 0 else out


def tail_bound(s: float, r: float) -> float:
    """Upper bound ``2 exp(-(3 pi / 4) (r/s)^2)`` on Pr[|X_s| >= r]."""
    return 2.0 * math.exp(-0.75 * math.pi * (r / s) ** 2)


def tail_radius(s: float, tail_tol: float) -> float:
    """Smallest r with ``tail_bound(s, r) <= tail_tol``."""
    if tail_tol >= 2.0:
        return 0.0
    return s * math.sqrt(4.0 * math.log(2.0 / tail_tol) / (3.0 * math.pi))


def _window(s: float, tail_tol: float) -> int:
    # One extra site covers shifts in [-1/2, 1/2).
    r = math.ceil(tail_radius(s, tail_tol)) + 1
    if 2 * r + 1 > MAX_LATTICE_TERMS:
        raise ResourceError(f"lattice window of {2 * r + 1} terms exceeds the budget")
    return r


def lattice_gaussian_sum(s: float, t, tail_tol: float = 1e-12):
    """Vectorized ``f_s(t) = sum_z rho_s(z + t)``."""
    if not s > 0:
        raise DomainError(f"Gaussian width s must be positive, got {s}")
    t = np.asarray(t, dtype=float)
    frac = t - np.round(t)
    r = _window(s, tail_tol)
    z = np.arange(-r, r + 1, dtype=float)
    y = z[:, None] + frac.reshape(1, -1)
    vals = np.exp(-math.pi * y * y / (s * s)).sum(axis=0)
    return float(vals[0]) if t.ndim == 0 else vals.reshape(t.shape)


def periodic_gaussian(spec: LatticeSumSpec) -> float:
    """``f_s(t)`` for ``t = spec.shift`` with omitted mass below ``spec.tail_tol``."""
    return lattice_gaussian_sum(spec.s, spec.shift, spec.tail_tol)


def discrete_gaussian_tail(s: float, r: float) -> tuple[float, float]:
    """Return (tail bound, exact tail probability) for the discrete Gaussian X_s.

    ``Pr[X_s = z]`` is proportional to ``rho_s(z)``; the exact tail is summed
    directly over ``|z| >= r`` so it does not suffer from cancellation.
    """
    if not s > 0 or not r > 0:
        raise DomainError(f"need s > 0 and r > 0, got s={s}, r={r}")
    total = lattice_gaussian_sum(s, 0.0, 1e-17)
    z0 = math.ceil(r)
    z_stop = z0 + math.ceil(s * 4.0) + 2
    z = np.arange(z0, z_stop, dtype=float)
    tail = 2.0 * float(np.exp(-math.pi * z * z / (s * s)).sum())
    return tail_bound(s, r), tail / total


def truncated_gaussian_norm(delta: float, eps: float) -> float:
    """Squared norm of the peak ``Psi_delta`` restricted to [-eps, eps]; equals erf(eps/delta)."""
    if not delta > 0 or not eps > 0:
        raise DomainError(f"need delta > 0 and eps > 0, got {delta}, {eps}")
    return float(special.erf(eps / delta))


def fresnel_gaussian_integral(a: complex, b: float) -> complex:
    """Closed form of the integral of ``exp(i a x^2 + i b x)`` over the real line.

    Requires Im(a) > 0. The square root is the principal branch of ``pi i / a``,
    which is continuous on the upper half plane and gives sqrt(pi) at a = i.
    """
    a = complex(a)
    if not a.imag > 0:
        raise DomainError(f"Im(a) must be positive for convergence, got a={a}")
    return complex(np.sqrt(math.pi * 1j / a) * np.exp(-1j * b * b / (4 * a)))


def gaussian_interval_integral(p, q, r, lo, hi):
    """Integral of ``exp(-p x^2 + q x + r)`` over [lo, hi], vectorized.

    ``p`` and ``q`` may be complex; Re(p) > 0 is required for infinite limits.
    The result is assembled from scaled complementary error functions
    (Faddeeva ``w``) so that no exponentially large factor is ever formed.
    """
    p, q, r, lo, hi = np.broadcast_arrays(
        np.asarray(p, dtype=np.complex128),
        np.asarray(q, dtype=np.complex128),
        np.asarray(r, dtype=np.complex128),
        np.asarray(lo, dtype=np.float64),
        np.asarray(hi, dtype=np.float64),
    )
    if np.any(p.real < 0) or np.any((p.real <= 0) & ~(np.isfinite(lo) & np.isfinite(hi))):
        raise DomainError("integral diverges: need Re(p) > 0 (or >= 0 on a finite interval)")
    sp = np.sqrt(p)
    x0 = q / (2 * p)
    lo_fin = np.isfinite(lo)
    hi_fin = np.isfinite(hi)
    lo_s = np.where(lo_fin, lo, 0.0)
    hi_s = np.where(hi_fin, hi, 0.0)
    u1 = sp * (lo_s - x0)
    u2 = sp * (hi_s - x0)

    with np.errstate(all="ignore"):
        e1 = np.where(lo_fin, np.exp(-p * lo_s * lo_s + q * lo_s + r), 0.0)
        e2 = np.where(hi_fin, np.exp(-p * hi_s * hi_s + q * hi_s + r), 0.0)
        peak = np.exp(q * q / (4 * p) + r)
        w1p = np.where(lo_fin, special.wofz(1j * u1), 0.0)
        w1m = np.where(lo_fin, special.wofz(-1j * u1), 0.0)
        w2p = np.where(hi_fin, special.wofz(1j * u2), 0.0)
        w2m = np.where(hi_fin, special.wofz(-1j * u2), 0.0)
        # erf(u2) - erf(u1) written with erfc(z) = exp(-z^2) w(iz), choosing
        # the sign of z so that w is evaluated in the upper half plane.
        right1 = lo_fin & (u1.real >= 0)
        left2 = hi_fin & (u2.real <= 0)
        both_right = e1 * w1p - e2 * w2p
        both_left = e2 * w2m - e1 * w1m
        mixed = 2 * peak - e2 * w2p - e1 * w1m
        bracket = np.where(right1, both_right, np.where(left2, both_left, mixed))
    out = math.sqrt(math.pi) / (2 * sp) * bracket
    out = np.where(hi > lo, out, 0.0)
    return complex(out) if out.ndim == 0 else out


def quad_complex_with_error(
    f: Callable[[float], complex],
    interval: tuple[float, float],
    tol: Tolerance = DEFAULT_TOL,
    points=None,
    limit: int = 500,
) -> tuple[complex, float]:
    """Adaptive Gauss-Kronrod quadrature of a complex integrand.

    Returns (value, error estimate). Raises AccuracyError if the error estimate
    is not within ``tol`` after ``limit`` subdivisions.
    """
    lo, hi = map(float, interval)
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    extra = {"points": points} if points is not None else {}
    eps_abs = 0.25 * tol.abs_tol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re, re_err = integrate.quad(
            lambda x: complex(f(x)).real, lo, hi, epsabs=eps_abs, epsrel=0.5 * tol.rel_tol, limit=limit, **extra
        )
        im, im_err = integrate.quad(
            lambda x: complex(f(x)).imag, lo, hi, epsabs=eps_abs, epsrel=0.5 * tol.rel_tol, limit=limit, **extra
        )
    value = complex(re, im)
    err = math.hypot(re_err, im_err)
    if not tol.allows(value, err):
        raise AccuracyError(f"quadrature error estimate {err:.3g} exceeds tolerance", value, err)
    return value, err


def quad_complex(f, interval, tol: Tolerance = DEFAULT_TOL, points=None) -> complex:
    return quad_complex_with_error(f, interval, tol, points)[0]
