"""Dense uniform-grid wavefunctions used as an independent numerical oracle."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import AccuracyError, DomainError, ResourceError
from .numerics import DEFAULT_TOL, Tolerance, gaussian_interval_integral
from .states import GaussianPieces, GkpParams, PeakSumState

MASS_TOL = 1e-8
MAX_POINTS = 1 << 23
EDGE_FRACTION = 1 / 32


@dataclass(frozen=True)
class GridState:
    """Samples at ``x_k = -L + k (2L/N)`` for ``k = 0, ..., N-1``."""

    L: float
    N: int
    samples: np.ndarray

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"half width must be positive, got {self.L}")
        if self.N < 4 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 4, got {self.N}")
        if self.samples.shape != (self.N,):
            raise DomainError("sample array has the wrong length")
        self.samples.setflags(write=False)

    @property
    def h(self) -> float:
        return 2 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    def norm(self) -> float:
        return math.sqrt(float(np.vdot(self.samples, self.samples).real) * self.h)

    def inner(self, other: "GridState") -> complex:
        """``<self, other>`` by the trapezoid rule on a shared grid."""
        if self.N != other.N or not math.isclose(self.L, other.L, rel_tol=1e-14):
            raise DomainError("inner product needs identical grids")
        return complex(np.vdot(self.samples, other.samples)) * self.h

    def edge_mass(self, fraction: float = EDGE_FRACTION) -> float:
        m = max(1, int(self.N * fraction))
        s = self.samples
        return float((np.abs(s[:m]) ** 2).sum() + (np.abs(s[-m:]) ** 2).sum()) * self.h

    def _new(self, samples, L=None) -> "GridState":
        return GridState(self.L if L is None else L, self.N, np.asarray(samples, dtype=np.complex128))

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "re", "im"])
            for xv, v in zip(self.x, self.samples):
                writer.writerow([repr(float(xv)), repr(float(v.real)), repr(float(v.imag))])


def _pieces_of(state) -> GaussianPieces:
    return state.pieces if isinstance(state, PeakSumState) else state


def mass_outside(pieces: GaussianPieces, L: float) -> float:
    """Squared-norm mass of the pieces outside [-L, L], ignoring cross terms."""
    coef, a, center, lo, hi = pieces.absolute()
    w = np.abs(coef) ** 2
    p = 2 * a
    q = 4 * a * center
    r = -2 * a * center * center
    left = gaussian_interval_integral(p, q, r, lo, np.minimum(hi, -L))
    right = gaussian_interval_integral(p, q, r, np.maximum(lo, L), hi)
    return float((w * (np.real(left) + np.real(right))).sum())


def render(state, L: float, N: int) -> GridState:
    """Pointwise evaluation of a state (post-operations included) on the grid."""
    if N > MAX_POINTS:
        raise ResourceError(f"{N} grid points exceeds the budget of {MAX_POINTS}")
    pieces = _pieces_of(state)
    outside = mass_outside(pieces, L)
    if outside > MASS_TOL:
        raise DomainError(f"state mass {outside:.2e} lies outside [-L, L] with L={L}")
    coef, a, center, lo, hi = pieces.absolute()
    samples = kernels.render_pieces(-L, 2 * L / N, N, coef, a, center, lo, hi)
    return GridState(float(L), int(N), samples)


def apply_shift(g: GridState, beta: float) -> GridState:
    """Translate the wavefunction by beta (the action of exp(-i beta P))."""
    if beta == 0:
        return g
    steps = beta / g.h
    n = int(round(steps))
    if abs(steps - n) < 1e-9:
        m = abs(n)
        wrapped = g.samples[-m:] if n > 0 else g.samples[:m]
        if float((np.abs(wrapped) ** 2).sum()) * g.h > MASS_TOL:
            raise DomainError("shifted support leaves the grid")
        return g._new(np.roll(g.samples, n))
    k = 2 * math.pi * np.fft.fftfreq(g.N, d=g.h)
    m = int(math.ceil(abs(beta) / g.h))
    edge = g.samples[-m:] if beta > 0 else g.samples[:m]
    if float((np.abs(edge) ** 2).sum()) * g.h > MASS_TOL:
        raise DomainError("shifted support leaves the grid")
    return g._new(np.fft.ifft(np.fft.fft(g.samples) * np.exp(-1j * k * beta)))


def apply_qpoly_phase(g: GridState, a: float, b: float) -> GridState:
    """Multiply by ``exp(i (a x^2 + b x))``."""
    x = g.x
    return g._new(g.samples * np.exp(1j * (a * x * x + b * x)))


def apply_squeeze(g: GridState, alpha: float) -> GridState:
    """``(M_alpha psi)(x) = alpha^(-1/2) psi(x / alpha)`` by band-limited interpolation."""
    if not alpha > 0:
        raise DomainError(f"squeeze factor must be positive, got {alpha}")
    if alpha == 1:
        return g
    if alpha < 1:
        keep = np.abs(g.x) <= alpha * g.L
        lost = float((np.abs(g.samples[~keep]) ** 2).sum()) * g.h
        if lost > MASS_TOL:
            raise DomainError("squeezed support leaves the grid")
    vals = kernels.sinc_resample(g.samples, -g.L, g.h, g.x / alpha) / math.sqrt(alpha)
    return g._new(vals)


def apply_fourier(g: GridState, inverse: bool = False, check: bool = True) -> GridState:
    """Continuous Fourier transform ``(2 pi)^(-1/2) int f(x) exp(-i p x) dx``.

    With ``inverse=True`` the kernel is ``exp(+i p x)``. The result lives on the
    momentum grid of half width ``pi / h`` with the same number of points;
    the alternating signs centre the discrete transform on both grids.
    """
    if check and g.edge_mass() > MASS_TOL:
        raise AccuracyError("input has mass near the grid boundary", None, g.edge_mass())
    sgn = (-1.0) ** np.arange(g.N)
    scale = g.h / math.sqrt(2 * math.pi)
    if inverse:
        out = sgn * np.fft.ifft(sgn * g.samples) * (g.N * scale)
    else:
        out = sgn * np.fft.fft(sgn * g.samples) * scale
    res = GridState(math.pi / g.h, g.N, out)
    if check and res.edge_mass() > MASS_TOL:
        raise AccuracyError("transform has mass near the momentum-grid boundary", None, res.edge_mass())
    return res


@dataclass(frozen=True)
class Converged:
    value: complex
    error: float
    L: float
    N: int


def converge(
    computation: Callable[[float, int], complex],
    start: tuple[float, int],
    tol: Tolerance = Tolerance(1e-8),
    max_steps: int = 4,
    max_points: int = MAX_POINTS,
) -> Converged:
    """Refine a scalar grid functional until it stabilizes.

    First N is doubled at fixed L (resolution), then L and N are doubled
    together at fixed spacing (extent). The reported error is the larger of
    the last resolution and extent changes.
    """
    L, N = start
    value = computation(L, N)
    res_err = math.inf
    for _ in range(max_steps):
        if 2 * N > max_points:
            break
        nxt = computation(L, 2 * N)
        res_err = abs(nxt - value)
        N *= 2
        value = nxt
        if tol.allows(value, res_err):
            break
    ext_err = math.inf
    for _ in range(max_steps):
        if 2 * N > max_points:
            break
        nxt = computation(2 * L, 2 * N)
        ext_err = abs(nxt - value)
        L, N = 2 * L, 2 * N
        value = nxt
        if tol.allows(value, ext_err):
            break
    err = max(res_err, ext_err)
    if not tol.allows(value, err):
        raise AccuracyError(f"grid functional did not converge (last change {err:.3g})", value, err)
    return Converged(value, err, L, N)


def next_pow2(n: float) -> int:
    return 1 << max(2, math.ceil(math.log2(max(n, 4))))


def default_grid(params: GkpParams) -> tuple[float, int]:
    """Starting grid for code-basis computations: L = max(8/kappa_eff, 8 sqrt(2 pi d)), N = 2^14."""
    alpha = math.sqrt(2 * math.pi * params.d)
    return max(8 * alpha / params.kappa, 8 * alpha), 1 << 14


def grid_for(states, points_per_width: float = 3.0, min_points: int = 1 << 14) -> tuple[float, int]:
    """A grid that covers every state's envelope and resolves its narrowest peak."""
    L = 0.0
    h = math.inf
    for st in states:
        coef, a, center, lo, hi = _pieces_of(st).absolute()
        live = np.abs(coef) > 1e-300
        reach = np.sqrt(50.0 / a[live])
        L = max(L, float(np.max(np.abs(center[live]) + reach[live])))
        h = min(h, float(1 / math.sqrt(2 * a.max())) / points_per_width)
    N = next_pow2(max(2 * L / h, min_points))
    return L, N
