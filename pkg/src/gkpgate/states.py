"""Approximate GKP states as sums of (truncated) Gaussian peaks.

Every state family is stored as a list of Gaussian pieces

    coef * exp(-a (x - anchor - off)^2)   for  x - anchor in [lo, hi],

where ``anchor`` is the lattice site the peak belongs to. Keeping offsets
relative to the anchor lets overlaps be evaluated in local coordinates, so
nothing cancels catastrophically when peaks sit far from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import DomainError, ResourceError
from .numerics import DEFAULT_TOL, Tolerance, gaussian_interval_integral, lattice_gaussian_sum, tail_radius

TAIL_TOL = 1e-12
PAIR_CUT = 40.0
MAX_PIECES = 2_000_000
_PAIR_CHUNK = 1 << 20


@dataclass(frozen=True)
class GkpParams:
    """Squeezing parameters (kappa, delta), truncation eps and qudit dimension d."""

    kappa: float
    delta: float
    eps: float | None = None
    d: int = 2

    def __post_init__(self):
        if not self.kappa > 0 or not self.delta > 0:
            raise DomainError(f"kappa and delta must be positive, got {self.kappa}, {self.delta}")
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"d must be an integer >= 2, got {self.d}")
        if self.eps is not None and not 0 < self.eps <= 0.5:
            raise DomainError(f"eps must lie in (0, 1/2], got {self.eps}")

    @classmethod
    def symmetric(cls, kappa: float, d: int, eps: float | None = None) -> "GkpParams":
        """Symmetric squeezing delta = kappa/(2 pi d); eps defaults to 1/(2d)."""
        return cls(kappa, kappa / (2 * math.pi * d), 1 / (2 * d) if eps is None else eps, d)

    @property
    def eps_d(self) -> float:
        return 1 / (2 * self.d)

    @property
    def basis_orthogonal(self) -> bool:
        return self.eps is not None and self.eps <= self.eps_d * (1 + 1e-12)

    def with_eps(self, eps: float | None) -> "GkpParams":
        return replace(self, eps=eps)

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "delta": self.delta, "eps": self.eps, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "GkpParams":
        return cls(float(data["kappa"]), float(data["delta"]), data.get("eps"), int(data.get("d", 2)))


def fourier_dual_params(params: GkpParams) -> GkpParams:
    """Parameters of the output code of the logical Fourier gate."""
    d = params.d
    return GkpParams(2 * math.pi * d * params.delta, params.kappa / (2 * math.pi * d), params.eps, d)


@dataclass(frozen=True)
class StateFamily:
    envelope: str  # "peakwise" or "pointwise"
    truncated: bool

    def __post_init__(self):
        if self.envelope not in ("peakwise", "pointwise"):
            raise DomainError(f"unknown envelope {self.envelope!r}")

    @property
    def label(self) -> str:
        base = "GKP" if self.envelope == "peakwise" else "gkp"
        return base + ("^eps" if self.truncated else "")


GKP = StateFamily("peakwise", False)
GKP_TRUNC = StateFamily("peakwise", True)
GKP_POINTWISE = StateFamily("pointwise", False)
GKP_POINTWISE_TRUNC = StateFamily("pointwise", True)
FAMILIES = (GKP, GKP_TRUNC, GKP_POINTWISE, GKP_POINTWISE_TRUNC)


def eta(kappa: float, x):
    """Normalized envelope ``sqrt(kappa) pi^(-1/4) exp(-kappa^2 x^2 / 2)``."""
    x = np.asarray(x, dtype=float)
    return math.sqrt(kappa) * math.pi ** -0.25 * np.exp(-0.5 * (kappa * x) ** 2)


def psi_gauss(delta: float, x):
    """Normalized peak ``pi^(-1/4) delta^(-1/2) exp(-x^2 / (2 delta^2))``."""
    x = np.asarray(x, dtype=float)
    return math.pi ** -0.25 / math.sqrt(delta) * np.exp(-0.5 * (x / delta) ** 2)


@dataclass(frozen=True)
class PostOp:
    """Squeeze by ``squeeze`` then shift by ``shift``: psi(x) -> s^(-1/2) psi((x - shift)/s)."""

    squeeze: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.squeeze > 0:
            raise DomainError(f"squeeze factor must be positive, got {self.squeeze}")

    def then(self, other: "PostOp") -> "PostOp":
        """The affine map ``other o self``."""
        return PostOp(self.squeeze * other.squeeze, other.squeeze * self.shift + other.shift)

    def inverse(self) -> "PostOp":
        return PostOp(1 / self.squeeze, -self.shift / self.squeeze)


IDENTITY_OP = PostOp()


def compose(ops) -> PostOp:
    total = IDENTITY_OP
    for op in ops:
        total = total.then(op)
    return total


@dataclass(frozen=True)
class GaussianPieces:
    """Arrays describing a sum of truncated Gaussian pieces (see module docstring)."""

    coef: np.ndarray
    a: np.ndarray
    anchor: np.ndarray
    off: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def size(self) -> int:
        return int(self.coef.size)

    def scaled(self, factor: complex) -> "GaussianPieces":
        return replace(self, coef=self.coef * factor)

    def transformed(self, op: PostOp) -> "GaussianPieces":
        s = op.squeeze
        return GaussianPieces(
            self.coef / math.sqrt(s), self.a / (s * s), s * self.anchor + op.shift, s * self.off, s * self.lo, s * self.hi
        )

    def absolute(self):
        """(coef, a, center, lo, hi) in absolute coordinates, for rendering."""
        return self.coef, self.a, self.anchor + self.off, self.anchor + self.lo, self.anchor + self.hi

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=np.complex128)
        coef, a, center, lo, hi = self.absolute()
        for i in range(self.size):
            inside = (x >= lo[i]) & (x <= hi[i])
            out[inside] += coef[i] * np.exp(-a[i] * (x[inside] - center[i]) ** 2)
        return out

    def reach(self) -> np.ndarray:
        """Distance from the centre beyond which a piece is below exp(-PAIR_CUT/2)."""
        return np.sqrt(PAIR_CUT / self.a)


def lattice_window(kappa: float, tail_tol: float = TAIL_TOL) -> int:
    """Radius R such that envelope mass outside |z| <= R is below tail_tol.

    The squared envelope is ``kappa/sqrt(pi) * rho_s(z)`` with ``s = sqrt(pi)/kappa``.
    """
    r = math.ceil(tail_radius(math.sqrt(math.pi) / kappa, tail_tol)) + 1
    if 2 * r + 1 > MAX_PIECES:
        raise ResourceError(f"lattice window of {2 * r + 1} peaks exceeds the budget")
    return r


def _raw_pieces(family: StateFamily, params: GkpParams, radius: int) -> GaussianPieces:
    k, dl = params.kappa, params.delta
    z = np.arange(-radius, radius + 1, dtype=float)
    n = z.size
    if family.truncated:
        if params.eps is None:
            raise DomainError("truncated families need eps")
        eps = params.eps
        peak_norm = 1 / math.sqrt(math.erf(eps / dl))
        lo, hi = np.full(n, -eps), np.full(n, eps)
    else:
        peak_norm = 1.0
        lo, hi = np.full(n, -np.inf), np.full(n, np.inf)
    if family.envelope == "peakwise":
        coef = eta(k, z) * (math.pi ** -0.25 / math.sqrt(dl)) * peak_norm
        a = np.full(n, 0.5 / dl**2)
        off = np.zeros(n)
    else:
        # eta_k(x) Psi_dl(x - z) is a single Gaussian with combined width.
        g = 1 + (k * dl) ** 2
        coef = math.sqrt(k) / (math.sqrt(math.pi) * math.sqrt(dl)) * np.exp(-0.5 * k * k * z * z / g) * peak_norm
        a = np.full(n, 0.5 * (k * k + dl**-2))
        off = z / g - z
    return GaussianPieces(coef.astype(np.complex128), a, z, off, lo, hi)


def _pairs(pa: GaussianPieces, pb: GaussianPieces):
    """Index pairs (i, j) whose pieces overlap non-negligibly."""
    cb = pb.anchor + pb.off
    order = np.argsort(cb, kind="stable")
    cb_sorted = cb[order]
    reach_b = float(pb.reach().max()) if pb.size else 0.0
    ca = pa.anchor + pa.off
    ra = pa.reach()
    # Truncated pieces cannot reach beyond their interval either.
    ra = np.minimum(ra, np.maximum(np.abs(pa.lo - pa.off), np.abs(pa.hi - pa.off)))
    start = np.searchsorted(cb_sorted, ca - ra - reach_b, side="left")
    stop = np.searchsorted(cb_sorted, ca + ra + reach_b, side="right")
    counts = stop - start
    total = int(counts.sum())
    ii = np.repeat(np.arange(pa.size), counts)
    offsets = np.cumsum(counts) - counts
    jj = order[start[ii] + (np.arange(total) - offsets[ii])]
    return ii, jj


def pair_integrals(pa: GaussianPieces, pb: GaussianPieces, qa: float = 0.0, qb: float = 0.0) -> complex:
    """``sum_{i,j} conj(a_i) exp(i pi (qa x^2 + qb x)) b_j`` integrated over the line.

    Each pair is evaluated relative to the anchor of piece i. The constant
    phase ``pi (qa anchor^2 + qb anchor)`` is reduced mod 2 before use, which is
    exact when anchors and coefficients are integers.
    """
    if pa.size == 0 or pb.size == 0:
        return 0j
    ii, jj = _pairs(pa, pb)
    total = 0j
    for s in range(0, ii.size, _PAIR_CHUNK):
        i = ii[s : s + _PAIR_CHUNK]
        j = jj[s : s + _PAIR_CHUNK]
        anc = pa.anchor[i]
        shift = pb.anchor[j] - anc
        oi, oj = pa.off[i], pb.off[j] + shift
        lo = np.maximum(pa.lo[i], pb.lo[j] + shift)
        hi = np.minimum(pa.hi[i], pb.hi[j] + shift)
        keep = hi > lo
        if not np.any(keep):
            continue
        i, j, anc, oi, oj, lo, hi = (v[keep] for v in (i, j, anc, oi, oj, lo, hi))
        ai, aj = pa.a[i], pb.a[j]
        const = np.mod(qa * anc * anc, 2.0) + np.mod(qb * anc, 2.0)
        p = ai + aj - 1j * math.pi * qa
        q = 2 * ai * oi + 2 * aj * oj + 1j * math.pi * (2 * qa * anc + qb)
        r = -ai * oi * oi - aj * oj * oj + 1j * math.pi * const
        vals = np.conj(pa.coef[i]) * pb.coef[j] * gaussian_interval_integral(p, q, r, lo, hi)
        total += complex(vals.sum())
    return total


@dataclass(frozen=True)
class PeakSumState:
    """Normalized GKP-type state with optional squeeze/shift post-operations."""

    family: StateFamily
    params: GkpParams
    norm_const: float
    window: tuple[int, int]
    post_ops: tuple[PostOp, ...] = field(default=())

    @cached_property
    def base_pieces(self) -> GaussianPieces:
        """Normalized pieces before post-operations."""
        lo, hi = self.window
        radius = max(-lo, hi)
        return _raw_pieces(self.family, self.params, radius).scaled(self.norm_const)

    @property
    def frame(self) -> PostOp:
        return compose(self.post_ops)

    @cached_property
    def pieces(self) -> GaussianPieces:
        return self.base_pieces.transformed(self.frame)

    def with_post_op(self, op: PostOp) -> "PeakSumState":
        return replace(self, post_ops=self.post_ops + (op,))

    def wavefunction(self, x) -> np.ndarray:
        return self.pieces.evaluate(x)

    @property
    def envelope_width(self) -> float:
        """Width scale of the envelope in the final frame."""
        return self.frame.squeeze / self.params.kappa

    @property
    def peak_width(self) -> float:
        """Standard deviation scale of one peak in the final frame."""
        return float(1 / math.sqrt(2 * self.pieces.a.max()))


def _self_norm_sq(family: StateFamily, params: GkpParams, radius: int) -> float:
    raw = _raw_pieces(family, params, radius)
    return pair_integrals(raw, raw).real


def normalization_constant(family: StateFamily, params: GkpParams, tol: Tolerance = DEFAULT_TOL) -> float:
    """Normalization constant of the given family (C_kappa, C_{kappa,Delta}, D or E)."""
    radius = lattice_window(params.kappa, min(TAIL_TOL, tol.abs_tol))
    if family == GKP_TRUNC and params.eps is not None and params.eps <= 0.5:
        # Disjoint normalized peaks: 1/C^2 = sum_z eta(z)^2 = kappa/sqrt(pi) f_s(0).
        s = math.sqrt(math.pi) / params.kappa
        return 1 / math.sqrt(params.kappa / math.sqrt(math.pi) * lattice_gaussian_sum(s, 0.0, TAIL_TOL))
    return 1 / math.sqrt(_self_norm_sq(family, params, radius))


def make_state(family: StateFamily, params: GkpParams, tail_tol: float = TAIL_TOL) -> PeakSumState:
    if family.truncated and (params.eps is None or params.eps >= 0.5):
        raise DomainError("truncated families need 0 < eps < 1/2")
    radius = lattice_window(params.kappa, tail_tol)
    const = normalization_constant(family, params)
    return PeakSumState(family, params, const, (-radius, radius))


def code_basis_state(params: GkpParams, family: StateFamily, j: int, tail_tol: float = TAIL_TOL) -> PeakSumState:
    """Code basis state j: squeeze by sqrt(2 pi d), then shift by j sqrt(2 pi / d)."""
    d = params.d
    if not 0 <= j < d:
        raise DomainError(f"basis index {j} out of range for d={d}")
    if family.truncated and not params.basis_orthogonal:
        raise DomainError(f"eps={params.eps} exceeds 1/(2d); basis states would overlap")
    base = make_state(family, params, tail_tol)
    return base.with_post_op(PostOp(math.sqrt(2 * math.pi * d), j * math.sqrt(2 * math.pi / d)))


def relative_pieces(a: PeakSumState, b: PeakSumState) -> GaussianPieces:
    """Pieces of b expressed in the base frame of a."""
    rel = b.frame.then(a.frame.inverse())
    return b.base_pieces.transformed(rel)


def overlap(a: PeakSumState, b: PeakSumState, tol: Tolerance = DEFAULT_TOL) -> complex:
    """Inner product <a, b>, computed in the base frame of a.

    Unitary post-operations are moved onto b, so shifted or squeezed states
    are compared without any cross-frame quadrature.
    """
    return pair_integrals(a.base_pieces, relative_pieces(a, b))


def qphase_expectation(a: PeakSumState, b: PeakSumState, qa: float, qb: float) -> complex:
    """``<a, exp(i pi (qa Q^2 + qb Q)) b>`` with Q the position in the base frame of a.

    The operator is expressed in a's base coordinates; callers conjugate
    physical operators through the post-operations themselves.
    """
    return pair_integrals(a.base_pieces, relative_pieces(a, b), qa, qb)
