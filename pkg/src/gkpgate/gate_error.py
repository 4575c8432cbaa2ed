"""Gate-error certificates built from the compressed operator B."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numrange import as_matrix, crawford, operator_norm, sparsity
from .states import GkpParams, fourier_dual_params

UNITARY_TOL = 1e-10
NORM_SLACK = 1e-8
DIAMOND_CAP = 2.0


def omega(d: int) -> complex:
    return complex(np.exp(2j * math.pi / d))


@dataclass(frozen=True)
class LogicalTarget:
    U: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        U = as_matrix(self.U)
        if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) >= UNITARY_TOL:
            raise DomainError("logical target is not unitary")
        object.__setattr__(self, "U", U)

    @property
    def d(self) -> int:
        return self.U.shape[0]


def target_x(d: int) -> LogicalTarget:
    """Cyclic shift |k> -> |k+1 mod d>."""
    return LogicalTarget(np.roll(np.eye(d), 1, axis=0), "X")


def target_z(d: int, m: int = 1) -> LogicalTarget:
    return LogicalTarget(np.diag(omega(d) ** (m * np.arange(d))), "Z" if m == 1 else f"Z^{m}")


def target_phase(d: int) -> LogicalTarget:
    j = np.arange(d)
    c = d % 2
    return LogicalTarget(np.diag(np.exp(1j * math.pi * (j * j + c * j) / d)), "P")


def target_fourier(d: int) -> LogicalTarget:
    j = np.arange(d)
    return LogicalTarget(omega(d) ** np.outer(j, j) / math.sqrt(d), "F")


TARGETS = {"X": target_x, "Z": target_z, "P": target_phase, "F": target_fourier}


def build_B(M, U) -> np.ndarray:
    """``B_jk = sum_m conj(U_mj) M_mk``, i.e. ``B = U^dag M``."""
    M = as_matrix(getattr(M, "values", M))
    U = U.U if isinstance(U, LogicalTarget) else as_matrix(U)
    if M.shape != U.shape:
        raise DomainError(f"dimension mismatch: M is {M.shape}, U is {U.shape}")
    return U.conj().T @ M


@dataclass(frozen=True)
class GateErrorCertificate:
    crawford_c: float
    lower: float
    upper: float
    shortcut_upper: float | None = None
    regime_ok: bool = True
    provenance: tuple[str, ...] = ()
    gate: str = ""
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "params": self.params,
            "c": self.crawford_c,
            "lower": self.lower,
            "upper": self.upper,
            "shortcut_upper": self.shortcut_upper,
            "regime_ok": self.regime_ok,
            "provenance": list(self.provenance),
        }


def lower_from_c(c: float) -> float:
    return 2 * math.sqrt(max(0.0, 1 - c * c))


def upper_from_c(c: float) -> float:
    return min(5 * math.sqrt(max(0.0, 1 - c * c)), DIAMOND_CAP)


def certificate(
    B,
    gate: str = "",
    params: dict | None = None,
    regime_ok: bool = True,
    shortcut_upper: float | None = None,
    provenance: tuple[str, ...] = (),
) -> GateErrorCertificate:
    """Lower bound ``2 sqrt(1-c^2)`` and upper bound ``min(5 sqrt(1-c^2), 2)`` from c = c(B)."""
    B = as_matrix(B)
    nb = operator_norm(B)
    if nb > 1 + NORM_SLACK:
        raise DomainError(f"||B|| = {nb} exceeds 1; use nonunitary_bound")
    c = min(crawford(B), 1.0)
    prov = ("crawford:dual-scan", "lower:2sqrt(1-c^2)", "upper:min(5sqrt(1-c^2),2)") + tuple(provenance)
    return GateErrorCertificate(
        c, lower_from_c(c), upper_from_c(c), shortcut_upper, regime_ok, prov, gate, dict(params or {})
    )


def nonunitary_bound(B, w_norm: float) -> float:
    """``sqrt(2) (1 + ||B||^4 - 2c)^(1/2) + 3 ||W|| (1 - c^2)^(1/2)`` for general implementations."""
    if w_norm < 0:
        raise DomainError("w_norm must be non-negative")
    B = as_matrix(B)
    c = crawford(B)
    nb = operator_norm(B)
    return math.sqrt(2) * math.sqrt(max(0.0, 1 + nb**4 - 2 * c)) + 3 * w_norm * math.sqrt(max(0.0, 1 - c * c))


def shortcut_bounds(M, U, s: int | None = None, zero_tol: float = 1e-14) -> tuple[float | None, float]:
    """Matrix-element bounds on the gate error: (sparse bound or None, general bound).

    The sparse bound needs B to be s-sparse with real non-zero diagonal; the
    general bound only needs the entrywise distance between U and M.
    """
    Mv = as_matrix(getattr(M, "values", M))
    Uv = U.U if isinstance(U, LogicalTarget) else as_matrix(U)
    d = Uv.shape[0]
    general = 19 * d**0.375 * float(np.max(np.abs(Uv - Mv))) ** 0.25
    B = build_B(Mv, Uv)
    diag = np.diag(B)
    s_eff = sparsity(B, zero_tol) if s is None else s
    sparse = None
    real_diag = np.all(np.abs(diag.imag) <= zero_tol) and np.all(np.abs(diag) > 0)
    if real_diag and sparsity(B, zero_tol) <= s_eff:
        off = np.abs(B - np.diag(diag))
        delta = (1 - float(np.min(np.abs(diag)))) + (s_eff - 1) * float(off.max())
        sparse = 8 * math.sqrt(max(delta, 0.0))
    return sparse, general


def continuity_transfer(err: float, delta: float, d: int) -> tuple[float, float]:
    """Interval for the gate error on a code whose basis is delta-close vector-wise."""
    if delta < 0:
        raise DomainError("delta must be non-negative")
    r = math.sqrt(d * delta)
    return max(0.0, 0.4 * err - 4 * r), 2.5 * err + 10 * r


def untruncated_transfer_upper(err: float, kappa: float, d: int) -> float:
    """Upper bound transferred to the untruncated code, using delta = 4 sqrt(d kappa)."""
    return 2.5 * err + 20 * d**0.75 * kappa**0.25


def crawford_perturbation_bound(d: int, delta: float) -> float:
    """``|c(B) - c(B~)| <= 2 d delta`` for delta-close code bases."""
    return 2 * d * delta


def lowdin_orthogonalize(vectors, gram_floor: float = 1e-12) -> np.ndarray:
    """Symmetric orthogonalization: columns of ``A G^(-1/2)`` with G the Gram matrix.

    ``vectors`` holds one vector per column (shape N x d).
    """
    A = np.asarray(vectors, dtype=np.complex128)
    if A.ndim != 2:
        raise DomainError("expected an N x d array of column vectors")
    G = A.conj().T @ A
    w, V = np.linalg.eigh(G)
    if w.min() <= gram_floor:
        raise DomainError(f"Gram matrix is numerically singular (smallest eigenvalue {w.min():.3g})")
    return A @ (V @ np.diag(w**-0.5) @ V.conj().T)


def lowdin_deviation(vectors, reference) -> tuple[float, float]:
    """(max_k ||xi_k - phi_k||, 2 sqrt(d) max_j ||psi_j - phi_j||) for a reference frame phi."""
    A = np.asarray(vectors, dtype=np.complex128)
    R = np.asarray(reference, dtype=np.complex128)
    xi = lowdin_orthogonalize(A)
    d = A.shape[1]
    dev = float(np.linalg.norm(xi - R, axis=0).max())
    delta = float(np.linalg.norm(A - R, axis=0).max())
    return dev, 2 * math.sqrt(d) * delta


# -- phase-gate no-go --------------------------------------------------------

REGIME_SLACK = 1e-12


@dataclass(frozen=True)
class NogoReport:
    """Lower bounds on the error of ``exp(i (Q^2 + c_d sqrt(2 pi/d) Q)/2)`` as a logical P gate.

    ``|B_00|`` bounds the Crawford number from above, so both
    ``2 sqrt(1 - |B_00|^2)`` and the weaker ``2 (1 - |B_00|)`` bound the gate error from below.
    """

    params: GkpParams
    b00: complex
    lower_linear: float
    lower_sqrt: float
    cap_constant: float
    cap_analytic: float
    proven_lower: float
    regime_constant: bool
    regime_analytic: bool

    @property
    def abs_b00(self) -> float:
        return abs(self.b00)

    @property
    def constant_cap_holds(self) -> bool:
        return self.abs_b00 <= self.cap_constant

    @property
    def analytic_cap_holds(self) -> bool:
        return self.abs_b00 <= self.cap_analytic

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "b00": [self.b00.real, self.b00.imag],
            "abs_b00": self.abs_b00,
            "lower_linear": self.lower_linear,
            "lower_sqrt": self.lower_sqrt,
            "cap_constant": self.cap_constant,
            "cap_analytic": self.cap_analytic,
            "proven_lower": self.proven_lower,
            "regime_constant": self.regime_constant,
            "regime_analytic": self.regime_analytic,
            "constant_cap_holds": self.constant_cap_holds,
            "analytic_cap_holds": self.analytic_cap_holds,
        }


def nogo_check(params: GkpParams) -> NogoReport:
    """Phase-gate B_00 and the bounds it is compared against.

    ``regime_constant`` marks kappa < 1/250, eps <= 1/(2d) and 2 pi d delta/kappa >= 1,
    where |B_00| <= 49/50 + 16 (delta/eps)^4 and err >= 1/25 - 32 (delta/eps)^2 are proven.
    ``regime_analytic`` marks kappa < 1/4 and d delta < 1/(4 pi), where the
    cap ``1/sqrt(1 + 2 (d delta/kappa)^2) + kappa + 16 (delta/eps)^4`` is proven.
    """
    from .matrix_elements import phase_scalar

    if params.eps is None:
        raise DomainError("no-go check needs a truncation parameter eps")
    k, dl, eps, d = params.kappa, params.delta, params.eps, params.d
    b00 = phase_scalar(params, 0)
    a = abs(b00)
    tail = 16 * (dl / eps) ** 4
    regime_constant = (
        k < 1 / 250 and eps <= params.eps_d * (1 + REGIME_SLACK) and 2 * math.pi * d * dl / k >= 1 - REGIME_SLACK
    )
    regime_analytic = k < 0.25 and d * dl < 1 / (4 * math.pi) and eps < 0.5
    return NogoReport(
        params=params,
        b00=complex(b00),
        lower_linear=2 * (1 - a),
        lower_sqrt=2 * math.sqrt(max(0.0, 1 - a * a)),
        cap_constant=49 / 50 + tail,
        cap_analytic=1 / math.sqrt(1 + 2 * (d * dl / k) ** 2) + k + tail,
        proven_lower=1 / 25 - 32 * (dl / eps) ** 2,
        regime_constant=regime_constant,
        regime_analytic=regime_analytic,
    )


@dataclass(frozen=True)
class AsymmetricNogoReport:
    code: NogoReport
    dual: NogoReport
    regime_ok: bool

    @property
    def max_lower(self) -> float:
        return max(self.code.lower_sqrt, self.dual.lower_sqrt)

    def to_dict(self) -> dict:
        return {
            "code": self.code.to_dict(),
            "dual": self.dual.to_dict(),
            "regime_ok": self.regime_ok,
            "max_lower": self.max_lower,
            "passes": self.max_lower >= 1 / 50,
        }


def nogo_asymmetric(kappa: float, delta: float, d: int) -> AsymmetricNogoReport:
    """Phase-gate error on a code and on its Fourier-dual code, both truncated at eps = 1/(2d).

    ``regime_ok`` marks delta <= 1/(80 d) and kappa < d^-6, where the larger of
    the two errors is proven to be at least 1/50.
    """
    code = GkpParams(kappa, delta, 1 / (2 * d), d)
    dual = fourier_dual_params(code)
    regime = delta <= 1 / (80 * d) and kappa < d**-6.0
    return AsymmetricNogoReport(nogo_check(code), nogo_check(dual), regime)
