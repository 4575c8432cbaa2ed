"""Crawford number (inner numerical radius) and analytic lower bounds on it."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .errors import AccuracyError, DomainError

SCAN_POINTS = 720
ZERO_TOL = 1e-14


def as_matrix(B) -> np.ndarray:
    B = np.asarray(B, dtype=np.complex128)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise DomainError("matrix has non-finite entries")
    return B


def operator_norm(B) -> float:
    return float(np.linalg.norm(as_matrix(B), 2))


def _lambda_min(B: np.ndarray, theta) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    ph = np.exp(1j * theta)[:, None, None]
    H = 0.5 * (ph * B[None] + np.conj(ph) * B.conj().T[None])
    return np.linalg.eigvalsh(H)[:, 0]


def support_scan(B, n: int = SCAN_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Angles and ``lambda_min((e^{i t} B + e^{-i t} B^dag)/2)`` on a uniform scan."""
    B = as_matrix(B)
    theta = 2 * math.pi * np.arange(n) / n
    return theta, _lambda_min(B, theta)


def crawford(B, xtol: float = 1e-12, candidates: int = 3) -> float:
    """``min |<psi, B psi>|`` over unit vectors, via the supporting-line dual.

    ``c(B) = max(0, max_t lambda_min(H_t))``. The maximum is located on a
    720-point scan and refined by bounded Brent search around the best few
    scan points.
    """
    B = as_matrix(B)
    theta, lam = support_scan(B)
    step = theta[1] - theta[0]
    best = float(lam.max())
    for k in np.argsort(lam)[::-1][:candidates]:
        t0 = theta[k]
        # Search in the offset from t0: Brent's tolerance has a term relative to |x|.
        res = optimize.minimize_scalar(
            lambda u: -float(_lambda_min(B, t0 + u)[0]),
            bounds=(-step, step),
            method="bounded",
            options={"xatol": xtol},
        )
        if not np.isfinite(res.fun):
            raise AccuracyError("eigen-solver returned a non-finite value")
        best = max(best, -float(res.fun))
    return max(0.0, best)


def crawford_bruteforce(B, n_starts: int = 8, seed: int | None = 0) -> float:
    """Multi-start local minimization of ``|<psi, B psi>| / <psi, psi>``.

    Independent of the dual formulation; returns the best value found, which
    is an upper bound on c(B).
    """
    B = as_matrix(B)
    d = B.shape[0]
    Bh = B.conj().T
    rng = np.random.default_rng(seed)

    def fg(v):
        psi = v[:d] + 1j * v[d:]
        n = float(np.vdot(psi, psi).real)
        Bp = B @ psi
        z = np.vdot(psi, Bp)
        az2 = abs(z) ** 2
        g = (np.conj(z) * Bp + z * (Bh @ psi)) / n**2 - 2 * az2 * psi / n**3
        return az2 / n**2, 2 * np.concatenate([g.real, g.imag])

    best = math.inf
    for _ in range(n_starts):
        v0 = rng.standard_normal(2 * d)
        res = optimize.minimize(fg, v0, jac=True, method="BFGS", options={"gtol": 1e-10, "maxiter": 500})
        best = min(best, float(res.fun))
    return math.sqrt(max(best, 0.0))


def alpha_bound(A) -> float | None:
    """Diagonal-dominance bound; None when some Re A_jj is negative."""
    A = as_matrix(A)
    diag = np.diag(A)
    if np.any(diag.real < 0):
        return None
    S = np.abs(A + A.conj().T)
    np.fill_diagonal(S, 0.0)
    return float(np.min(np.abs(diag.real) - 0.5 * S.sum(axis=1)))


def phase_corrected_bound(B) -> float:
    """Diagonal-dominance bound after rotating each diagonal entry to the real axis."""
    B = as_matrix(B)
    diag = np.diag(B)
    if np.any(np.abs(diag) == 0):
        raise DomainError("phase-corrected bound needs non-zero diagonal entries")
    u = diag / np.abs(diag)
    # |e^{-i phi_j} B_jl + e^{i phi_l} conj(B_lj)|
    S = np.abs(np.conj(u)[:, None] * B + u[None, :] * B.T.conj())
    np.fill_diagonal(S, 0.0)
    main = float(np.min(np.abs(diag) - 0.5 * S.sum(axis=1)))
    return main - operator_norm(B) * float(np.max(np.abs(u - 1)))


def sparsity(B, zero_tol: float = ZERO_TOL) -> int:
    """Largest number of non-zero entries in any row or column."""
    nz = np.abs(as_matrix(B)) > zero_tol
    return int(max(nz.sum(axis=0).max(), nz.sum(axis=1).max()))


def sparse_bound(B, s: int, zero_tol: float = ZERO_TOL) -> float:
    B = as_matrix(B)
    d = B.shape[0]
    if sparsity(B, zero_tol) > s:
        raise DomainError(f"matrix is not {s}-sparse")
    diag = np.diag(B)
    if np.any(np.abs(diag) == 0):
        raise DomainError("sparse bound needs non-zero diagonal entries")
    off = np.abs(B - np.diag(diag))
    max_off = float(off.max()) if d > 1 else 0.0
    phase_err = float(np.max(np.abs(diag / np.abs(diag) - 1)))
    return float(np.min(np.abs(diag))) - (s - 1) * max_off - operator_norm(B) * phase_err


def subnormalized_bound(B, slack: float = 1e-12) -> float:
    """``1 - 7 (d max_j |1 - B_jj|)^(1/2)`` for subnormalized rows and columns."""
    B = as_matrix(B)
    d = B.shape[0]
    P = np.abs(B) ** 2
    if P.sum(axis=0).max() > 1 + slack or P.sum(axis=1).max() > 1 + slack:
        raise DomainError("rows and columns must have squared norm at most 1")
    diag = np.diag(B)
    if np.any(np.abs(diag) == 0):
        raise DomainError("subnormalized bound needs non-zero diagonal entries")
    return 1 - 7 * math.sqrt(d * float(np.max(np.abs(1 - diag))))
