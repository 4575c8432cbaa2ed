"""Matrices of Gaussian gate implementations between approximate GKP code bases.

Entry ``M[j, k] = <j_out | W | k_in>`` where the basis states are the
truncated, peak-wise GKP code states. Position-diagonal gates (Z^m, P) and
the shift X are evaluated in closed form from the Gaussian-piece
representation; the Fourier gate uses Poisson summation over the input
envelope. Every path has an independent cross-check (quadrature, direct
lattice sum or the dense grid oracle).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import grid as grid_mod
from . import kernels
from .errors import AccuracyError, DomainError
from .numerics import DEFAULT_TOL, Tolerance, gaussian_interval_integral, lattice_gaussian_sum, quad_complex_with_error
from .states import (
    GKP_TRUNC,
    GkpParams,
    PostOp,
    code_basis_state,
    eta,
    fourier_dual_params,
    lattice_window,
    make_state,
    normalization_constant,
    overlap,
    qphase_expectation,
)

ME_TOL = Tolerance(1e-8)
# Beyond this eps/delta the truncation of a peak changes nothing in double precision.
NEGLIGIBLE_TRUNCATION = 12.0


@dataclass(frozen=True)
class GateSpec:
    """A Gaussian gate: 'X', 'Z' (power m), 'F' or 'P'."""

    kind: str
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("X", "Z", "F", "P"):
            raise DomainError(f"unknown gate kind {self.kind!r}")

    @property
    def label(self) -> str:
        return f"Z^{self.m}" if self.kind == "Z" and self.m != 1 else self.kind


@dataclass(frozen=True)
class MatrixElements:
    values: np.ndarray
    in_params: GkpParams
    out_params: GkpParams
    gate: GateSpec
    method: str
    error_estimate: float
    alt_values: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def to_dict(self) -> dict:
        def enc(a):
            return [[float(v.real), float(v.imag)] for v in np.asarray(a).ravel()]

        out = {
            "gate": self.gate.label,
            "in_params": self.in_params.to_dict(),
            "out_params": self.out_params.to_dict(),
            "method": self.method,
            "error_estimate": self.error_estimate,
            "values": enc(self.values),
        }
        if self.alt_values:
            out["alt_values"] = {k: enc(v) for k, v in self.alt_values.items()}
        return out


def _alpha_beta(d: int) -> tuple[float, float]:
    return math.sqrt(2 * math.pi * d), math.sqrt(2 * math.pi / d)


def _require_basis(params: GkpParams) -> None:
    if params.eps is None:
        raise DomainError("code basis needs a truncation parameter eps")
    if not params.basis_orthogonal:
        raise DomainError(f"eps={params.eps} exceeds 1/(2d)={params.eps_d}")


def envelope_shift_overlap(kappa: float) -> float:
    """``C_kappa^2 sum_z eta(z) eta(z+1) = exp(-kappa^2/4) f_s(1/2) / f_s(0)``, s = sqrt(pi)/kappa."""
    s = math.sqrt(math.pi) / kappa
    return math.exp(-kappa * kappa / 4) * lattice_gaussian_sum(s, 0.5) / lattice_gaussian_sum(s, 0.0)


# -- Pauli X ---------------------------------------------------------------


def mat_pauli_x(params: GkpParams, tol: Tolerance = ME_TOL) -> MatrixElements:
    """Shift by sqrt(2 pi/d): every basis state maps onto the next; the last wraps by one period."""
    _require_basis(params)
    d = params.d
    M = np.zeros((d, d), dtype=np.complex128)
    for k in range(d - 1):
        M[k + 1, k] = 1.0
    M[0, d - 1] = envelope_shift_overlap(params.kappa)
    return MatrixElements(M, params, params, GateSpec("X"), "analytic", 1e-15)


def envelope_overlap(kappa: float, w: int) -> float:
    """``C_kappa^2 sum_z eta(z) eta(z+w)`` for an integer lattice offset w."""
    s = math.sqrt(math.pi) / kappa
    return math.exp(-kappa * kappa * w * w / 4) * lattice_gaussian_sum(s, 0.5 * w) / lattice_gaussian_sum(s, 0.0)


def mat_shift(params: GkpParams, n: int) -> MatrixElements:
    """Matrix of the shift by ``n sqrt(2 pi/d)``, the n-fold composition of the X implementation."""
    _require_basis(params)
    d = params.d
    M = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        wrap, j = divmod(k + n, d)
        M[j, k] = envelope_overlap(params.kappa, wrap) if wrap else 1.0
    return MatrixElements(M, params, params, GateSpec("X"), "analytic", 1e-15)


def mat_pauli_x_pairs(params: GkpParams) -> MatrixElements:
    """Same matrix from generic pairwise peak overlaps of shifted states."""
    _require_basis(params)
    d = params.d
    _, beta = _alpha_beta(d)
    basis = [code_basis_state(params, GKP_TRUNC, j) for j in range(d)]
    M = np.array([[overlap(basis[j], basis[k].with_post_op(PostOp(1.0, beta))) for k in range(d)] for j in range(d)])
    return MatrixElements(M, params, params, GateSpec("X"), "pairs", 1e-14)


# -- Pauli Z^m -------------------------------------------------------------


def momentum_kick_scalar(params: GkpParams, m: int) -> complex:
    """``<GKP^eps, exp(2 pi i m Q) GKP^eps>`` in closed form."""
    base = make_state(GKP_TRUNC, params)
    return qphase_expectation(base, base, 0.0, 2.0 * m)


def mat_pauli_z(params: GkpParams, m: int = 1, tol: Tolerance = ME_TOL) -> MatrixElements:
    """Diagonal matrix ``omega^(m j) <GKP^eps, exp(2 pi i m Q) GKP^eps>``."""
    _require_basis(params)
    d = params.d
    if abs(m) > d:
        raise DomainError(f"|m| must not exceed d, got m={m}")
    s = momentum_kick_scalar(params, m)
    j = np.arange(d)
    M = np.diag(np.exp(2j * math.pi * m * j / d) * s)
    return MatrixElements(M, params, params, GateSpec("Z", m), "analytic", 1e-14)


def momentum_kick_scalar_quad(params: GkpParams, m: int, tol: Tolerance = Tolerance(1e-12)) -> tuple[complex, float]:
    """Same scalar by quadrature of a single peak.

    The lattice phases exp(2 pi i m y) are all one and the envelope weights sum
    to one, so the scalar is the peak integral of ``Psi_eps^2 exp(2 pi i m t)``.
    """
    dl, eps = params.delta, params.eps
    norm = math.erf(eps / dl)
    reach = min(eps, 12 * dl)

    def f(t):
        return math.exp(-((t / dl) ** 2)) / (math.sqrt(math.pi) * dl * norm) * cmath.exp(2j * math.pi * m * t)

    return quad_complex_with_error(f, (-reach, reach), tol)


# -- Phase gate ------------------------------------------------------------


def phase_scalar(params: GkpParams, j: int = 0) -> complex:
    """``<GKP^eps, exp(pi i (d Q^2 + (2j + c_d) Q)) GKP^eps>``; j = 0 gives B_00 of the phase gate."""
    base = make_state(GKP_TRUNC, params)
    return qphase_expectation(base, base, float(params.d), float(2 * j + params.d % 2))


def phase_scalar_quad(params: GkpParams, j: int = 0, nodes: int = 64) -> tuple[complex, float]:
    """Peak-by-peak evaluation of ``phase_scalar`` with Gauss-Legendre panels.

    Each lattice peak y contributes ``C^2 eta(y)^2 int Psi_eps(t)^2 exp(pi i (d t^2 + (2dy + c) t))``.
    The rule is applied at ``nodes`` and ``2*nodes`` points; the difference is the error estimate.
    """
    d, dl, eps, k = params.d, params.delta, params.eps, params.kappa
    c = 2 * j + d % 2
    r = lattice_window(k)
    y = np.arange(-r, r + 1, dtype=float)
    w = normalization_constant(GKP_TRUNC, params) ** 2 * eta(k, y) ** 2
    reach = min(eps, 12 * dl)
    norm = math.erf(eps / dl)

    def rule(n):
        panels = 16
        xg, wg = np.polynomial.legendre.leggauss(n)
        edges = np.linspace(-reach, reach, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        wt = (half[:, None] * wg[None, :]).ravel()
        dens = np.exp(-((t / dl) ** 2)) / (math.sqrt(math.pi) * dl * norm)
        ph = np.exp(1j * math.pi * (d * t * t)[None, :] + 1j * math.pi * (2 * d * y[:, None] + c) * t[None, :])
        # exp(i pi (d y^2 + c y)) is one for integer y, so it is dropped.
        return complex((w[:, None] * ph * (wt * dens)[None, :]).sum())

    a, b = rule(nodes), rule(2 * nodes)
    return b, abs(b - a)


def mat_phase(params: GkpParams, tol: Tolerance = ME_TOL) -> MatrixElements:
    """Diagonal matrix of ``exp(i (Q^2 + c_d sqrt(2 pi/d) Q)/2)`` on the code basis.

    Conjugating through the basis squeeze and shift gives, for state j, the
    logical phase ``exp(pi i (j^2 + c_d j)/d)`` times ``phase_scalar(params, j)``.
    """
    _require_basis(params)
    d = params.d
    c = d % 2
    vals = [cmath.exp(1j * math.pi * (j * j + c * j) / d) * phase_scalar(params, j) for j in range(d)]
    return MatrixElements(np.diag(vals), params, params, GateSpec("P"), "analytic", 1e-13)


# -- Fourier ---------------------------------------------------------------

FOURIER_SIGN = {"physical": -1, "normalized": -1, "forward": 1}


def _fourier_core(params: GkpParams, s: int, tooth_range: int = 2, quad_nodes: int | None = None):
    """Matrix of ``F_s = (2 pi)^(-1/2) int exp(-i s p x) dx`` between input and dual output codes.

    The input state's Fourier transform is ``phihat(p) * T(p)`` where ``T`` is
    its envelope comb, Poisson-summed into narrow Gaussian teeth. Each output
    peak then meets exactly one tooth per integer m in [-tooth_range, tooth_range].
    With ``quad_nodes`` set, the exact truncated-peak transform is integrated
    by Gauss-Legendre panels instead of the Gaussian closed form.
    """
    d = params.d
    alpha, beta = _alpha_beta(d)
    k_in, dl_in, eps = params.kappa, params.delta, params.eps
    out = fourier_dual_params(params)
    k_out, dl_out = out.kappa, out.delta
    sig_in, sig_out = alpha * dl_in, alpha * dl_out
    c_in = alpha**-0.5 * math.pi**-0.25 * dl_in**-0.5 / math.sqrt(math.erf(eps / dl_in))
    c_out = alpha**-0.5 * math.pi**-0.25 * dl_out**-0.5 / math.sqrt(math.erf(eps / dl_out))
    C_in = normalization_constant(GKP_TRUNC, params)
    C_out = normalization_constant(GKP_TRUNC, out)
    comb = C_in * math.sqrt(k_in) * math.pi**-0.25 * math.sqrt(2 * math.pi) / k_in
    r = lattice_window(k_out)
    zp = np.arange(-r, r + 1, dtype=float)
    a_out = C_out * eta(k_out, zp) * c_out
    mvals = np.arange(-tooth_range, tooth_range + 1, dtype=float)
    A_t = alpha * alpha / (2 * k_in * k_in)
    lim = alpha * eps
    M = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        cp = beta * (d * zp + j)  # output peak centres
        for k in range(d):
            lin = -1j * s * k * beta
            phase = cmath.exp(-2j * math.pi * s * j * k / d)
            if quad_nodes is None:
                # phihat(p) ~ c_in sig_in exp(-sig_in^2 p^2 / 2): all factors Gaussian in u = p - c'.
                P = 0.5 / sig_out**2 + 0.5 * sig_in**2 + A_t
                Cp = cp[:, None]
                tm = beta * mvals[None, :]
                q = -(sig_in**2) * Cp - 2 * A_t * tm + lin
                rr = -0.5 * sig_in**2 * Cp * Cp - A_t * tm * tm
                vals = gaussian_interval_integral(P, q, rr, -lim, lim)
                tot = (a_out[:, None] * vals).sum() * c_in * sig_in
            else:
                tot = _fourier_quad_entry(cp, a_out, sig_out, sig_in, c_in, A_t, beta, mvals, lin, lim, k_in, alpha, quad_nodes)
            M[j, k] = phase * comb * tot
    return M, out


def _fourier_quad_entry(cp, a_out, sig_out, sig_in, c_in, A_t, beta, mvals, lin, lim, k_in, alpha, nodes):
    reach = min(lim, math.sqrt(80.0) * sig_out)
    # The truncated-peak transform oscillates on the scale 1/lim.
    width = min(sig_out, k_in / alpha, 1.0 / lim) / 2
    panels = max(8, int(math.ceil(2 * reach / width)))
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(-reach, reach, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wu = (half[:, None] * wg[None, :]).ravel()
    total = 0j
    chunk = max(1, (1 << 21) // u.size)
    for s0 in range(0, cp.size, chunk):
        c = cp[s0 : s0 + chunk, None]
        p = c + u[None, :]
        # Exact transform of the truncated input peak.
        ph = gaussian_interval_integral(0.5 / sig_in**2, -1j * p, 0.0, -lim, lim) * c_in / math.sqrt(2 * math.pi)
        teeth = np.zeros(p.shape)
        for m in mvals:
            teeth += np.exp(-A_t * (u[None, :] + beta * m) ** 2)
        integrand = np.exp(-0.5 * (u / sig_out) ** 2)[None, :] * teeth * ph * np.exp(lin * u)[None, :]
        total += complex((a_out[s0 : s0 + chunk, None] * integrand * wu[None, :]).sum())
    return total


def fourier_truncation_error(params: GkpParams) -> float:
    """Bound on the change from ignoring peak truncation in both codes."""
    out = fourier_dual_params(params)
    e_in = special.erfc(params.eps / params.delta)
    e_out = special.erfc(out.eps / out.delta)
    return float(2 * (math.sqrt(e_in) + math.sqrt(e_out)))


def mat_fourier(
    in_params: GkpParams,
    tol: Tolerance = ME_TOL,
    convention: str = "physical",
    method: str = "auto",
) -> MatrixElements:
    """Matrix of ``W_F = exp(i pi (Q^2 + P^2)/4)`` from the input code to its Fourier-dual code.

    On oscillator eigenfunctions ``W_F h_n = exp(i pi/4) i^n h_n``, so
    ``W_F = exp(i pi/4) F^(-1)`` with F the ``exp(-i p x)`` transform. The
    'physical' values are those of W_F itself; the 'normalized' values drop
    the global phase exp(i pi/4), which makes the ideal-code limit equal to
    ``omega^(jk)/sqrt(d)``. Both are returned; certificates do not depend on
    the choice because c(B) is invariant under global phases.
    """
    _require_basis(in_params)
    d = in_params.d
    k, dl, eps = in_params.kappa, in_params.delta, in_params.eps
    if not (dl <= k / (2 * math.pi * d) * (1 + 1e-12) and k / (2 * math.pi * d) <= eps * (1 + 1e-12)):
        raise DomainError("Fourier matrix elements need delta <= kappa/(2 pi d) <= eps <= 1/(2d)")
    if convention not in ("physical", "normalized"):
        raise DomainError(f"unknown convention {convention!r}")
    out = fourier_dual_params(in_params)
    negligible = min(eps / dl, out.eps / out.delta) >= NEGLIGIBLE_TRUNCATION
    if method == "auto":
        method = "analytic" if negligible else "quadrature"
    if method == "analytic":
        if not negligible:
            raise DomainError("closed-form Fourier path needs negligible peak truncation")
        Mn, _ = _fourier_core(in_params, -1)
        err = fourier_truncation_error(in_params) + 1e-13
    elif method == "quadrature":
        M1, _ = _fourier_core(in_params, -1, quad_nodes=8)
        Mn, _ = _fourier_core(in_params, -1, quad_nodes=16)
        err = float(np.max(np.abs(Mn - M1))) + 1e-13
        if err > tol.abs_tol:
            raise AccuracyError("Fourier quadrature did not converge", Mn, err)
    else:
        raise DomainError(f"unknown method {method!r}")
    Mp = cmath.exp(1j * math.pi / 4) * Mn
    values, alt = (Mp, Mn) if convention == "physical" else (Mn, Mp)
    other = "normalized" if convention == "physical" else "physical"
    return MatrixElements(values, in_params, out, GateSpec("F"), method, err, {other: alt})


def fourier_lattice_sum(params: GkpParams, j: int, k: int, s: int = -1) -> complex:
    """``<j_out, F_s k_in>`` by a direct double sum over input and output peaks.

    Treats every peak as an untruncated Gaussian, so it is only accurate when
    truncation is negligible (see ``fourier_truncation_error``). Independent of
    the Poisson-summation route.
    """
    d = params.d
    alpha, beta = _alpha_beta(d)
    out = fourier_dual_params(params)
    sig_in, sig_out = alpha * params.delta, alpha * out.delta
    c_in = alpha**-0.5 * math.pi**-0.25 * params.delta**-0.5
    c_out = alpha**-0.5 * math.pi**-0.25 * out.delta**-0.5
    r_in, r_out = lattice_window(params.kappa), lattice_window(out.kappa)
    z = np.arange(-r_in, r_in + 1)
    zp = np.arange(-r_out, r_out + 1)
    a_in = normalization_constant(GKP_TRUNC, params) * eta(params.kappa, z) * c_in
    a_out = normalization_constant(GKP_TRUNC, out) * eta(out.kappa, zp) * c_out
    x = alpha * z + k * beta
    c = alpha * zp + j * beta
    g = (sig_in * sig_out) ** 2
    pref = math.sqrt(2 * math.pi) / math.sqrt(1 / g + 1)
    wa = a_out * np.exp(-0.5 * sig_in**2 * c * c / (1 + g))
    wb = a_in * np.exp(-0.5 * sig_out**2 * x * x / (1 + g))
    total = kernels.chirp_sum(wa, c, wb, x, s * g / (1 + g))
    # exp(-i s c x) reduces exactly to exp(-2 pi i s j k / d) on the lattices.
    return pref * cmath.exp(-2j * math.pi * s * j * k / d) * total


# -- Grid oracle -----------------------------------------------------------


def _shift_grid(L: float, N: int, beta: float) -> tuple[float, int]:
    """Grid of at least the requested extent and resolution whose spacing divides beta."""
    h = 2 * L / N
    steps = max(1, math.ceil(beta / h))
    h = beta / steps
    N2 = grid_mod.next_pow2(2 * L / h)
    return N2 * h / 2, N2


def grid_matrix(gate: GateSpec, params: GkpParams, L: float, N: int) -> np.ndarray:
    """Matrix elements from rendered basis states and grid-applied gates."""
    _require_basis(params)
    d = params.d
    _, beta = _alpha_beta(d)
    ins = [code_basis_state(params, GKP_TRUNC, j) for j in range(d)]
    if gate.kind == "F":
        outs = [code_basis_state(fourier_dual_params(params), GKP_TRUNC, j) for j in range(d)]
    else:
        outs = ins
    moved = []
    for st in ins:
        g = grid_mod.render(st, L, N)
        if gate.kind == "X":
            g = grid_mod.apply_shift(g, beta)
        elif gate.kind == "Z":
            g = grid_mod.apply_qpoly_phase(g, 0.0, gate.m * beta)
        elif gate.kind == "P":
            g = grid_mod.apply_qpoly_phase(g, 0.5, 0.5 * (d % 2) * beta)
        else:
            g = grid_mod.apply_fourier(g, inverse=True)
            g = grid_mod.GridState(g.L, g.N, g.samples * cmath.exp(1j * math.pi / 4))
        moved.append(g)
    rendered = [grid_mod.render(st, moved[0].L, moved[0].N) for st in outs]
    return np.array([[rendered[j].inner(moved[k]) for k in range(d)] for j in range(d)])


def grid_start(gate: GateSpec, params: GkpParams, points_per_width: float = 2.0) -> tuple[float, int]:
    d = params.d
    _, beta = _alpha_beta(d)
    ins = [code_basis_state(params, GKP_TRUNC, j) for j in range(d)]
    states = list(ins)
    if gate.kind == "F":
        states += [code_basis_state(fourier_dual_params(params), GKP_TRUNC, j) for j in range(d)]
    L, N = grid_mod.grid_for(states, points_per_width)
    L += beta
    if gate.kind == "F":
        # Output grid has half width pi/h and spacing pi/L; both must suit the output code.
        outs = states[d:]
        Lo, No = grid_mod.grid_for(outs, points_per_width)
        h_out = 2 * Lo / No
        L = max(L, math.pi / h_out)
        h = min(2 * L / N, math.pi / Lo)
        N = grid_mod.next_pow2(2 * L / h)
    if gate.kind == "X":
        L, N = _shift_grid(L, N, beta)
    return L, N


def mat_grid(gate: GateSpec, params: GkpParams, tol: Tolerance = ME_TOL, max_points: int = grid_mod.MAX_POINTS):
    """Grid-oracle matrix with convergence monitoring; error estimate is the last refinement change."""
    L, N = grid_start(gate, params)
    if N > max_points:
        raise AccuracyError(f"grid oracle needs {N} points, budget is {max_points}")
    cache = {}

    def comp(Lc, Nc):
        M = grid_matrix(gate, params, Lc, Nc)
        cache[(Lc, Nc)] = M
        return M

    prev = comp(L, N)
    err = math.inf
    if 2 * N <= max_points:
        nxt = comp(L, 2 * N)
        err = float(np.max(np.abs(nxt - prev)))
        prev = nxt
    out = fourier_dual_params(params) if gate.kind == "F" else params
    return MatrixElements(prev, params, out, gate, "grid", err)


def matrix_elements(gate: GateSpec, params: GkpParams, tol: Tolerance = ME_TOL) -> MatrixElements:
    if gate.kind == "X":
        return mat_pauli_x(params, tol)
    if gate.kind == "Z":
        return mat_pauli_z(params, gate.m, tol)
    if gate.kind == "P":
        return mat_phase(params, tol)
    return mat_fourier(params, tol)
