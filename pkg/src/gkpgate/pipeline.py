"""From gate and code parameters to certificates, reference bounds and regime flags."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gate_error import GateErrorCertificate, TARGETS, build_B, certificate, shortcut_bounds
from .matrix_elements import GateSpec, MatrixElements, matrix_elements
from .states import GkpParams

GATES = ("X", "Z", "F", "P")


def reference_bound(gate: str, params: GkpParams) -> float | None:
    """Proven upper bound on the gate error: 8 kappa for Paulis, 48 d^(3/8) kappa^(1/16) for F."""
    if gate in ("X", "Z"):
        return 8 * params.kappa
    if gate == "F":
        return 48 * params.d**0.375 * params.kappa**0.0625
    return None


def in_regime(gate: str, params: GkpParams) -> bool:
    """Whether the parameters satisfy the hypotheses behind ``reference_bound``."""
    k, dl, d = params.kappa, params.delta, params.d
    eps = params.eps if params.eps is not None else params.eps_d
    if gate in ("X", "Z"):
        symmetric = math.isclose(dl, k / (2 * math.pi * d), rel_tol=1e-12)
        return 0 < k < 0.25 and symmetric and math.isclose(eps, params.eps_d, rel_tol=1e-12)
    if gate == "F":
        return 0 < k < 0.25 and dl <= k / (2 * math.pi * d) * (1 + 1e-12) and k / (2 * math.pi * d) <= eps <= params.eps_d * (1 + 1e-12)
    return False


@dataclass(frozen=True)
class GateResult:
    matrix: MatrixElements
    B: object
    cert: GateErrorCertificate
    reference: float | None

    @property
    def passes(self) -> bool:
        return self.reference is None or self.cert.upper <= self.reference


def gate_spec(label: str) -> GateSpec:
    """Parse 'X', 'Z', 'F', 'P', 'I' (the zeroth power of Z) or 'Z^m'."""
    label = label.strip()
    if label == "I":
        return GateSpec("Z", 0)
    if label.startswith("Z^"):
        return GateSpec("Z", int(label[2:]))
    return GateSpec(label)


def evaluate_gate(gate: str, params: GkpParams) -> GateResult:
    spec = gate_spec(gate)
    M = matrix_elements(spec, params)
    target = TARGETS[spec.kind](params.d, spec.m) if spec.kind == "Z" else TARGETS[spec.kind](params.d)
    B = build_B(M, target)
    # The entrywise bound is phase sensitive; the gate error is not.
    short_values = M.alt_values.get("normalized", M.values)
    sparse, general = shortcut_bounds(short_values, target)
    short = sparse if sparse is not None else general
    cert = certificate(
        B,
        gate=spec.label,
        params=params.to_dict(),
        regime_ok=in_regime(spec.label, params),
        shortcut_upper=short,
        provenance=(f"matrix:{M.method}", "shortcut:sparse" if sparse is not None else "shortcut:general"),
    )
    return GateResult(M, B, cert, reference_bound(spec.label, params))


def gate_certificate(gate: str, params: GkpParams) -> GateErrorCertificate:
    return evaluate_gate(gate, params).cert
