"""Certified logical gate errors of Gaussian unitaries on approximate GKP codes."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import AccuracyError, DomainError, GkpGateError, ResourceError, StructuralError
from .gate_error import (
    GateErrorCertificate,
    LogicalTarget,
    build_B,
    certificate,
    lowdin_orthogonalize,
    nogo_asymmetric,
    nogo_check,
    nonunitary_bound,
    shortcut_bounds,
)
from .matrix_elements import GateSpec, MatrixElements, mat_fourier, mat_pauli_x, mat_pauli_z, mat_phase
from .numrange import crawford, crawford_bruteforce
from .pipeline import evaluate_gate, gate_certificate
from .states import GkpParams, fourier_dual_params

__all__ = [
    "AccuracyError",
    "DomainError",
    "GateErrorCertificate",
    "GateSpec",
    "GkpGateError",
    "GkpParams",
    "LogicalTarget",
    "MatrixElements",
    "ResourceError",
    "StructuralError",
    "build_B",
    "certificate",
    "crawford",
    "crawford_bruteforce",
    "evaluate_gate",
    "fourier_dual_params",
    "gate_certificate",
    "lowdin_orthogonalize",
    "mat_fourier",
    "mat_pauli_x",
    "mat_pauli_z",
    "mat_phase",
    "nogo_asymmetric",
    "nogo_check",
    "nonunitary_bound",
    "shortcut_bounds",
]
