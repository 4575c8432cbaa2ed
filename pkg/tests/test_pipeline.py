from __future__ import annotations

import math

import pytest

from gkpgate.errors import DomainError
from gkpgate.pipeline import evaluate_gate, gate_certificate, gate_spec, in_regime, reference_bound
from gkpgate.states import GkpParams


def test_reference_bounds():
    p = GkpParams.symmetric(0.05, 3)
    assert reference_bound("X", p) == pytest.approx(0.4)
    assert reference_bound("Z", p) == pytest.approx(0.4)
    assert reference_bound("F", p) == pytest.approx(48 * 3**0.375 * 0.05**0.0625)
    assert reference_bound("P", p) is None and reference_bound("Z^2", p) is None


@pytest.mark.parametrize(
    "gate, params, expected",
    [
        ("X", GkpParams.symmetric(0.1, 2), True),
        ("X", GkpParams.symmetric(0.3, 2), False),
        ("Z", GkpParams(0.1, 0.001, 0.25, 2), False),
        ("Z", GkpParams.symmetric(0.1, 2, 0.2), False),
        ("F", GkpParams(0.1, 0.001, 0.2, 2), True),
        ("F", GkpParams(0.1, 0.001, 0.001, 2), False),
        ("P", GkpParams.symmetric(0.1, 2), False),
        ("Z^2", GkpParams.symmetric(0.1, 2), False),
    ],
)
def test_in_regime(gate, params, expected):
    assert in_regime(gate, params) is expected


@pytest.mark.parametrize("gate", ["X", "Z", "F"])
def test_table_gates_pass_in_regime(gate):
    r = evaluate_gate(gate, GkpParams.symmetric(0.05, 2))
    assert r.cert.regime_ok and r.passes
    assert r.cert.upper <= r.reference
    assert r.cert.shortcut_upper is not None


def test_fourier_certificate_independent_of_global_phase():
    p = GkpParams.symmetric(0.1, 2)
    c = gate_certificate("F", p)
    assert c.crawford_c > 0.99 and math.isfinite(c.upper)


def test_identity_label_gives_zero_error():
    c = gate_certificate("I", GkpParams.symmetric(0.1, 3))
    assert c.gate == "Z^0" and c.upper == pytest.approx(0.0, abs=1e-6)


def test_gate_spec_rejects_unknown():
    with pytest.raises(DomainError):
        gate_spec("H")
