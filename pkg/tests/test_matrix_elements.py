from __future__ import annotations

import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gkpgate.matrix_elements as ME
from gkpgate.errors import AccuracyError, DomainError
from gkpgate.states import GkpParams, fourier_dual_params

# Values below come from an independent high-precision evaluation (mpmath, 30 digits)
# of the lattice sums and peak integrals that define each entry.
WRAP_K01 = 0.997503122397460124
WRAP_K005_W2 = 0.997503122397460124
Z_SCALAR_D2_K005 = 0.999843762206395492
B00_D2_K0003 = complex(0.89442719099989634743, 1.28117e-7)
B00_D3_K001 = complex(0.89442669409455545691, 9.4902e-7)


def sym(kappa, d, eps=None):
    return GkpParams.symmetric(kappa, d, eps)


def test_gatespec():
    assert ME.GateSpec("Z", 2).label == "Z^2"
    assert ME.GateSpec("Z").label == "Z"
    with pytest.raises(DomainError):
        ME.GateSpec("H")


def test_envelope_overlaps_match_high_precision():
    assert ME.envelope_shift_overlap(0.1) == pytest.approx(WRAP_K01, abs=1e-15)
    assert ME.envelope_overlap(0.05, 2) == pytest.approx(WRAP_K005_W2, abs=1e-15)
    assert ME.envelope_overlap(0.3, 0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pauli_x_structure(d):
    p = sym(0.1, d)
    M = ME.mat_pauli_x(p).values
    assert M[0, d - 1] == pytest.approx(WRAP_K01, abs=1e-15)
    for k in range(d - 1):
        assert M[k + 1, k] == 1.0
    assert np.count_nonzero(M) == d


@pytest.mark.parametrize("d, kappa", [(2, 0.2), (3, 0.3)])
def test_pauli_x_pairwise_route_agrees(d, kappa):
    p = sym(kappa, d)
    assert np.max(np.abs(ME.mat_pauli_x(p).values - ME.mat_pauli_x_pairs(p).values)) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 7])
def test_shift_power_is_permutation_with_wrap_weights(n):
    d = 3
    p = sym(0.2, d)
    M = ME.mat_shift(p, n).values
    for k in range(d):
        wrap, j = divmod(k + n, d)
        assert abs(M[j, k]) == pytest.approx(ME.envelope_overlap(0.2, wrap) if wrap else 1.0)
    if n == 1:
        assert np.allclose(M, ME.mat_pauli_x(p).values)


def test_pauli_z_scalar_matches_high_precision():
    s = ME.momentum_kick_scalar(sym(0.05, 2), 1)
    assert abs(s - Z_SCALAR_D2_K005) < 1e-14


@pytest.mark.parametrize("d, kappa, m", [(2, 0.05, 1), (3, 0.2, 2), (5, 0.3, -3)])
def test_pauli_z_quadrature_route_agrees(d, kappa, m):
    p = sym(kappa, d)
    q, err = ME.momentum_kick_scalar_quad(p, m)
    assert abs(q - ME.momentum_kick_scalar(p, m)) < max(1e-11, 10 * err)


def test_pauli_z_zero_power_is_identity():
    assert np.allclose(ME.mat_pauli_z(sym(0.2, 3), 0).values, np.eye(3), atol=1e-14)


@pytest.mark.parametrize("m", [1, 2])
def test_pauli_z_negative_power_is_conjugate(m):
    p = sym(0.2, 3)
    assert np.allclose(ME.mat_pauli_z(p, -m).values, ME.mat_pauli_z(p, m).values.conj(), atol=1e-14)


def test_pauli_z_diagonal_phases():
    d = 5
    M = ME.mat_pauli_z(sym(0.1, d)).values
    w = cmath.exp(2j * math.pi / d)
    ratios = np.diag(M)[1:] / np.diag(M)[:-1]
    assert np.allclose(ratios, w, atol=1e-14)


def test_pauli_z_power_limit():
    with pytest.raises(DomainError):
        ME.mat_pauli_z(sym(0.1, 2), 3)


@pytest.mark.parametrize(
    "params, expected",
    [(sym(0.003, 2, 0.25), B00_D2_K0003), (sym(0.01, 3, 1 / 6), B00_D3_K001)],
)
def test_phase_b00_matches_high_precision(params, expected):
    b = ME.phase_scalar(params)
    assert abs(b.real - expected.real) < 1e-13
    assert abs(b.imag - expected.imag) < 1e-11


@pytest.mark.parametrize("d, kappa, j", [(2, 0.05, 0), (2, 0.05, 1), (3, 0.01, 2), (4, 0.2, 1)])
def test_phase_quadrature_route_agrees(d, kappa, j):
    p = sym(kappa, d)
    q, err = ME.phase_scalar_quad(p, j)
    assert abs(q - ME.phase_scalar(p, j)) < max(1e-11, 10 * err)


def test_phase_logical_phases():
    d = 3
    p = sym(0.1, d)
    diag = np.diag(ME.mat_phase(p).values)
    for j in range(d):
        logical = cmath.exp(1j * math.pi * (j * j + j) / d)
        assert abs(diag[j] / ME.phase_scalar(p, j) - logical) < 1e-14


@pytest.mark.parametrize(
    "gate, d, kappa",
    [("X", 2, 0.3), ("X", 3, 0.4), ("Z", 2, 0.3), ("Z", 3, 0.4), ("P", 2, 0.3), ("P", 3, 0.4)],
)
def test_analytic_matches_grid_oracle(gate, d, kappa):
    p = sym(kappa, d)
    g = ME.GateSpec(gate)
    an = ME.matrix_elements(g, p).values
    gr = ME.mat_grid(g, p)
    assert np.max(np.abs(an - gr.values)) < max(1e-9, 10 * gr.error_estimate)


@pytest.mark.parametrize("d, kappa", [(2, 0.2), (2, 0.1), (3, 0.2)])
def test_fourier_routes_agree(d, kappa):
    p = sym(kappa, d)
    an = ME.mat_fourier(p, convention="normalized", method="analytic").values
    qu = ME.mat_fourier(p, convention="normalized", method="quadrature").values
    lat = np.array([[ME.fourier_lattice_sum(p, j, k) for k in range(d)] for j in range(d)])
    assert np.max(np.abs(an - qu)) < 1e-11
    assert np.max(np.abs(an - lat)) < 1e-11


@pytest.mark.parametrize("d, kappa", [(2, 0.2)])
def test_fourier_matches_grid_oracle(d, kappa):
    p = sym(kappa, d)
    gr = ME.mat_grid(ME.GateSpec("F"), p)
    an = ME.mat_fourier(p).values
    assert np.max(np.abs(an - gr.values)) < max(1e-9, 10 * gr.error_estimate)


@pytest.mark.parametrize("d", [2, 3])
def test_fourier_approaches_discrete_fourier(d):
    M = ME.mat_fourier(sym(1e-3, d), convention="normalized").values
    j = np.arange(d)
    ideal = np.exp(2j * math.pi * np.outer(j, j) / d) / math.sqrt(d)
    assert np.max(np.abs(M - ideal)) < 1e-6


def test_fourier_conventions_differ_by_global_phase():
    p = sym(0.1, 2)
    M = ME.mat_fourier(p)
    assert np.allclose(M.values, cmath.exp(1j * math.pi / 4) * M.alt_values["normalized"])
    N = ME.mat_fourier(p, convention="normalized")
    assert np.allclose(N.values, M.alt_values["normalized"])


def test_fourier_output_code_is_dual():
    p = sym(0.1, 3)
    assert ME.mat_fourier(p).out_params == fourier_dual_params(p)


def test_fourier_domain_errors():
    with pytest.raises(DomainError):
        ME.mat_fourier(GkpParams(0.1, 0.1, 0.25, 2))
    with pytest.raises(DomainError):
        ME.mat_fourier(sym(0.1, 2), convention="weird")
    with pytest.raises(DomainError):
        ME.mat_fourier(sym(0.1, 2), method="weird")
    with pytest.raises(DomainError):
        ME.mat_fourier(sym(3.0, 2, 0.25), method="analytic")


def test_basis_domain_errors():
    with pytest.raises(DomainError):
        ME.mat_pauli_x(GkpParams(0.1, 0.01, None, 2))
    with pytest.raises(DomainError):
        ME.mat_pauli_x(GkpParams(0.1, 0.01, 0.4, 2))


def test_grid_budget_exceeded():
    with pytest.raises(AccuracyError):
        ME.mat_grid(ME.GateSpec("X"), sym(0.3, 2), max_points=1 << 8)


@settings(max_examples=15)
@given(
    st.sampled_from(["X", "Z", "P"]),
    st.integers(2, 5),
    st.floats(0.01, 0.24),
)
def test_rows_and_columns_are_subnormalized(gate, d, kappa):
    M = ME.matrix_elements(ME.GateSpec(gate), sym(kappa, d)).values
    P = np.abs(M) ** 2
    assert P.sum(axis=0).max() <= 1 + 1e-12
    assert P.sum(axis=1).max() <= 1 + 1e-12


@settings(max_examples=10)
@given(st.integers(2, 3), st.floats(0.01, 0.24))
def test_fourier_rows_subnormalized(d, kappa):
    P = np.abs(ME.mat_fourier(sym(kappa, d)).values) ** 2
    assert P.sum(axis=0).max() <= 1 + 1e-9
    assert P.sum(axis=1).max() <= 1 + 1e-9


def test_to_dict_is_json_serializable():
    M = ME.mat_fourier(sym(0.1, 2))
    data = json.loads(json.dumps(M.to_dict()))
    assert data["gate"] == "F" and len(data["values"]) == 4
    assert "normalized" in data["alt_values"]
    re, im = data["values"][0]
    assert complex(re, im) == pytest.approx(M.values[0, 0])
