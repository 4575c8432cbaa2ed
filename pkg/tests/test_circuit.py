from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import gkpgate.matrix_elements as ME
from gkpgate import circuit as C
from gkpgate.errors import DomainError, StructuralError
from gkpgate.gate_error import build_B, certificate, target_x
from gkpgate.pipeline import gate_certificate
from gkpgate.states import GkpParams


def chain(T: int, bound: float = 0.1) -> C.CircuitGraph:
    vertices = [{"id": "in", "role": "input"}, {"id": "out", "role": "output"}]
    vertices += [{"id": str(i), "role": "interior"} for i in range(1, T + 1)]
    path = ["in"] + [str(i) for i in range(1, T + 1)] + ["out"]
    edges = [{"id": f"e{i}", "src": a, "dst": b, "dim": 2} for i, (a, b) in enumerate(zip(path, path[1:]))]
    gates = {str(i): {"bound": bound} for i in range(1, T + 1)}
    return C.CircuitGraph.from_dict({"vertices": vertices, "edges": edges, "gates": gates})


def two_layer(order=("1", "2", "3")) -> C.CircuitGraph:
    """Two single-wire gates feeding one two-wire gate."""
    data = {
        "vertices": [
            {"id": "a", "role": "input"},
            {"id": "b", "role": "input"},
            {"id": "1", "role": "interior"},
            {"id": "2", "role": "interior"},
            {"id": "3", "role": "interior"},
            {"id": "x", "role": "output"},
            {"id": "y", "role": "output"},
        ],
        "edges": [
            {"id": "e1", "src": "a", "dst": "1", "dim": 2},
            {"id": "e2", "src": "b", "dst": "2", "dim": 3},
            {"id": "e3", "src": "1", "dst": "3", "dim": 2},
            {"id": "e4", "src": "2", "dst": "3", "dim": 3},
            {"id": "e5", "src": "3", "dst": "x", "dim": 2},
            {"id": "e6", "src": "3", "dst": "y", "dim": 3},
        ],
        "order": list(order),
        "gates": {"1": {"bound": 0.1}, "2": {"bound": 0.2}, "3": {"bound": 0.05}},
    }
    return C.CircuitGraph.from_dict(data)


def test_single_gate_graph_valid():
    g = chain(1)
    g.order = ["1"]
    assert C.validate(g).ok
    assert C.total_budget(g) == pytest.approx(0.1)


def test_two_layer_graph_valid_with_declared_order():
    assert C.validate(two_layer()).ok
    assert C.validate(two_layer(("2", "1", "3"))).ok


def test_two_layer_bad_order_reports_vertex():
    rep = C.validate(two_layer(("1", "3", "2")))
    assert not rep.ok and "vertex 3" in rep.problems[0]


def test_two_layer_derived_order_puts_first_layer_first():
    order = C.derive_order(two_layer(()))
    assert order == ["1", "2", "3"]


def test_order_must_cover_interior():
    rep = C.validate(two_layer(("1", "2")))
    assert not rep.ok


def test_cycle_rejected():
    data = {
        "vertices": [{"id": "1", "role": "interior"}, {"id": "2", "role": "interior"}],
        "edges": [{"id": "e1", "src": "1", "dst": "2", "dim": 2}, {"id": "e2", "src": "2", "dst": "1", "dim": 2}],
    }
    rep = C.validate(C.CircuitGraph.from_dict(data))
    assert any("cycle" in p for p in rep.problems)
    with pytest.raises(StructuralError):
        C.derive_order(C.CircuitGraph.from_dict(data))


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d["edges"].__setitem__(0, {**d["edges"][0], "dim": 1}), "dimension 1"),
        (lambda d: d["edges"].__setitem__(1, {**d["edges"][1], "dim": 2}), "in-dimension"),
        (lambda d: d["vertices"].append({"id": "z", "role": "input"}), "input vertex z"),
        (lambda d: d["vertices"].append({"id": "q", "role": "weird"}), "unknown role"),
        (lambda d: d["edges"].append({"id": "e1", "src": "a", "dst": "1", "dim": 2}), "duplicate"),
        (lambda d: d["edges"].append({"id": "e9", "src": "a", "dst": "nope", "dim": 2}), "unknown vertex"),
    ],
)
def test_structural_problems_are_reported(mutate, needle):
    data = two_layer().to_dict()
    mutate(data)
    rep = C.validate(C.CircuitGraph.from_dict(data))
    assert not rep.ok
    assert any(needle in p for p in rep.problems)


def test_disconnected_graph_rejected():
    a, b = chain(1).to_dict(), chain(1).to_dict()
    for v in b["vertices"]:
        v["id"] = "b" + v["id"]
    for e in b["edges"]:
        e.update(id="b" + e["id"], src="b" + e["src"], dst="b" + e["dst"])
    merged = {"vertices": a["vertices"] + b["vertices"], "edges": a["edges"] + b["edges"]}
    assert any("connected" in p for p in C.validate(C.CircuitGraph.from_dict(merged)).problems)


def test_malformed_description():
    with pytest.raises(StructuralError):
        C.CircuitGraph.from_dict({"vertices": [{"id": 1}]})


@pytest.mark.parametrize("T", [1, 3, 6])
def test_chain_order_and_budget(T):
    g = chain(T)
    assert C.derive_order(g) == [str(i) for i in range(1, T + 1)]
    assert C.total_budget(g) == pytest.approx(0.1 * T)


def test_parallel_gates_tie_break_by_id():
    # Two parallel single-wire gates joined by a two-wire gate; ids compare numerically.
    roles = [("i1", "input"), ("i2", "input"), ("10", "interior"), ("9", "interior"), ("11", "interior"), ("o1", "output"), ("o2", "output")]
    wires = [("i1", "10"), ("i2", "9"), ("10", "11"), ("9", "11"), ("11", "o1"), ("11", "o2")]
    data = {
        "vertices": [{"id": v, "role": r} for v, r in roles],
        "edges": [{"id": f"e{i}", "src": a, "dst": b, "dim": 2} for i, (a, b) in enumerate(wires)],
    }
    assert C.derive_order(C.CircuitGraph.from_dict(data)) == ["9", "10", "11"]


def test_budget_order_independent():
    budgets = {C.total_budget(two_layer(o)) for o in [("1", "2", "3"), ("2", "1", "3")]}
    assert len(budgets) == 1 and budgets.pop() == pytest.approx(0.35)


def test_zero_bound_contributes_nothing():
    g = chain(2)
    g.gates["2"] = {"bound": 0.0}
    assert C.total_budget(g) == pytest.approx(0.1)


def test_missing_or_bad_certificate():
    g = chain(2)
    del g.gates["2"]
    with pytest.raises(DomainError):
        C.total_budget(g)
    with pytest.raises(DomainError):
        C.gate_bound({"bound": -1})
    with pytest.raises(DomainError):
        C.gate_bound({"label": "X"})


def test_invalid_order_budget_raises():
    with pytest.raises(StructuralError):
        C.total_budget(two_layer(("3", "1", "2")))


def test_computed_gate_entries():
    p = GkpParams.symmetric(0.05, 2)
    g = chain(3)
    g.gates = {str(i): {"gate": "X", "params": p.to_dict()} for i in range(1, 4)}
    up = gate_certificate("X", p).upper
    assert C.total_budget(g) == pytest.approx(3 * up)
    assert 3 * up <= 3 * 8 * 0.05


def test_save_load_roundtrip(tmp_path):
    g = two_layer()
    path = tmp_path / "g.json"
    C.save(g, path)
    h = C.load(path)
    assert h.to_dict() == g.to_dict()


@pytest.mark.parametrize("n", [2, 3])
def test_subadditivity_witness_for_shift_chain(n):
    p = GkpParams.symmetric(0.05, 2)
    composed = certificate(build_B(ME.mat_shift(p, n), np.linalg.matrix_power(target_x(2).U, n)))
    single = gate_certificate("X", p).upper
    assert composed.lower <= n * single


@given(st.permutations(["1", "2", "3"]))
def test_only_layered_orders_valid(order):
    valid = C.validate(two_layer(tuple(order))).ok
    assert valid == (order[-1] == "3")
