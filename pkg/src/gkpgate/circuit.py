"""Circuit graphs of logical gates and their subadditive error budgets.

A circuit is a connected DAG. Input vertices feed exactly one wire, output
vertices absorb exactly one, and each interior vertex is a gate whose
incoming and outgoing wire dimensions have equal products. Gates are
applied in an order where each next gate only reads from inputs of the
graph left after detaching everything before it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError, StructuralError

ROLES = ("input", "output", "interior")


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    dim: int


@dataclass
class CircuitGraph:
    roles: dict[str, str]
    edges: list[Edge]
    order: list[str] = field(default_factory=list)
    gates: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> CircuitGraph:
        try:
            roles = {str(v["id"]): v["role"] for v in data["vertices"]}
            edges = [Edge(str(e["id"]), str(e["src"]), str(e["dst"]), int(e["dim"])) for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"malformed circuit description: {exc}") from exc
        order = [str(v) for v in data.get("order", [])]
        gates = {str(k): dict(v) for k, v in data.get("gates", {}).items()}
        return cls(roles, edges, order, gates)

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v, "role": r} for v, r in self.roles.items()],
            "edges": [{"id": e.id, "src": e.src, "dst": e.dst, "dim": e.dim} for e in self.edges],
            "order": list(self.order),
            "gates": self.gates,
        }

    @property
    def interior(self) -> list[str]:
        return [v for v, r in self.roles.items() if r == "interior"]

    def in_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.dst == v]

    def out_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.src == v]


def load(path: str | Path) -> CircuitGraph:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise StructuralError(f"cannot read circuit file {path}: {exc}") from exc
    return CircuitGraph.from_dict(data)


def save(graph: CircuitGraph, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(graph.to_dict(), fh, indent=2)


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def _structure_problems(g: CircuitGraph) -> list[str]:
    out = []
    for v, r in g.roles.items():
        if r not in ROLES:
            out.append(f"vertex {v}: unknown role {r!r}")
    ids = [e.id for e in g.edges]
    if len(set(ids)) != len(ids):
        out.append("duplicate edge ids")
    for e in g.edges:
        for end in (e.src, e.dst):
            if end not in g.roles:
                out.append(f"edge {e.id}: unknown vertex {end}")
        if e.dim < 2:
            out.append(f"edge {e.id}: dimension {e.dim} < 2")
    if out:
        return out
    for v, r in g.roles.items():
        nin, nout = len(g.in_edges(v)), len(g.out_edges(v))
        if r == "input" and (nin, nout) != (0, 1):
            out.append(f"input vertex {v}: needs in-degree 0 and out-degree 1, has {nin}/{nout}")
        elif r == "output" and (nin, nout) != (1, 0):
            out.append(f"output vertex {v}: needs in-degree 1 and out-degree 0, has {nin}/{nout}")
        elif r == "interior":
            pin = math.prod(e.dim for e in g.in_edges(v))
            pout = math.prod(e.dim for e in g.out_edges(v))
            if nin == 0 or nout == 0:
                out.append(f"interior vertex {v}: needs incoming and outgoing wires")
            elif pin != pout:
                out.append(f"interior vertex {v}: in-dimension {pin} != out-dimension {pout}")
    if not _connected(g):
        out.append("graph is not connected")
    if _has_cycle(g):
        out.append("graph has a directed cycle")
    return out


def _connected(g: CircuitGraph) -> bool:
    if not g.roles:
        return False
    adj: dict[str, set[str]] = {v: set() for v in g.roles}
    for e in g.edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)
    start = next(iter(g.roles))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.roles)


def _has_cycle(g: CircuitGraph) -> bool:
    indeg = {v: 0 for v in g.roles}
    for e in g.edges:
        indeg[e.dst] += 1
    ready = [v for v, n in indeg.items() if n == 0]
    done = 0
    while ready:
        v = ready.pop()
        done += 1
        for e in g.out_edges(v):
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                ready.append(e.dst)
    return done != len(g.roles)


def _peelable(g: CircuitGraph, v: str, removed: set[str]) -> bool:
    """v is in the in-boundary: every predecessor is an input or an already-applied gate."""
    return all(g.roles[e.src] == "input" or e.src in removed for e in g.in_edges(v))


def _order_problems(g: CircuitGraph, order: list[str]) -> list[str]:
    interior = set(g.interior)
    if sorted(order) != sorted(interior):
        return [f"order must list each interior vertex once; got {order}"]
    removed: set[str] = set()
    for t, v in enumerate(order, 1):
        if not _peelable(g, v, removed):
            return [f"order step {t}: vertex {v} has a predecessor that is not yet an input"]
        # Detaching v's out-edges to fresh inputs is recorded by marking v as applied.
        removed.add(v)
    return []


def validate(graph: CircuitGraph) -> ValidationReport:
    problems = _structure_problems(graph)
    if not problems:
        problems += _order_problems(graph, graph.order)
    return ValidationReport(tuple(problems))


def derive_order(graph: CircuitGraph) -> list[str]:
    """An admissible gate order; among ready gates the smallest id goes first."""
    problems = _structure_problems(graph)
    if problems:
        raise StructuralError("; ".join(problems))
    pending = sorted(graph.interior, key=_id_key)
    removed: set[str] = set()
    order = []
    while pending:
        ready = [v for v in pending if _peelable(graph, v, removed)]
        if not ready:
            raise StructuralError(f"no admissible gate among {pending}")
        v = ready[0]
        order.append(v)
        removed.add(v)
        pending.remove(v)
    return order


def _id_key(v: str):
    return (0, int(v), v) if v.lstrip("-").isdigit() else (1, 0, v)


def gate_bound(entry: dict) -> float:
    """Upper bound carried by a gate entry: an explicit ``bound`` or a computed certificate."""
    if "bound" in entry:
        b = float(entry["bound"])
        if not b >= 0:
            raise DomainError(f"gate bound must be non-negative, got {b}")
        return b
    if "gate" in entry and "params" in entry:
        from .pipeline import gate_certificate
        from .states import GkpParams

        return gate_certificate(entry["gate"], GkpParams.from_dict(entry["params"])).upper
    raise DomainError(f"gate entry needs 'bound' or 'gate' with 'params': {entry}")


def total_budget(graph: CircuitGraph) -> float:
    """Sum of per-gate upper bounds over the interior vertices."""
    if not graph.order:
        graph = CircuitGraph(graph.roles, graph.edges, derive_order(graph), graph.gates)
    report = validate(graph)
    if not report.ok:
        raise StructuralError("; ".join(report.problems))
    total = 0.0
    for v in graph.interior:
        if v not in graph.gates:
            raise DomainError(f"interior vertex {v} has no gate certificate")
        total += gate_bound(graph.gates[v])
    return total
