"""Command-line front end: ``gkpgate {table2,nogo,sweep,xcheck,circuit}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .circuit import derive_order, gate_bound, load, total_budget, validate
from .errors import GkpGateError
from .gate_error import nogo_asymmetric, nogo_check
from .matrix_elements import GateSpec, mat_grid, matrix_elements
from .pipeline import evaluate_gate, gate_spec
from .states import GkpParams

SCHEMA = "v1"
COLUMNS = ["gate", "d", "kappa", "delta", "eps", "c", "lower", "upper", "paper_bound", "pass", "regime_ok", "method", "err_est"]
NOGO_TARGET = 3 / 100
ASYM_TARGET = 1 / 50


def _floats(text: str) -> list[float]:
    vals = [float(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list")
    return vals


def _ints(text: str) -> list[int]:
    return [int(v) for v in _floats(text)]


def _params(args, kappa: float, d: int) -> GkpParams:
    delta = kappa / (2 * math.pi * d) if args.delta is None else args.delta
    eps = 1 / (2 * d) if args.eps is None else args.eps
    return GkpParams(kappa, delta, eps, d)


def _points(args) -> list[tuple[float, int]]:
    return [(k, d) for d in args.d for k in args.kappa]


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(jobs) as pool:
        return list(pool.map(fn, items))


def _row(gate, p: GkpParams, c, lower, upper, bound, ok, regime, method, err) -> dict:
    return {
        "gate": gate, "d": p.d, "kappa": p.kappa, "delta": p.delta, "eps": p.eps,
        "c": c, "lower": lower, "upper": upper, "paper_bound": bound,
        "pass": bool(ok), "regime_ok": bool(regime), "method": method, "err_est": err,
    }


def _cert_row(gate: str, p: GkpParams) -> dict:
    r = evaluate_gate(gate, p)
    c = r.cert
    return _row(c.gate, p, c.crawford_c, c.lower, c.upper, r.reference, r.passes, c.regime_ok, r.matrix.method, r.matrix.error_estimate)


def _emit(args, command: str, rows: list[dict], extra: dict | None = None) -> bool:
    checked = [r for r in rows if r.get("regime_ok", True)]
    all_pass = all(r["pass"] for r in checked)
    if args.format == "json":
        doc = {"version": SCHEMA, "command": command, "package": __version__, "seed": args.seed, "all_pass": all_pass, "rows": rows}
        doc.update(extra or {})
        text = json.dumps(doc, indent=2, default=_jsonable) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# version: {SCHEMA}; command: {command}; all_pass: {all_pass}\n")
        w = csv.DictWriter(buf, fieldnames=COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in COLUMNS})
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return all_pass


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


def cmd_table2(args) -> bool:
    """X, Z and F certificates against 8 kappa and 48 d^(3/8) kappa^(1/16)."""
    items = [(g, k, d) for k, d in _points(args) for g in ("X", "Z", "F")]
    rows = _map(lambda it: _cert_row(it[0], GkpParams.symmetric(it[1], it[2])), items, args.jobs)
    return _emit(args, "table2", rows)


def cmd_sweep(args) -> bool:
    items = [(g, k, d) for k, d in _points(args) for g in args.gate]
    rows = _map(lambda it: _cert_row(it[0], _params(args, it[1], it[2])), items, args.jobs)
    return _emit(args, "sweep", rows)


def cmd_nogo(args) -> bool:
    rows, details = [], []
    for k, d in _points(args):
        rep = nogo_check(_params(args, k, d))
        symmetric = math.isclose(rep.params.delta, k / (2 * math.pi * d), rel_tol=1e-12)
        ok = rep.constant_cap_holds and rep.lower_linear >= (NOGO_TARGET if symmetric else rep.proven_lower)
        if rep.regime_analytic:
            ok = ok and rep.analytic_cap_holds
        rows.append(_row("P", rep.params, rep.abs_b00, rep.lower_linear, None, NOGO_TARGET, ok, rep.regime_constant, "b00", None))
        details.append(rep.to_dict())
    for k, d in _points(args) if args.asym_delta else []:
        for dl in args.asym_delta:
            rep = nogo_asymmetric(k, dl, d)
            p = rep.code.params
            rows.append(_row("P-asym", p, None, rep.max_lower, None, ASYM_TARGET, rep.max_lower >= ASYM_TARGET, rep.regime_ok, "b00-max-of-two", None))
            details.append(rep.to_dict())
    return _emit(args, "nogo", rows, {"details": details})


def cmd_xcheck(args) -> bool:
    rows = []
    specs = [(g, gate_spec(g)) for g in args.gate]
    for k, d in _points(args):
        p = _params(args, k, d)
        for g, spec in specs:
            try:
                a = matrix_elements(spec, p)
                gr = mat_grid(spec, p)
                dev = float(np.max(np.abs(a.values - gr.values)))
                allowed = max(args.tol, gr.error_estimate + a.error_estimate)
                rows.append(_row(g, p, None, None, None, allowed, dev <= allowed, True, f"{a.method}-vs-grid", dev))
            except GkpGateError as exc:
                rows.append(_row(g, p, None, None, None, None, False, False, f"skipped: {exc}", None))
    return _emit(args, "xcheck", rows)


def cmd_circuit(args) -> bool:
    graph = load(args.path)
    report = validate(graph) if graph.order else None
    doc = {"path": args.path}
    try:
        order = graph.order or derive_order(graph)
        if report is not None and not report.ok:
            raise GkpGateError("; ".join(report.problems))
        doc["order"] = order
        doc["per_gate"] = {v: gate_bound(graph.gates[v]) for v in order if v in graph.gates}
        doc["budget"] = total_budget(graph)
        doc["valid"] = True
        ok = True
    except GkpGateError as exc:
        doc["valid"] = False
        doc["problems"] = str(exc)
        ok = False
    args.format = "json"
    return _emit(args, "circuit", [], doc) and ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gkpgate", description="Certified logical gate errors for approximate GKP codes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gates: bool = False):
        p.add_argument("--d", type=_ints, default=[2], help="comma-separated code dimensions")
        p.add_argument("--kappa", type=_floats, default=[0.1], help="comma-separated envelope widths")
        sq = p.add_mutually_exclusive_group()
        sq.add_argument("--delta", type=float, help="peak width (default: symmetric kappa/(2 pi d))")
        sq.add_argument("--symmetric", action="store_true", help="use delta = kappa/(2 pi d)")
        ep = p.add_mutually_exclusive_group()
        ep.add_argument("--eps", type=float, help="truncation half-width")
        ep.add_argument("--eps-optimal", action="store_true", help="use eps = 1/(2d) (default)")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1, help="parameter points evaluated concurrently")
        if gates:
            p.add_argument("--gate", type=lambda s: s.split(","), default=["X", "Z", "F"])

    common(sub.add_parser("table2", help="X, Z, F certificates against the proven bounds"))
    pn = sub.add_parser("nogo", help="phase-gate no-go checks")
    common(pn)
    pn.add_argument("--asym-delta", type=_floats, help="also check the asymmetric code (kappa, delta) and its Fourier dual")
    common(sub.add_parser("sweep", help="certificates over a parameter grid"), gates=True)
    common(sub.add_parser("xcheck", help="analytic matrix elements against the grid oracle"), gates=True)
    pc = sub.add_parser("circuit", help="validate a circuit graph and sum its error budget")
    pc.add_argument("path")
    pc.add_argument("--out")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--format", choices=("json",), default="json")
    return parser


COMMANDS = {"table2": cmd_table2, "nogo": cmd_nogo, "sweep": cmd_sweep, "xcheck": cmd_xcheck, "circuit": cmd_circuit}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ok = COMMANDS[args.command](args)
    except GkpGateError as exc:
        print(f"gkpgate: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
