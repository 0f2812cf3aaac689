"""Command-line entry point: ``slsdesign <command> [options]``.

Exit status is 0 on success, 1 when a computation fails (or a table has
unconverged cells) and 2 for invalid usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .analytic import KINDS, analytic_class_masses, analytic_measure, thresholds
from .combinatorics import example1_measure, reduced_support
from .design_space import collapse_to_classes, enumerate_binary, uniform_measure
from .errors import SLSDesignError
from .information import DEFAULT_OPT_TOL, Criterion, check_optimal, check_t
from .solver import SolverConfig, solve
from .tables import SCHEMA_VERSION, TABLE_IDS, regenerate_table

OUTPUT_DIR_ENV = "SLSDESIGN_OUTPUT_DIR"
VERIFY_MEASURES = KINDS + ("uniform", "reduced", "example1")


@dataclass
class RunConfig:
    command: str
    q: Optional[int] = None
    t: List[float] = field(default_factory=list)
    criterion: Optional[str] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_format: str = "text"
    output_path: Optional[Path] = None
    options: dict = field(default_factory=dict)


def _t_value(text: str) -> float:
    try:
        return check_t(float(text))
    except (ValueError, SLSDesignError) as exc:
        raise argparse.ArgumentTypeError(f"t must be a number in [0, 1): {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slsdesign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="multiplicative algorithm on the binary space")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=_t_value, required=True)
    p.add_argument("--criterion", choices=["D", "A"], required=True)
    p.add_argument("--delta", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--full-space", action="store_true",
                   help="update every point's mass instead of per-class masses")
    p.add_argument("--json", dest="json_path", type=Path, help="write the full result as JSON")

    p = sub.add_parser("analytic", help="closed-form measures and thresholds")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=_t_value)
    p.add_argument("--json", dest="json_path", type=Path)

    p = sub.add_parser("verify", help="equivalence-theorem check of a named measure")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=_t_value, required=True)
    p.add_argument("--measure", choices=VERIFY_MEASURES, required=True)
    p.add_argument("--criterion", choices=["D", "A", "both"], default="both")
    p.add_argument("--tol", type=float, default=DEFAULT_OPT_TOL)

    p = sub.add_parser("reduce-support", help="BIB-based measure with reduced support")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=_t_value, default=0.0, help="t used for the H comparison")
    p.add_argument("--format", dest="output_format", choices=["text", "json"], default="text")
    p.add_argument("--json", dest="json_path", type=Path)

    p = sub.add_parser("tables", help="regenerate the reference tables T1-T5")
    p.add_argument("--id", dest="table_id", choices=TABLE_IDS + ("all",), required=True)
    p.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", type=Path, help="output file (or directory for --id all)")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n")


def _fmt_classes(pi) -> str:
    return "(" + ", ".join(f"{v:.4f}" for v in pi) + ")"


def _cmd_solve(cfg: RunConfig) -> int:
    space = enumerate_binary(cfg.q)
    res = solve(space, cfg.t[0], cfg.criterion, cfg.solver)
    status = "converged" if res.converged else "NOT converged"
    lines = [
        f"q={cfg.q} t={cfg.t[0]} criterion={cfg.criterion}: {status} after {res.iterations} iterations",
        f"gap={res.final_gap:.3e} phi={res.phi:.10f}",
    ]
    pi = res.class_masses
    if pi is None and space.is_binary:
        # full-space runs keep the symmetry only up to rounding
        pi = collapse_to_classes(res.measure, tol=1e-6)
    if pi is not None:
        lines.append("class masses " + _fmt_classes(pi))
    _emit("\n".join(lines), None)
    if cfg.output_path is not None:
        payload = {"schema_version": SCHEMA_VERSION, **res.to_dict()}
        _emit(json.dumps(payload), cfg.output_path)
    return 0 if res.converged else 1


def _cmd_analytic(cfg: RunConfig) -> int:
    kind = cfg.options["kind"]
    t = cfg.t[0] if cfg.t else None
    pi = analytic_class_masses(kind, cfg.q, t)
    th = thresholds(cfg.q, t)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "q": cfg.q,
        "t": t,
        "class_masses": pi.tolist(),
        "thresholds": json.loads(th.to_json()),
    }
    _emit(f"{kind} q={cfg.q}: class masses {_fmt_classes(pi)}\nthresholds {th.to_json()}", None)
    if cfg.output_path is not None:
        _emit(json.dumps(payload), cfg.output_path)
    return 0


def _verify_measure(name: str, q: int, t: float):
    if name == "example1":
        return example1_measure(q)[1]
    space = enumerate_binary(q)
    if name == "uniform":
        return uniform_measure(space)
    if name == "reduced":
        return reduced_support(q, space).measure
    return analytic_measure(name, q, t, space=space)


def _cmd_verify(cfg: RunConfig) -> int:
    measure = _verify_measure(cfg.options["measure"], cfg.q, cfg.t[0])
    crits = ["D", "A"] if cfg.criterion == "both" else [cfg.criterion]
    parts = []
    for crit in crits:
        ok, report = check_optimal(measure, cfg.t[0], crit, cfg.options["tol"])
        if report is None:
            parts.append(f"not optimal ({crit}) H singular")
        else:
            verdict = "optimal" if ok else "not optimal"
            parts.append(f"{verdict} ({crit}) gap={report.max_gap:.3e}")
    _emit("; ".join(parts), None)
    return 0


def _cmd_reduce(cfg: RunConfig) -> int:
    from .combinatorics import verify_h_equivalence

    rs = reduced_support(cfg.q)
    same, diff = verify_h_equivalence(rs.measure, rs.reference, cfg.t[0])
    ledger = {**rs.ledger(), "t": cfg.t[0], "same_H": same, "max_H_difference": diff}
    payload = {"schema_version": SCHEMA_VERSION, "ledger": ledger, "incidence": rs.design.to_dict()}
    if cfg.output_format == "json":
        _emit(json.dumps(payload), None)
    else:
        N = rs.design
        lines = [
            f"{rs.design_name}: BIB(q={N.q}, b={N.b}, r={N.r}, k={N.k}, lambda={N.lam})",
            f"support {ledger['support_reduced']} points vs {ledger['support_reference']} for p_{rs.reference_kind}",
            f"H equal at t={cfg.t[0]}: {same} (max difference {diff:.1e})",
            "incidence matrix:",
            N.to_text(),
        ]
        _emit("\n".join(lines), None)
    if cfg.output_path is not None:
        _emit(json.dumps(payload), cfg.output_path)
    return 0 if same else 1


def _cmd_tables(cfg: RunConfig) -> int:
    ids = TABLE_IDS if cfg.options["table_id"] == "all" else (cfg.options["table_id"],)
    out = cfg.output_path
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = Path(os.environ[OUTPUT_DIR_ENV])
        if len(ids) == 1:
            out = out / f"{ids[0]}.{cfg.output_format}"
    status = 0
    for tid in ids:
        art = regenerate_table(tid, jobs=cfg.options["jobs"])
        text = art.to_csv() if cfg.output_format == "csv" else art.to_json()
        target = out
        if out is not None and len(ids) > 1:
            target = out / f"{tid}.{cfg.output_format}"
        _emit(text, target)
        if not art.ok:
            print(f"{tid}: unconverged cells {art.unconverged}", file=sys.stderr)
            status = 1
    return status


_COMMANDS = {
    "solve": _cmd_solve,
    "analytic": _cmd_analytic,
    "verify": _cmd_verify,
    "reduce-support": _cmd_reduce,
    "tables": _cmd_tables,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one command; computational errors become status 1."""
    try:
        return _COMMANDS[cfg.command](cfg)
    except SLSDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, q=getattr(args, "q", None))
    t = getattr(args, "t", None)
    cfg.t = [] if t is None else [t]
    cfg.criterion = getattr(args, "criterion", None)
    cfg.output_path = getattr(args, "json_path", None) or getattr(args, "out", None)
    cfg.output_format = getattr(args, "output_format", "text")
    if args.command == "solve":
        cfg.solver = SolverConfig(delta=args.delta, max_iterations=args.max_iter,
                                  use_class_symmetry=not args.full_space)
    elif args.command == "analytic":
        cfg.options["kind"] = args.kind
    elif args.command == "verify":
        cfg.options.update(measure=args.measure, tol=args.tol)
    elif args.command == "tables":
        cfg.options.update(table_id=args.table_id, jobs=args.jobs)
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except SLSDesignError as exc:
        parser.error(str(exc))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
