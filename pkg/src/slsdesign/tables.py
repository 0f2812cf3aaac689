"""Regenerate the reference numeric tables (T1-T5) as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .analytic import analytic_measure, t2, xi_root
from .combinatorics import reduced_support
from .design_space import enumerate_binary
from .errors import DomainError
from .solver import SolverConfig, efficiency, relative_D_efficiency, solve

SCHEMA_VERSION = 1
TABLE_IDS = ("T1", "T2", "T3", "T4", "T5")
T_GRID = tuple(round(0.1 * i, 1) for i in range(10))
SHOWN_CLASSES = 6

# one A-optimal row (q=8, t=0.9) needs ~1.8e6 iterations to reach delta=1e-10
TABLE_SOLVER = SolverConfig(max_iterations=5_000_000)

T2_ROWS = ((4, 0.9), (6, 0.9))
T3_ROWS = ((4, 0.4), (4, 0.5), (4, 0.6), (4, 0.7), (4, 0.8), (4, 0.9),
           (6, 0.7), (6, 0.8), (6, 0.9), (8, 0.8), (8, 0.9), (10, 0.9))
T4_ROWS = ((3, 0.8), (3, 0.9), (5, 0.9), (7, 0.9))
T5_QS = (6, 8, 10)


@dataclass
class TableArtifact:
    table_id: str
    columns: List[str]
    rows: List[Dict]
    provenance: Dict[str, str]
    unconverged: List[Dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unconverged

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "table_id": self.table_id,
            "columns": self.columns,
            "provenance": self.provenance,
            "rows": self.rows,
            "unconverged": self.unconverged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if abs(value) < 1e-12:
            value = 0.0
        return f"{value:.4f}"
    return str(value)


def _pi_columns() -> List[str]:
    return [f"pi_{j}" for j in range(1, SHOWN_CLASSES + 1)]


def _with_classes(row: dict, pi: np.ndarray) -> dict:
    for j in range(1, SHOWN_CLASSES + 1):
        row[f"pi_{j}"] = float(pi[j - 1]) if j <= len(pi) else None
    row["class_masses"] = [float(v) for v in pi]
    return row


def _solve_row(args):
    q, t, criteria, reference, config = args
    space = enumerate_binary(q)
    ref = analytic_measure(reference, q, space=space)
    out = {}
    for crit in criteria:
        res = solve(space, t, crit, config)
        out[crit] = {
            "class_masses": np.asarray(res.class_masses),
            "eff": efficiency(ref, res.measure, t, crit),
            "converged": res.converged,
            "iterations": res.iterations,
            "gap": res.final_gap,
        }
    return q, t, out


def _solve_rows(specs, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_row, specs))
    return [_solve_row(s) for s in specs]


def _table1() -> TableArtifact:
    rows = [{"t": t, "xi_t": xi_root(t)} for t in T_GRID]
    return TableArtifact("T1", ["t", "xi_t"], rows, {"xi_t": "analytic"})


def _table2(config, jobs) -> TableArtifact:
    cols = ["q", "t", "eff_D_ev1"] + _pi_columns()
    rows, bad = [], []
    for q, t, out in _solve_rows([(q, t, ("D",), "ev1", config) for q, t in T2_ROWS], jobs):
        d = out["D"]
        rows.append(_with_classes({"q": q, "t": t, "eff_D_ev1": d["eff"],
                                   "iterations": d["iterations"], "gap": d["gap"]},
                                  d["class_masses"]))
        if not d["converged"]:
            bad.append({"q": q, "t": t, "criterion": "D"})
    prov = {"eff_D_ev1": "efficiency", **{c: "solver" for c in _pi_columns()}}
    return TableArtifact("T2", cols, rows, prov, bad)


def _table3(config, jobs) -> TableArtifact:
    cols = ["q", "t2", "t", "eff_A_ev2"] + _pi_columns()
    rows, bad = [], []
    seen = set()
    for q, t, out in _solve_rows([(q, t, ("A",), "ev2", config) for q, t in T3_ROWS], jobs):
        a = out["A"]
        row = {"q": q, "t2": None if q in seen else t2(q), "t": t, "eff_A_ev2": a["eff"],
               "iterations": a["iterations"], "gap": a["gap"]}
        seen.add(q)
        rows.append(_with_classes(row, a["class_masses"]))
        if not a["converged"]:
            bad.append({"q": q, "t": t, "criterion": "A"})
    prov = {"t2": "analytic", "eff_A_ev2": "efficiency", **{c: "solver" for c in _pi_columns()}}
    return TableArtifact("T3", cols, rows, prov, bad)


def _table4(config, jobs) -> TableArtifact:
    cols = ["q", "t", "eff_D_odd", "eff_A_odd"] + _pi_columns()
    rows, bad = [], []
    for q, t, out in _solve_rows([(q, t, ("D", "A"), "odd", config) for q, t in T4_ROWS], jobs):
        d, a = out["D"], out["A"]
        row = {"q": q, "t": t, "eff_D_odd": d["eff"], "eff_A_odd": a["eff"],
               "class_masses_A": [float(v) for v in a["class_masses"]]}
        rows.append(_with_classes(row, d["class_masses"]))
        for crit, r in out.items():
            if not r["converged"]:
                bad.append({"q": q, "t": t, "criterion": crit})
    prov = {"eff_D_odd": "efficiency", "eff_A_odd": "efficiency",
            **{c: "solver" for c in _pi_columns()}}
    return TableArtifact("T4", cols, rows, prov, bad)


def _table5() -> TableArtifact:
    cols = ["q"] + [f"t={t}" for t in T_GRID]
    rows = []
    for q in T5_QS:
        space = enumerate_binary(q)
        reduced = reduced_support(q, space).measure
        ev1 = analytic_measure("ev1", q, space=space)
        row = {"q": q}
        for t in T_GRID:
            row[f"t={t}"] = relative_D_efficiency(reduced, ev1, t)
        rows.append(row)
    return TableArtifact("T5", cols, rows, {c: "efficiency" for c in cols[1:]})


def regenerate_table(table_id: str, config: Optional[SolverConfig] = None, jobs: int = 1) -> TableArtifact:
    """Recompute one table; cells carry full precision, CSV rounds to 4 dp."""
    table_id = table_id.upper()
    config = config or TABLE_SOLVER
    if table_id == "T1":
        return _table1()
    if table_id == "T2":
        return _table2(config, jobs)
    if table_id == "T3":
        return _table3(config, jobs)
    if table_id == "T4":
        return _table4(config, jobs)
    if table_id == "T5":
        return _table5()
    raise DomainError(f"unknown table {table_id!r}; expected one of {TABLE_IDS}")
