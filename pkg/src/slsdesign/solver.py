"""Multiplicative weight algorithms for D- and A-optimal measures.

Starting from the uniform measure, every mass is multiplied by
``psi_i(p) / bound`` (bound = q for D, tr H^{-1} for A) until
``max_i psi_i - bound <= delta``.  The gap then certifies that the
criterion value is within delta of its maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from .design_space import DesignMeasure, DesignSpace, class_measure
from .errors import DomainError, SingularityError, SingularStartError
from .information import (SINGULAR_RTOL, Criterion, as_criterion, check_t, class_moments,
                          information, psi_from_classes, summarize)


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 1e-10
    max_iterations: int = 1_000_000
    renormalize_each_step: bool = True
    use_class_symmetry: bool = True
    # keeps excluded masses from underflowing; leave at 0 for faithful runs
    mass_floor: float = 0.0
    trace_every: int = 100

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.mass_floor < 0:
            raise DomainError("mass_floor must be >= 0")
        if self.trace_every < 1:
            raise DomainError("trace_every must be >= 1")


@dataclass(frozen=True, eq=False)
class SolverResult:
    measure: DesignMeasure
    iterations: int
    final_gap: float
    phi: float
    converged: bool
    criterion: Criterion
    t: float
    trace: List[Tuple[int, float, float]] = field(default_factory=list)

    @property
    def class_masses(self) -> Optional[np.ndarray]:
        return self.measure.class_masses

    def to_dict(self) -> dict:
        cm = self.class_masses
        return {
            "q": self.measure.space.q,
            "t": self.t,
            "criterion": self.criterion.value,
            "iterations": self.iterations,
            "final_gap": self.final_gap,
            "phi": self.phi,
            "converged": self.converged,
            "class_masses": None if cm is None else cm.tolist(),
            "masses": self.measure.masses.tolist(),
            "trace": [list(row) for row in self.trace],
        }


def _step(p, psi, bound, config):
    p = p * (psi / bound)
    if config.mass_floor > 0:
        p = np.maximum(p, config.mass_floor)
    return p


def _solve_classes_kernel(space, t, criterion, config):
    q = space.q
    sizes = space.class_sizes().astype(np.float64)
    pi0 = np.full(q, 1.0 / space.n)
    pi, h, gap, phi_value, status, trace = _kernels.class_solve_numba(
        q, sizes, pi0, t, criterion is Criterion.A, config.delta, config.max_iterations,
        config.renormalize_each_step, config.mass_floor, config.trace_every, SINGULAR_RTOL)
    if status == 2:
        if h == 0:
            raise SingularStartError("uniform start has singular H")
        raise SingularityError(f"H became singular at iteration {h}")
    trace = [(int(row[0]), float(row[1]), float(row[2])) for row in trace]
    return class_measure(space, pi), int(h), float(gap), float(phi_value), status == 0, trace


def _solve_classes(space, t, criterion, config):
    q = space.q
    sizes = space.class_sizes().astype(np.float64)
    pi = np.full(q, 1.0 / space.n)
    trace = []
    h = 0
    while True:
        summary = summarize(*class_moments(q, pi), t)
        if summary.singular:
            if h == 0:
                raise SingularStartError("uniform start has singular H")
            raise SingularityError(f"H became singular at iteration {h}")
        report = psi_from_classes(summary, criterion)
        done = report.max_gap <= config.delta
        if h % config.trace_every == 0 or done or h == config.max_iterations:
            trace.append((h, report.phi, report.max_gap))
        if done or h == config.max_iterations:
            break
        pi = _step(pi, report.psi, report.bound, config)
        if config.renormalize_each_step or config.mass_floor > 0:
            pi = pi / (sizes @ pi)
        h += 1
    return class_measure(space, pi), h, report.max_gap, report.phi, done, trace


def _solve_full(space, t, criterion, config):
    X = space.as_float()
    p = np.full(space.n, 1.0 / space.n)
    trace = []
    h = 0
    while True:
        summary = summarize(*_kernels.moments(X, p), t)
        if summary.singular:
            if h == 0:
                raise SingularStartError("uniform start has singular H")
            raise SingularityError(f"H became singular at iteration {h}")
        M = summary.inv_H if criterion is Criterion.D else summary.inv_H @ summary.inv_H
        bound = float(space.q) if criterion is Criterion.D else float(np.trace(summary.inv_H))
        psi = _kernels.quadratic_psi(X, summary.g, M, summary.t)
        gap = float(psi.max() - bound)
        phi_value = summary.log_det_H if criterion is Criterion.D else -bound
        done = gap <= config.delta
        if h % config.trace_every == 0 or done or h == config.max_iterations:
            trace.append((h, phi_value, gap))
        if done or h == config.max_iterations:
            break
        p = _step(p, psi, bound, config)
        if config.renormalize_each_step or config.mass_floor > 0:
            p = p / p.sum()
        h += 1
    if abs(p.sum() - 1.0) > 1e-12:
        p = p / p.sum()
    return DesignMeasure(space, p), h, gap, phi_value, done, trace


def solve(space: DesignSpace, t: float, criterion, config: Optional[SolverConfig] = None) -> SolverResult:
    """Run the multiplicative algorithm from the uniform measure on ``space``.

    On binary spaces with ``use_class_symmetry`` the iteration runs on the q
    per-class masses; otherwise every point's mass is updated.  Hitting
    ``max_iterations`` is reported through ``converged=False``.
    """
    t = check_t(t)
    criterion = as_criterion(criterion)
    config = config or SolverConfig()
    if space.is_binary and config.use_class_symmetry:
        run = _solve_classes_kernel if _kernels.USE_NUMBA else _solve_classes
        measure, h, gap, phi_value, done, trace = run(space, t, criterion, config)
    else:
        measure, h, gap, phi_value, done, trace = _solve_full(space, t, criterion, config)
    return SolverResult(measure, h, gap, phi_value, done, criterion, t, trace)


def efficiency(candidate: DesignMeasure, reference_optimal: DesignMeasure, t: float, criterion) -> float:
    """D-efficiency ``(det ratio)^{1/q}`` or A-efficiency ``tr ratio`` against an optimum."""
    criterion = as_criterion(criterion)
    if candidate.space is not reference_optimal.space:
        raise DomainError("measures live on different spaces")
    c = information(candidate, t)
    r = information(reference_optimal, t)
    if c.singular or r.singular:
        raise SingularityError("efficiency needs nonsingular H for both measures")
    if criterion is Criterion.D:
        return math.exp((c.log_det_H - r.log_det_H) / candidate.space.q)
    return float(np.trace(r.inv_H) / np.trace(c.inv_H))


def relative_D_efficiency(p1: DesignMeasure, p2: DesignMeasure, t: float) -> float:
    """``[det H(p1) / det H(p2)]^{1/q}`` via log-determinants."""
    return efficiency(p1, p2, t, Criterion.D)
