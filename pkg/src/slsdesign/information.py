"""Information matrices, D/A criteria and equivalence-theorem checks.

For a design measure p and asymmetry parameter t the second-order least
squares information matrix is ``H(p) = G(p) - t g(p) g(p)^T`` with
``G = sum p_i x_i x_i^T`` and ``g = sum p_i x_i``.  The D-criterion is
``log det H`` and the A-criterion ``-tr H^{-1}``; both are -inf when H is
singular.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .design_space import DesignMeasure, _check_class_masses
from .errors import (DegenerateDistributionError, DomainError, InvalidMeasureError,
                     SingularityError)

SINGULAR_RTOL = 1e-12
DEFAULT_OPT_TOL = 1e-8


class Criterion(str, enum.Enum):
    D = "D"
    A = "A"


def as_criterion(value) -> Criterion:
    try:
        return Criterion(value.upper() if isinstance(value, str) else value)
    except ValueError:
        raise DomainError(f"unknown criterion {value!r}; expected 'D' or 'A'") from None


def check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t!r}")
    return t


@dataclass(frozen=True)
class ErrorMomentProfile:
    mu2: float
    mu3: float
    mu4: float

    @property
    def t(self) -> float:
        return moments_to_t(self.mu2, self.mu3, self.mu4)


def moments_to_t(mu2: float, mu3: float, mu4: float) -> float:
    """Asymmetry parameter ``mu3^2 / (mu2 (mu4 - mu2^2))`` of an error law."""
    if not mu2 > 0:
        raise DomainError(f"variance mu2 must be positive, got {mu2!r}")
    excess = mu4 - mu2 * mu2
    if not excess > 0:
        raise DomainError(f"mu4 - mu2^2 must be positive, got {excess!r}")
    t = mu3 * mu3 / (mu2 * excess)
    if t >= 1.0:
        raise DegenerateDistributionError(f"t = {t!r} >= 1: two-point error law")
    return t


@dataclass(frozen=True, eq=False)
class InformationSummary:
    G: np.ndarray
    g: np.ndarray
    H: np.ndarray
    t: float
    singular: bool
    inv_H: Optional[np.ndarray] = None
    log_det_H: Optional[float] = None

    @property
    def q(self) -> int:
        return self.g.shape[0]

    def require_inverse(self) -> np.ndarray:
        if self.singular:
            raise SingularityError("H(p) is singular")
        return self.inv_H

    def to_dict(self) -> dict:
        return {
            "dim": self.q,
            "t": self.t,
            "singular": self.singular,
            "G": self.G.ravel().tolist(),
            "g": self.g.tolist(),
            "H": self.H.ravel().tolist(),
            "inv_H": None if self.inv_H is None else self.inv_H.ravel().tolist(),
            "log_det_H": self.log_det_H,
        }


def summarize(G: np.ndarray, g: np.ndarray, t: float) -> InformationSummary:
    """Assemble H from G and g and decide singularity."""
    t = check_t(t)
    H = G - t * np.outer(g, g)
    Hs = 0.5 * (H + H.T)
    eig = np.linalg.eigvalsh(Hs)
    if eig[0] < SINGULAR_RTOL * (1.0 + eig[-1]):
        return InformationSummary(G, g, H, t, True)
    try:
        L = np.linalg.cholesky(Hs)
    except np.linalg.LinAlgError:
        return InformationSummary(G, g, H, t, True)
    Linv = np.linalg.solve(L, np.eye(L.shape[0]))
    inv = Linv.T @ Linv
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    return InformationSummary(G, g, H, t, False, inv, log_det)


def information(measure: DesignMeasure, t: float) -> InformationSummary:
    G, g = _kernels.moments(measure.space.as_float(), measure.masses)
    return summarize(G, g, t)


def class_moments(q: int, pi) -> tuple:
    """G and g of the class-symmetric measure with per-point masses ``pi``.

    Uses the closed-form class sums: the points of weight j add up to
    ``(j n_j / q) 1`` and their outer products to
    ``j n_j / (q (q-1)) ((q-j) I + (j-1) J)``.
    """
    pi = np.asarray(pi, dtype=np.float64)
    diag = 0.0
    off = 0.0
    mean = 0.0
    for j in range(1, q + 1):
        w = pi[j - 1] * math.comb(q, j)
        if w == 0.0:
            continue
        mean += w * j / q
        scale = w * j / (q * (q - 1))
        diag += scale * (q - j)
        off += scale * (j - 1)
    G = np.full((q, q), off)
    G[np.diag_indices(q)] += diag
    return G, np.full(q, mean)


def information_from_classes(q: int, pi, t: float) -> InformationSummary:
    """Information summary of a class-symmetric binary measure, no enumeration."""
    if q < 2:
        raise DomainError("class-symmetric evaluation needs q >= 2")
    pi = _check_class_masses(q, pi)
    G, g = class_moments(q, pi)
    return summarize(G, g, t)


def phi(summary: InformationSummary, criterion) -> float:
    criterion = as_criterion(criterion)
    if summary.singular:
        return -math.inf
    if criterion is Criterion.D:
        return summary.log_det_H
    return -float(np.trace(summary.inv_H))


def _weight_and_bound(summary: InformationSummary, criterion: Criterion):
    inv = summary.require_inverse()
    if criterion is Criterion.D:
        return inv, float(summary.q)
    return inv @ inv, float(np.trace(inv))


@dataclass(frozen=True, eq=False)
class OptimalityReport:
    criterion: Criterion
    psi: np.ndarray
    bound: float
    max_gap: float
    phi: float
    delta_certificate: float

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "bound": self.bound,
            "max_gap": self.max_gap,
            "phi": self.phi,
            "delta_certificate": self.delta_certificate,
            "psi": self.psi.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _report(criterion, psi, bound, phi_value) -> OptimalityReport:
    gap = float(np.max(psi) - bound)
    return OptimalityReport(criterion, psi, bound, gap, phi_value, max(gap, 0.0))


def psi_values(measure: DesignMeasure, summary: InformationSummary, criterion) -> OptimalityReport:
    """psi_D or psi_A at every point of the space, with the optimality gap.

    ``delta_certificate`` bounds the criterion's distance to its maximum:
    ``phi >= max phi - delta_certificate``.
    """
    criterion = as_criterion(criterion)
    M, bound = _weight_and_bound(summary, criterion)
    psi = _kernels.quadratic_psi(measure.space.as_float(), summary.g, M, summary.t)
    return _report(criterion, psi, bound, phi(summary, criterion))


def class_representatives(q: int) -> np.ndarray:
    """Row j-1 is the weight-j point with ones in the first j coordinates."""
    return np.tril(np.ones((q, q)))


def psi_from_classes(summary: InformationSummary, criterion) -> OptimalityReport:
    """Per-class psi for a class-symmetric summary (psi is constant on classes)."""
    criterion = as_criterion(criterion)
    M, bound = _weight_and_bound(summary, criterion)
    psi = _kernels.quadratic_psi_numpy(class_representatives(summary.q), summary.g, M, summary.t)
    return _report(criterion, psi, bound, phi(summary, criterion))


def check_optimal(measure: DesignMeasure, t: float, criterion, tol: float = DEFAULT_OPT_TOL):
    """Equivalence-theorem test: ``(is_optimal, report)``.

    The report is None when H(p) is singular, which is never optimal.
    """
    summary = information(measure, t)
    if summary.singular:
        return False, None
    report = psi_values(measure, summary, criterion)
    return report.max_gap <= tol, report


def directional_derivative(p: DesignMeasure, p_tilde: DesignMeasure, t: float, criterion) -> float:
    """One-sided derivative of phi at p towards p_tilde: ``sum p~_i (psi_i(p) - bound)``."""
    if p.space is not p_tilde.space:
        raise InvalidMeasureError("measures live on different spaces")
    summary = information(p, t)
    report = psi_values(p, summary, criterion)
    return float(p_tilde.masses @ (report.psi - report.bound))
