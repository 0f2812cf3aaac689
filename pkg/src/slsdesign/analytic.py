"""Closed-form optimal measures, thresholds in t, and their algebraic oracles."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .design_space import DesignMeasure, class_measure, enumerate_binary
from .errors import DomainError
from .information import check_t

ROOT_TOL = 1e-12
ROOT_MAX_ITER = 100
_SQRT_HALF = 2.0 ** -0.5


def u_t(xi: float, t: float) -> float:
    """The quartic whose root in (1/2, 2^{-1/2}) fixes the q = 2 A-optimum."""
    return 1.0 - 2.0 * t * xi - (3.0 - 2.0 * t) * xi * xi + 4.0 * t * xi ** 3 - 2.0 * t * t * xi ** 4


def xi_root(t: float) -> float:
    """Unique root of ``u_t`` on [1/2, 2^{-1/2}], by bisection.

    u_t is positive at 1/2, negative at 2^{-1/2} and strictly decreasing in
    between, so bisection always converges.
    """
    t = check_t(t)
    lo, hi = 0.5, _SQRT_HALF
    for _ in range(ROOT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if u_t(mid, t) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= ROOT_TOL:
            break
    return 0.5 * (lo + hi)


def t0(q: int) -> float:
    return q / (q + 1)


def t1(q: int) -> float:
    return (q + 1) / (q + 2)


def t2(q: int) -> float:
    return 1.0 - 0.5 * (q - 1) ** -2 * (q + math.sqrt(4.0 * (q - 1) ** 2 + q * q))


@dataclass(frozen=True)
class ThresholdSet:
    q: int
    t0: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    xi_t: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def thresholds(q: int, t: Optional[float] = None) -> ThresholdSet:
    """Largest t for which the t-free analytic measures stay optimal.

    Odd q gets ``t0`` (p_odd, both criteria); even q >= 4 gets ``t1``
    (p_ev1, D) and ``t2`` (p_ev2, A).  For q = 2 and a given t the root
    ``xi_t`` of the A-optimal measure is included instead.
    """
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    if q == 2:
        return ThresholdSet(q, xi_t=None if t is None else xi_root(t))
    if q % 2:
        return ThresholdSet(q, t0=t0(q))
    return ThresholdSet(q, t1=t1(q), t2=t2(q))


KINDS = ("pD_q2", "pA_q2", "ev1", "ev2", "odd")


def analytic_class_masses(kind: str, q: int, t: Optional[float] = None) -> np.ndarray:
    """Per-point class masses pi_j (j = 1..q) of an analytic measure."""
    pi = np.zeros(q)
    if kind in ("pD_q2", "pA_q2"):
        if q != 2:
            raise DomainError(f"{kind} is defined for q = 2 only")
        if kind == "pD_q2":
            return np.full(2, 1.0 / 3.0)
        if t is None:
            raise DomainError("pA_q2 needs t")
        xi = xi_root(t)
        return np.array([1.0 - xi, 2.0 * xi - 1.0])
    if kind in ("ev1", "ev2"):
        if q < 4 or q % 2:
            raise DomainError(f"{kind} needs even q >= 4, got {q}")
        m = q // 2
        if kind == "ev1":
            w = 1.0 / (math.comb(q, m) + math.comb(q, m + 1))
            pi[m - 1] = pi[m] = w
        else:
            pi[m - 1] = 1.0 / math.comb(q, m)
        return pi
    if kind == "odd":
        if q < 3 or q % 2 == 0:
            raise DomainError(f"odd needs odd q >= 3, got {q}")
        m = (q - 1) // 2
        pi[m] = 1.0 / math.comb(q, m + 1)
        return pi
    raise DomainError(f"unknown analytic measure {kind!r}; expected one of {KINDS}")


def analytic_measure(kind: str, q: int, t: Optional[float] = None, space=None) -> DesignMeasure:
    pi = analytic_class_masses(kind, q, t)
    if space is None:
        space = enumerate_binary(q)
    return class_measure(space, pi)


def _split(q: int):
    P = np.full((q, q), 1.0 / q)
    return np.eye(q) - P, P


def closed_form_inverse(kind: str, q: int, t: float) -> np.ndarray:
    """H^{-1} for p_ev1, p_ev2 or p_odd written in I - J/q and J/q."""
    t = check_t(t)
    if kind in ("ev1", "ev2"):
        if q < 4 or q % 2:
            raise DomainError(f"{kind} needs even q >= 4, got {q}")
    elif kind == "odd":
        if q < 3 or q % 2 == 0:
            raise DomainError(f"odd needs odd q >= 3, got {q}")
    else:
        raise DomainError(f"no closed-form inverse for {kind!r}")
    C, P = _split(q)
    if kind == "ev1":
        m = q // 2
        c = (2 * m + 1) / (1 + 4 * m * (m + 1) * (1 - t))
        return 2 * (2 * m + 1) / (m + 1) * (C + c * P)
    if kind == "ev2":
        m = q // 2
        return 2 * (2 * m - 1) / m * C + 2 / (m * (1 - t)) * P
    m = (q - 1) // 2
    return 2 * (2 * m + 1) / (m + 1) * (C + 1 / (2 * (m + 1) * (1 - t)) * P)


def l_function(q: int, j: int, t: float) -> float:
    if q % 2 or q < 4:
        raise DomainError(f"l(j, t) needs even q >= 4, got {q}")
    m = q // 2
    d = j - m
    return ((q - 1) ** 2 * (1 - t) ** 2 - 1) * d * d - q * (1 - t) * d


def trace_inverse_ev2(q: int, t: float) -> float:
    m = q // 2
    return 2.0 / m * ((2 * m - 1) ** 2 + 1.0 / (1 - t))


def trace_inverse_odd(q: int, t: float) -> float:
    m = (q - 1) // 2
    return 2.0 * q / (m + 1) * (q - 1 + 1.0 / (2 * (m + 1) * (1 - t)))


ORACLE_KINDS = ("ev1_D", "ev2_A", "odd_D", "odd_A")


def oracle_psi_closed_form(kind: str, q: int, j: int, t: float) -> float:
    """psi at a weight-j point under p_ev1 (D), p_ev2 (A) or p_odd (D, A).

    ev1_D and odd_D use the simplified polynomials in j; ev2_A and odd_A use
    the expanded quadratic forms, so the simplified trace differences can be
    checked against them separately.
    """
    t = check_t(t)
    if not 1 <= j <= q:
        raise DomainError(f"class j must lie in 1..{q}, got {j}")
    if kind in ("ev1_D", "ev2_A"):
        if q < 4 or q % 2:
            raise DomainError(f"{kind} needs even q >= 4, got {q}")
        m = q // 2
        if kind == "ev1_D":
            num = 2 * (2 * m + 1) * (q + 1 - (q + 2) * t)
            den = (m + 1) * (1 + 4 * m * (m + 1) * (1 - t))
            return q - num / den * (j - m) * (j - m - 1)
        return 4.0 / (m * m * q) * ((2 * m - 1) ** 2 * j * (q - j)
                                    + ((1 - t) * j * j + t * (j - m) ** 2) / (1 - t) ** 2)
    if kind in ("odd_D", "odd_A"):
        if q < 3 or q % 2 == 0:
            raise DomainError(f"{kind} needs odd q >= 3, got {q}")
        m = (q - 1) // 2
        if kind == "odd_D":
            return q - (q - (q + 1) * t) * (j - m - 1) ** 2 / ((m + 1) ** 2 * (1 - t))
        inner = ((1 - t) * j * j + t * (j - m - 1) ** 2) / (4 * (m + 1) ** 2 * (1 - t) ** 2)
        return 4.0 * q / (m + 1) ** 2 * (j * (q - j) + inner)
    raise DomainError(f"unknown oracle {kind!r}; expected one of {ORACLE_KINDS}")


def psi_gap_ev2(q: int, j: int, t: float) -> float:
    """``tr H(p_ev2)^{-1} - psi_A`` at weight j, via l(j, t)."""
    return 16.0 / q ** 3 / (1 - t) ** 2 * l_function(q, j, t)


def psi_gap_odd_A(q: int, j: int, t: float) -> float:
    """``tr H(p_odd)^{-1} - psi_A`` at weight j, simplified form."""
    m = (q - 1) // 2
    a = j - m - 1
    return (q * (q - (q + 1) * t) * (a * a + 2 * a * (j - m) * (m + 1) * (1 - t))
            / ((m + 1) ** 4 * (1 - t) ** 2))


def q2_a_optimum_gaps(t: float) -> tuple:
    """``tr H^{-1} - psi_A`` at x1 (= x2) and at x3 for the q = 2 A-optimum.

    Both carry the factor u_t(xi_t), which vanishes at the root.
    """
    xi = xi_root(t)
    delta = (1 - xi) * (3 * xi - 1 - 2 * t * xi * xi)
    u = u_t(xi, t)
    return (2 * xi - 1) * u / delta ** 2, 2 * (xi - 1) * u / delta ** 2
