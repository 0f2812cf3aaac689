"""Hadamard matrices, BIB designs, and the reduced-support measures they give.

Every constructed object passes an exact integer verification gate before
it is returned; a construction bug raises :class:`ConstructionError`
instead of silently producing a wrong design.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .design_space import (DesignMeasure, DesignSpace, enumerate_binary,
                           enumerate_chemical_balance)
from .errors import ConstructionError, DomainError, UnsupportedOrderError
from .information import information

MAX_HADAMARD_ORDER = 48
H_EQUIV_TOL = 1e-12


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _prime_power(n: int) -> Optional[Tuple[int, int]]:
    for p in range(2, n + 1):
        if n % p == 0:
            if not _is_prime(p):
                return None
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
    return None


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    order: int
    entries: np.ndarray
    normalized: bool


def _jacobsthal(p: int) -> np.ndarray:
    squares = {(x * x) % p for x in range(1, p)}
    chi = np.array([0] + [1 if a in squares else -1 for a in range(1, p)], dtype=np.int64)
    idx = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
    return chi[idx]


def _paley1(p: int) -> np.ndarray:
    Q = _jacobsthal(p)
    S = np.zeros((p + 1, p + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(p + 1, dtype=np.int64)


def _paley2(p: int) -> np.ndarray:
    Q = _jacobsthal(p)
    C = np.zeros((p + 1, p + 1), dtype=np.int64)
    C[0, 1:] = 1
    C[1:, 0] = 1
    C[1:, 1:] = Q
    A = np.array([[1, 1], [1, -1]], dtype=np.int64)
    B = np.array([[1, -1], [-1, -1]], dtype=np.int64)
    return np.kron(C, A) + np.kron(np.eye(p + 1, dtype=np.int64), B)


_H2 = np.array([[1, 1], [1, -1]], dtype=np.int64)


def _construct(order: int) -> np.ndarray:
    if order == 1:
        return np.ones((1, 1), dtype=np.int64)
    if order == 2:
        return _H2.copy()
    if order % 4:
        raise UnsupportedOrderError(f"no Hadamard matrix of order {order}")
    if order & (order - 1) == 0:
        return np.kron(_H2, _construct(order // 2))
    p = order - 1
    if _is_prime(p) and p % 4 == 3:
        return _paley1(p)
    if order % 2 == 0:
        p = order // 2 - 1
        if _is_prime(p) and p % 4 == 1:
            return _paley2(p)
        try:
            return np.kron(_H2, _construct(order // 2))
        except UnsupportedOrderError:
            pass
    raise UnsupportedOrderError(f"no implemented construction for Hadamard order {order}")


def normalize(H: np.ndarray) -> np.ndarray:
    """Flip signs so the first row and first column are all +1."""
    H = H * H[0][None, :]
    return H * H[:, 0][:, None]


def hadamard(order: int) -> HadamardMatrix:
    """A normalized Hadamard matrix (Sylvester, Paley I/II, or doubling)."""
    if not 1 <= order <= MAX_HADAMARD_ORDER:
        raise UnsupportedOrderError(f"Hadamard order must lie in 1..{MAX_HADAMARD_ORDER}")
    H = normalize(_construct(order))
    if not (np.all(np.abs(H) == 1) and np.array_equal(H @ H.T, order * np.eye(order, dtype=np.int64))):
        raise ConstructionError(f"Hadamard construction of order {order} failed verification")
    return HadamardMatrix(order, H, True)


def hadamard_order_at_least(n: int) -> int:
    """Smallest supported Hadamard order w >= n."""
    for w in range(max(n, 1), MAX_HADAMARD_ORDER + 1):
        if w in (1, 2) or w % 4 == 0:
            try:
                _construct(w)
            except UnsupportedOrderError:
                continue
            return w
    raise UnsupportedOrderError(f"no supported Hadamard order >= {n}")


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """q x b 0/1 incidence matrix of a BIB(q, b, r, k, lambda) design."""

    q: int
    b: int
    r: int
    k: int
    lam: int
    entries: np.ndarray

    def columns(self) -> list:
        return self.entries.T.tolist()

    def to_dict(self) -> dict:
        return {"q": self.q, "b": self.b, "r": self.r, "k": self.k,
                "lambda": self.lam, "columns": self.columns()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        return "\n".join("".join(str(int(v)) for v in row) for row in self.entries)


def bib_axioms_hold(N: np.ndarray, r: int, k: int, lam: int) -> bool:
    q, b = N.shape
    if not np.all((N == 0) | (N == 1)):
        return False
    if q * r != b * k or r * (k - 1) != lam * (q - 1):
        return False
    if not (np.all(N.sum(axis=0) == k) and np.all(N.sum(axis=1) == r)):
        return False
    NNt = N @ N.T
    off = NNt[~np.eye(q, dtype=bool)]
    return bool(np.all(off == lam))


def _certified(N: np.ndarray, r: int, k: int, lam: int, label: str) -> IncidenceMatrix:
    N = np.ascontiguousarray(N, dtype=np.int64)
    if not bib_axioms_hold(N, r, k, lam):
        raise ConstructionError(f"{label} failed the BIB axiom check")
    return IncidenceMatrix(N.shape[0], N.shape[1], r, k, lam, N)


def bib_d1(m: int) -> IncidenceMatrix:
    """BIB(2m, 4m-2, 2m-1, m, m-1) from a Hadamard matrix of order 4m.

    Residual of the symmetric design on the Hadamard core (symbols = core
    columns, blocks = +1 positions of core rows) with respect to the block
    given by the second row: the symbols are the 2m columns where that row
    is -1, and each remaining row contributes the +1 positions among them.
    """
    if m < 2:
        raise DomainError(f"d1 needs m >= 2, got {m}")
    H = hadamard(4 * m).entries
    cols = np.flatnonzero(H[1] == -1)
    N = (H[2:, cols] == 1).astype(np.int64).T
    return _certified(N, 2 * m - 1, m, m - 1, f"d1(m={m})")


def bib_d3(s: int) -> IncidenceMatrix:
    """BIB(4s+3, 4s+3, 2s+2, 2s+2, s+1): the -1 positions of a Hadamard core."""
    if s < 0:
        raise DomainError(f"d3 needs s >= 0, got {s}")
    H = hadamard(4 * s + 4).entries
    N = (H[1:, 1:] == -1).astype(np.int64)
    return _certified(N, 2 * s + 2, 2 * s + 2, s + 1, f"d3(s={s})")


def _group(q: int, cyclic: bool):
    """Elements and addition of Z_q (cyclic) or of the elementary abelian group of order q."""
    if cyclic:
        elems = [(a,) for a in range(q)]
        mods = (q,)
    else:
        p, e = _prime_power(q)
        elems = [tuple((a // p ** i) % p for i in range(e)) for a in range(q)]
        mods = (p,) * e
    index = {x: i for i, x in enumerate(elems)}
    add = np.empty((q, q), dtype=np.int64)
    sub = np.empty((q, q), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            add[i, j] = index[tuple((a + b) % n for a, b, n in zip(x, y, mods))]
            sub[i, j] = index[tuple((a - b) % n for a, b, n in zip(x, y, mods))]
    return add, sub


def _differences_balanced(blocks, q, lam, sub) -> bool:
    counts = np.zeros(q, dtype=np.int64)
    for blk in blocks:
        for x in blk:
            for y in blk:
                if x != y:
                    counts[sub[x, y]] += 1
    return bool(np.all(counts[1:] == lam))


def _search_base_blocks(q: int, size: int, lam: int, sub: np.ndarray, budget: int):
    """Backtracking search for two base blocks (each containing 0) whose
    differences cover every nonzero group element exactly lam times."""
    counts = np.zeros(q, dtype=np.int64)
    nodes = 0

    def extend(block, start, need_blocks, found):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise StopIteration
        if len(block) == size:
            if need_blocks == 1:
                if np.all(counts[1:] == lam):
                    return found + [list(block)]
                return None
            return extend([0], 1, need_blocks - 1, found + [list(block)])
        for x in range(start, q):
            diffs = [sub[x, y] for y in block] + [sub[y, x] for y in block]
            for d in diffs:
                counts[d] += 1
            if all(counts[d] <= lam for d in diffs):
                res = extend(block + [x], x + 1, need_blocks, found)
                if res is not None:
                    return res
            for d in diffs:
                counts[d] -= 1
        return None

    try:
        return extend([0], 1, 2, [])
    except StopIteration:
        return None


def bib_d2(s: int, budget: int = 2_000_000) -> IncidenceMatrix:
    """BIB(4s+1, 8s+2, 4s+2, 2s+1, 2s+1) by developing two base blocks.

    For prime q the pair {0} + quadratic residues, {0} + nonresidues is
    tried first.  Otherwise base blocks are found by bounded backtracking
    over Z_q, then over the elementary abelian group for prime powers.
    """
    if not 1 <= s <= 4:
        raise DomainError(f"d2 is supported for 1 <= s <= 4, got {s}")
    q = 4 * s + 1
    if _prime_power(q) is None:
        raise DomainError(f"4s+1 = {q} is not a prime power")
    size, lam = 2 * s + 1, 2 * s + 1
    groups = [True] if _is_prime(q) else [True, False]
    for cyclic in groups:
        add, sub = _group(q, cyclic)
        base = None
        if cyclic and _is_prime(q):
            residues = sorted({(x * x) % q for x in range(1, q)})
            nonresidues = [x for x in range(1, q) if x not in residues]
            candidate = [[0] + residues, [0] + nonresidues]
            if _differences_balanced(candidate, q, lam, sub):
                base = candidate
        if base is None:
            base = _search_base_blocks(q, size, lam, sub, budget)
        if base is None:
            continue
        N = np.zeros((q, 2 * q), dtype=np.int64)
        for bi, blk in enumerate(base):
            for g in range(q):
                N[add[blk, g], bi * q + g] = 1
        if len({tuple(c) for c in N.T.tolist()}) != 2 * q:
            continue
        return _certified(N, 4 * s + 2, size, lam, f"d2(s={s})")
    raise ConstructionError(f"no base blocks found for d2(s={s}) within the search budget")


def measure_from_incidence(N: IncidenceMatrix, space: DesignSpace) -> DesignMeasure:
    """Mass 1/b on every column of N (repeated columns accumulate)."""
    masses = np.zeros(space.n)
    for col in N.columns():
        masses[space.index_of(col)] += 1.0
    return DesignMeasure(space, masses / N.b)


def verify_h_equivalence(p_reduced: DesignMeasure, p_full: DesignMeasure, t: float):
    """``(same_H, max_abs_difference)`` for two measures at the same t."""
    a = information(p_reduced, t).H
    b = information(p_full, t).H
    diff = float(np.max(np.abs(a - b)))
    return diff <= H_EQUIV_TOL, diff


def example1_measure(q: int) -> Tuple[DesignSpace, DesignMeasure]:
    """Chemical-balance measure on the columns of q non-leading Hadamard rows.

    With w the smallest supported Hadamard order >= q+1, rows 2..q+1 of the
    normalized matrix give w points of mass 1/w with g = 0 and H = I_q.
    """
    w = hadamard_order_at_least(q + 1)
    H = hadamard(w).entries
    space = enumerate_chemical_balance(q)
    D = H[1:q + 1]
    masses = np.zeros(space.n)
    for col in D.T:
        masses[space.index_of(col)] += 1.0 / w
    return space, DesignMeasure(space, masses / masses.sum())


@dataclass(frozen=True, eq=False)
class ReducedSupport:
    """A BIB-based measure paired with the analytic measure whose H it matches."""

    design_name: str
    design: IncidenceMatrix
    measure: DesignMeasure
    reference_kind: str
    reference: DesignMeasure

    def ledger(self) -> dict:
        return {
            "q": self.design.q,
            "design": self.design_name,
            "reference": self.reference_kind,
            "support_reduced": self.measure.support_size(),
            "support_reference": self.reference.support_size(),
        }


def reduced_support(q: int, space: Optional[DesignSpace] = None) -> ReducedSupport:
    """p[1] for even q, p[2] for q = 1 mod 4, p[3] for q = 3 mod 4."""
    from .analytic import analytic_measure

    if q < 3:
        raise DomainError(f"support reduction needs q >= 3, got {q}")
    space = space or enumerate_binary(q)
    if q % 2 == 0:
        name, N, ref = "d1", bib_d1(q // 2), "ev2"
    elif q % 4 == 1:
        name, N, ref = "d2", bib_d2((q - 1) // 4), "odd"
    else:
        name, N, ref = "d3", bib_d3((q - 3) // 4), "odd"
    return ReducedSupport(name, N, measure_from_incidence(N, space), ref,
                          analytic_measure(ref, q, space=space))
