"""Finite design spaces and design measures on them.

Two kinds of space are supported: all nonnull binary q-vectors (spring
balance) and all nonnull vectors with entries in {-1, 0, 1} (chemical
balance).  Points are ordered by class (number of nonzero entries)
ascending, then lexicographically, so indices are reproducible.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvalidMeasureError

MAX_BINARY_Q = 20
MAX_CHEMICAL_Q = 12
MASS_TOL = 1e-12
CLASS_NORM_TOL = 1e-9


class SpaceKind(str, enum.Enum):
    BINARY = "Binary"
    CHEMICAL_BALANCE = "ChemicalBalance"


@dataclass(frozen=True, eq=False)
class DesignSpace:
    """An ordered finite set of q-dimensional design points.

    ``points`` is an ``(n, q)`` integer array; ``class_of[i]`` is the number
    of nonzero coordinates of point ``i`` (the weight j for binary spaces).
    """

    q: int
    points: np.ndarray
    kind: SpaceKind
    class_of: np.ndarray
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.class_of.setflags(write=False)
        self._index.update({tuple(int(v) for v in row): i for i, row in enumerate(self.points)})

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def is_binary(self) -> bool:
        return self.kind is SpaceKind.BINARY

    def class_sizes(self) -> np.ndarray:
        """Sizes n_j of the classes j = 1..q."""
        return np.bincount(self.class_of, minlength=self.q + 1)[1:]

    def index_of(self, point: Sequence[int]) -> int:
        key = tuple(int(v) for v in point)
        try:
            return self._index[key]
        except KeyError:
            raise DomainError(f"point {key} is not in the design space") from None

    def as_float(self) -> np.ndarray:
        return self.points.astype(np.float64)

    def to_dict(self) -> dict:
        return {"q": self.q, "kind": self.kind.value, "points": self.points.tolist()}


def enumerate_binary(q: int) -> DesignSpace:
    """All 2^q - 1 nonnull binary q-vectors, by weight then lexicographically."""
    if not isinstance(q, (int, np.integer)) or not 2 <= q <= MAX_BINARY_Q:
        raise CapacityError(f"binary enumeration needs 2 <= q <= {MAX_BINARY_Q}, got {q!r}")
    q = int(q)
    rows = []
    weights = []
    for j in range(1, q + 1):
        block = []
        for ones in itertools.combinations(range(q), j):
            v = [0] * q
            for a in ones:
                v[a] = 1
            block.append(v)
        block.sort()
        rows.extend(block)
        weights.extend([j] * len(block))
    return DesignSpace(q, np.array(rows, dtype=np.int64), SpaceKind.BINARY,
                       np.array(weights, dtype=np.int64))


def enumerate_chemical_balance(q: int) -> DesignSpace:
    """All 3^q - 1 nonnull vectors with entries in {-1, 0, 1}."""
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_CHEMICAL_Q:
        raise CapacityError(
            f"chemical-balance enumeration needs 1 <= q <= {MAX_CHEMICAL_Q}, got {q!r}")
    q = int(q)
    allv = [v for v in itertools.product((-1, 0, 1), repeat=q) if any(v)]
    allv.sort(key=lambda v: (sum(1 for a in v if a), v))
    pts = np.array(allv, dtype=np.int64)
    return DesignSpace(q, pts, SpaceKind.CHEMICAL_BALANCE,
                       np.count_nonzero(pts, axis=1).astype(np.int64))


@dataclass(frozen=True, eq=False)
class DesignMeasure:
    """Nonnegative masses on the points of a design space, summing to one."""

    space: DesignSpace
    masses: np.ndarray
    class_masses: Optional[np.ndarray] = None

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if m.shape != (self.space.n,):
            raise InvalidMeasureError(
                f"expected {self.space.n} masses, got shape {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InvalidMeasureError("masses must be finite and nonnegative")
        if abs(m.sum() - 1.0) > MASS_TOL:
            raise InvalidMeasureError(f"masses sum to {m.sum()!r}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        if self.class_masses is not None:
            pi = np.asarray(self.class_masses, dtype=np.float64)
            pi.setflags(write=False)
            object.__setattr__(self, "class_masses", pi)

    @property
    def support(self) -> np.ndarray:
        """Indices of points carrying positive mass."""
        return np.flatnonzero(self.masses > 0)

    def support_size(self) -> int:
        return int(np.count_nonzero(self.masses > 0))

    def mix(self, other: "DesignMeasure", eps: float) -> "DesignMeasure":
        """The measure ``(1 - eps) * self + eps * other``."""
        if other.space is not self.space:
            raise DomainError("measures live on different spaces")
        m = (1.0 - eps) * self.masses + eps * other.masses
        return DesignMeasure(self.space, m / m.sum())

    def to_dict(self) -> dict:
        return {
            "q": self.space.q,
            "kind": self.space.kind.value,
            "masses": self.masses.tolist(),
            "class_masses": None if self.class_masses is None else self.class_masses.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def measure_from_dict(data: dict, space: Optional[DesignSpace] = None) -> DesignMeasure:
    """Rebuild a measure serialized by :meth:`DesignMeasure.to_dict`."""
    kind = SpaceKind(data["kind"])
    if space is None:
        space = (enumerate_binary if kind is SpaceKind.BINARY
                 else enumerate_chemical_balance)(int(data["q"]))
    cm = data.get("class_masses")
    return DesignMeasure(space, np.array(data["masses"], dtype=np.float64),
                         None if cm is None else np.array(cm, dtype=np.float64))


def uniform_measure(space: DesignSpace) -> DesignMeasure:
    n = space.n
    pi = np.full(space.q, 1.0 / n) if space.is_binary else None
    return DesignMeasure(space, np.full(n, 1.0 / n), pi)


def _check_class_masses(q: int, pi) -> np.ndarray:
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (q,):
        raise InvalidMeasureError(f"need {q} class masses, got shape {pi.shape}")
    if not np.all(np.isfinite(pi)) or np.any(pi < 0):
        raise InvalidMeasureError("class masses must be finite and nonnegative")
    sizes = np.array([math.comb(q, j) for j in range(1, q + 1)], dtype=np.float64)
    total = float(sizes @ pi)
    if abs(total - 1.0) > CLASS_NORM_TOL:
        raise InvalidMeasureError(f"sum_j n_j pi_j = {total!r}, not 1")
    return pi


def class_measure(space: DesignSpace, pi) -> DesignMeasure:
    """Spread mass ``pi[j-1]`` on every point of weight class j."""
    if not space.is_binary:
        raise DomainError("class measures are defined on binary spaces only")
    pi = _check_class_masses(space.q, pi)
    masses = pi[space.class_of - 1]
    total = masses.sum()
    if abs(total - 1.0) > MASS_TOL:
        pi = pi / total
        masses = masses / total
    return DesignMeasure(space, masses, pi)


def collapse_to_classes(measure: DesignMeasure, tol: float = 1e-12):
    """Per-class masses if the measure is constant on each class, else None."""
    space = measure.space
    if not space.is_binary:
        raise DomainError("class collapse needs a binary space")
    out = np.empty(space.q)
    for j in range(1, space.q + 1):
        block = measure.masses[space.class_of == j]
        if block.max() - block.min() > tol:
            return None
        out[j - 1] = block[0]
    return out
