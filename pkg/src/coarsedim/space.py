"""Finite metric spaces and the primitive geometry every other module uses.

A space is a labeled point set with a full distance matrix.  All operations
are pure: they never mutate their inputs and return plain values, so results
may be shared freely across threads.

Conventions fixed here and relied on everywhere else:

  * balls are open, ``{i : d(center, i) < r}``, with strict float comparison;
  * ``neighborhood(A, 0)`` returns ``A`` (delta = 0 acts as the identity);
  * separated nets use pairwise distance >= r and coverage radius r, greedy
    in ascending index order;
  * the triangle inequality is validated with relative tolerance REL_TOL.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySet,
    NegativeEntry,
    NonPositiveLambda,
    NonSymmetric,
    NonzeroDiagonal,
    TriangleViolation,
)

# Relative comparison tolerance for validation and verifiers.  Strict ball
# membership deliberately does NOT use it.
REL_TOL = 1e-9


def approx_le(a: float, b: float) -> bool:
    """a <= b up to REL_TOL relative slack; used by verifiers, never by balls."""
    return a <= b + REL_TOL * max(1.0, abs(a), abs(b))


def approx_ge(a: float, b: float) -> bool:
    return b <= a + REL_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labeled point set with a validated distance matrix (abstract units)."""

    labels: tuple[str, ...]
    dist: np.ndarray  # (n, n) float64; symmetric, zero diagonal

    def __post_init__(self):
        self.dist.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def min_positive_distance(self) -> float:
        off = self.dist[~np.eye(self.n, dtype=bool)]
        pos = off[off > 0]
        return float(pos.min()) if pos.size else 0.0

    def realized_distances(self) -> list[float]:
        """Sorted distinct positive distance values."""
        vals = np.unique(self.dist)
        return [float(v) for v in vals if v > 0]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = list(indices)
        sub = self.dist[np.ix_(idx, idx)].copy()
        return FiniteMetricSpace(tuple(self.labels[i] for i in idx), sub)

    def set_distance(self, A: Iterable[int], B: Iterable[int]) -> float:
        """inf distance between two nonempty index sets."""
        ia, ib = list(A), list(B)
        return float(self.dist[np.ix_(ia, ib)].min())

    def set_diameter(self, A: Iterable[int]) -> float:
        ia = list(A)
        if len(ia) <= 1:
            return 0.0
        return float(self.dist[np.ix_(ia, ia)].max())


@dataclass(frozen=True)
class PointedSpace:
    """A finite metric space with a distinguished base point index."""

    space: FiniteMetricSpace
    base: int

    def __post_init__(self):
        if not (0 <= self.base < self.space.n):
            raise IndexError(f"base index {self.base} out of range")

    @property
    def n(self) -> int:
        return self.space.n


def validate_metric(matrix, labels: Sequence[str]) -> FiniteMetricSpace:
    """Validate the three metric axioms and label uniqueness.

    Symmetry and the zero diagonal are checked exactly; the triangle
    inequality with relative tolerance REL_TOL (fixture matrices are rounded
    from exact rationals, so a few ulps of slack are expected).
    """
    m = np.asarray(matrix, dtype=float)
    labels = tuple(str(l) for l in labels)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] != len(labels):
        raise ValueError(
            f"matrix size {m.shape[0]} does not match {len(labels)} labels")
    if len(set(labels)) != len(labels):
        raise ValueError("labels are not unique")
    n = m.shape[0]
    for i in range(n):
        if m[i, i] != 0.0:
            raise NonzeroDiagonal(i, float(m[i, i]))
    neg = np.argwhere(m < 0)
    if neg.size:
        i, j = map(int, neg[0])
        raise NegativeEntry(i, j, float(m[i, j]))
    asym = np.argwhere(m != m.T)
    if asym.size:
        i, j = map(int, asym[0])
        raise NonSymmetric(i, j, float(m[i, j]), float(m[j, i]))
    # d(i,k) <= d(i,j) + d(j,k): vectorize over j for each (i,k).
    for j in range(n):
        slack = m[:, j][:, None] + m[j, :][None, :]
        excess = m - slack
        tol = REL_TOL * np.maximum(1.0, np.maximum(m, slack))
        bad = np.argwhere(excess > tol)
        if bad.size:
            i, k = map(int, bad[0])
            raise TriangleViolation(i, j, k, float(excess[i, k]))
    return FiniteMetricSpace(labels, m.copy())


def dilate(s: PointedSpace, lam: float) -> PointedSpace:
    """Multiply every distance by lam > 0; the base point is unchanged."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    return PointedSpace(
        FiniteMetricSpace(s.space.labels, s.space.dist * lam), s.base)


def ball(s: FiniteMetricSpace, center: int, r: float) -> frozenset[int]:
    """Open ball {i : d(center, i) < r}; r = 0 gives the empty set."""
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    return frozenset(np.flatnonzero(s.dist[center] < r).tolist())


def neighborhood(s: FiniteMetricSpace, A: Iterable[int], delta: float) -> frozenset[int]:
    """Union of open delta-balls around A; delta = 0 returns A itself."""
    idx = sorted(set(A))
    if not idx:
        raise EmptySet("neighborhood of the empty set")
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if delta == 0:
        return frozenset(idx)
    near = (s.dist[idx] < delta).any(axis=0)
    return frozenset(np.flatnonzero(near).tolist())


def max_separated_net(
    s: FiniteMetricSpace, r: float, within: Iterable[int] | None = None
) -> frozenset[int]:
    """Greedy maximal r-separated net, ascending index order.

    The result N satisfies d(i, j) >= r for distinct i, j in N, and every
    point of `within` is within distance < r of N (it was rejected because
    some earlier net point was closer than r).
    """
    if not r > 0:
        raise ValueError(f"separation radius must be positive, got {r}")
    candidates = sorted(set(within)) if within is not None else range(s.n)
    net: list[int] = []
    for p in candidates:
        if all(s.dist[p, q] >= r for q in net):
            net.append(p)
    return frozenset(net)


def iterated_neighborhood(
    s: FiniteMetricSpace, x: int, delta: float, n: int | float
) -> frozenset[int]:
    """n-fold delta-neighborhood of x; n = math.inf gives the delta-chain
    component of x (the fixed point, reached in at most |X| steps)."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    current = frozenset([x])
    steps = s.n if n is None or math.isinf(n) else int(n)
    for _ in range(steps):
        grown = neighborhood(s, current, delta)
        if grown == current:
            break
        current = grown
    return current


# -- JSON space format -------------------------------------------------------

def _matrix_from_coords(coords: np.ndarray, metric: str) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    if metric == "linf":
        return np.abs(diff).max(axis=2)
    if metric == "l2":
        return np.sqrt((diff ** 2).sum(axis=2))
    raise ValueError(f"unknown metric {metric!r}")


def space_from_dict(obj: dict) -> FiniteMetricSpace:
    """Load the JSON space format.

    Either {"labels": [...], "matrix": [[...]]} or
    {"labels": [...], "coords": [[...]], "metric": "linf"|"l2",
     "snowflake": p} with coordinates expanded to a matrix at load.
    """
    labels = obj["labels"]
    if "matrix" in obj:
        m = np.asarray(obj["matrix"], dtype=float)
    else:
        coords = np.asarray(obj["coords"], dtype=float)
        m = _matrix_from_coords(coords, obj.get("metric", "linf"))
    p = obj.get("snowflake")
    if p is not None:
        if not (0 < p <= 1):
            raise ValueError(f"snowflake exponent must be in (0, 1], got {p}")
        m = m ** p
    return validate_metric(m, labels)


def space_to_dict(s: FiniteMetricSpace, name: str | None = None) -> dict:
    obj: dict = {"labels": list(s.labels), "matrix": s.dist.tolist()}
    if name is not None:
        obj["name"] = name
    return obj


def load_space(path) -> FiniteMetricSpace:
    with open(path) as fh:
        return space_from_dict(json.load(fh))


def save_space(s: FiniteMetricSpace, path, name: str | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(space_to_dict(s, name), fh)
        fh.write("\n")
