"""Covering numbers, Assouad-dimension estimation and verification.

Covering convention: a ball of radius R around a center is covered by open
r-balls whose centers may be ANY point of the space (doubling-style), not
only points inside the target ball.

``verify_assouad`` checks the at-scale inequality count <= C (R/r)^beta over
every center and every realized scale pair.  Counts are layered so that large
inputs stay tractable:

  1. a cheap certified upper bound restricts one global greedy r-cover to
     the balls that can meet the target (centers within R + r);
  2. rows exceeding the bound are refined with a per-center greedy cover;
  3. rows still exceeding are checked against a (2r)-separated packing lower
     bound, which certifies genuine failures.

A reported pass is therefore sound (upper bounds below the bound), and a
reported certified failure is sound (lower bound above it).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadOrdering, DegenerateGrid, ExactTooLarge
from .space import FiniteMetricSpace, REL_TOL

EXACT_COVER_CAP = 20  # exhaustive set cover only for targets this small


# -- greedy / exact ball covers ----------------------------------------------

def greedy_cover_centers(
    s: FiniteMetricSpace,
    target: list[int],
    r: float,
    candidates: list[int] | None = None,
) -> list[int]:
    """Greedy set cover of `target` by open r-balls; deterministic
    (max new coverage, ties to the lowest candidate index)."""
    if not target:
        return []
    cand = list(range(s.n)) if candidates is None else list(candidates)
    # incidence[c][t]: candidate ball c contains target point t
    incidence = s.dist[np.ix_(cand, target)] < r
    uncovered = np.ones(len(target), dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        gains = (incidence & uncovered).sum(axis=1)
        best = int(gains.argmax())
        if gains[best] == 0:
            raise ValueError("target not coverable by candidate balls")
        chosen.append(cand[best])
        uncovered &= ~incidence[best]
    return chosen


def _exact_min_cover(incidence: np.ndarray, upper: int) -> int:
    """Branch-and-bound minimum set cover size. incidence: (sets, elements)."""
    nsets, nelem = incidence.shape
    # drop dominated sets (subset of another set's coverage)
    keep = []
    for i in range(nsets):
        dominated = False
        for j in range(nsets):
            if i != j and not (incidence[i] & ~incidence[j]).any():
                if (incidence[j] & ~incidence[i]).any() or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(i)
    sets = incidence[keep]
    best = upper

    def recurse(uncovered: np.ndarray, used: int):
        nonlocal best
        if used >= best:
            return
        if not uncovered.any():
            best = used
            return
        counts = (sets & uncovered).sum(axis=1)
        # simple lower bound: ceil(remaining / largest set)
        remaining = int(uncovered.sum())
        cmax = int(counts.max())
        if cmax == 0:
            return
        if used + math.ceil(remaining / cmax) >= best:
            return
        # branch on the hardest element (fewest covering sets)
        elem_cover = sets[:, uncovered]
        per_elem = elem_cover.sum(axis=0)
        hard = int(per_elem.argmin())
        hard_idx = np.flatnonzero(uncovered)[hard]
        for si in np.flatnonzero(sets[:, hard_idx]):
            recurse(uncovered & ~sets[si], used + 1)

    recurse(np.ones(nelem, dtype=bool), 0)
    return best


def covering_number(
    s: FiniteMetricSpace, center: int, R: float, r: float, mode: str = "greedy"
) -> int:
    """Number of open r-balls needed to cover ball(center, R).

    mode="exact" runs exhaustive set cover (target size capped at
    EXACT_COVER_CAP); mode="greedy" returns the deterministic greedy upper
    bound.  exact <= greedy always.
    """
    if not (0 < r < R):
        raise ValueError(f"need 0 < r < R, got r={r}, R={R}")
    target = np.flatnonzero(s.dist[center] < R).tolist()
    if not target:
        return 0
    greedy = len(greedy_cover_centers(s, target, r))
    if mode == "greedy":
        return greedy
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if len(target) > EXACT_COVER_CAP:
        raise ExactTooLarge(
            f"ball has {len(target)} points, exact mode capped at {EXACT_COVER_CAP}")
    incidence = s.dist[:, target] < r
    # dedupe identical coverage rows before the search
    uniq = np.unique(incidence, axis=0)
    uniq = uniq[uniq.any(axis=1)]
    return _exact_min_cover(uniq, greedy)


def packing_number(s: FiniteMetricSpace, target: list[int], sep: float) -> int:
    """Greedy maximal subset of `target` with pairwise distance >= sep.

    Any open ball of radius sep/2 has diameter < sep, so this is a lower
    bound for the number of (sep/2)-balls needed to cover `target`.
    """
    chosen: list[int] = []
    for p in target:
        if all(s.dist[p, q] >= sep for q in chosen):
            chosen.append(p)
    return len(chosen)


# -- reports -------------------------------------------------------------------

@dataclass
class EvidenceRow:
    center: int
    R: float
    r: float
    count: int
    bound: float

    @property
    def ok(self) -> bool:
        return self.count <= self.bound * (1 + REL_TOL)


@dataclass
class AssouadReport:
    """Exponent + constant + scale ceiling with the scale-pair evidence grid.

    passed is True iff every evidence row has count <= bound where
    bound = C * (R/r)^beta.
    """

    beta: float
    C: float
    Rbar: float
    evidence: list[EvidenceRow] = field(default_factory=list)
    passed: bool = True
    certified_failures: list[EvidenceRow] = field(default_factory=list)

    def min_constant(self) -> float:
        """Smallest C that would make every evidence row pass."""
        worst = 0.0
        for row in self.evidence:
            worst = max(worst, row.count / (row.R / row.r) ** self.beta)
        return worst

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "C": self.C,
            "Rbar": self.Rbar,
            "pass": self.passed,
            "evidence": [
                [row.center, row.R, row.r, row.count, row.bound, row.ok]
                for row in self.evidence
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    def to_csv(self, path, labels: tuple[str, ...] | None = None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["center_label", "R", "r", "count", "bound", "pass"])
            for row in self.evidence:
                name = labels[row.center] if labels else str(row.center)
                w.writerow([name, row.R, row.r, row.count, row.bound, row.ok])


# -- scan (estimate beta) ------------------------------------------------------

def default_scales(s: FiniteMetricSpace, ratio: float = 2.0) -> list[float]:
    """Geometric scale ladder from the min positive distance to the diameter."""
    lo, hi = s.min_positive_distance(), s.diameter()
    if lo <= 0 or hi <= 0:
        return []
    scales = []
    v = lo
    while v < hi * (1 + REL_TOL):
        scales.append(v)
        v *= ratio
    return scales


def assouad_scan(
    s: FiniteMetricSpace,
    scales: list[float] | None = None,
    ratio: float = 2.0,
    centers: list[int] | None = None,
) -> AssouadReport:
    """Estimate the Assouad exponent from greedy covering counts.

    For every (R, r) pair off the scale ladder, takes the worst greedy count
    over the given centers (default: all), then fits beta as the least-squares
    slope of log(worst count) against log(R/r) and reports
    C = exp(max positive residual), so every sampled row passes by
    construction.
    """
    if scales is None:
        scales = default_scales(s, ratio)
    scales = sorted(set(scales))
    pairs = [(R, r) for R in scales for r in scales if r < R]
    if len({R / r for R, r in pairs}) < 2:
        raise DegenerateGrid(
            f"need >= 2 distinct R/r ratios, scales were {scales}")
    if centers is None:
        centers = list(range(s.n))

    rows: list[EvidenceRow] = []
    for R, r in pairs:
        worst, worst_c = 0, centers[0]
        for c in centers:
            cnt = covering_number(s, c, R, r, mode="greedy")
            if cnt > worst:
                worst, worst_c = cnt, c
        rows.append(EvidenceRow(worst_c, R, r, worst, 0.0))

    xs = np.array([math.log(row.R / row.r) for row in rows])
    ys = np.array([math.log(max(row.count, 1)) for row in rows])
    beta = float(np.polyfit(xs, ys, 1)[0]) if len(rows) > 1 else 0.0
    beta = max(beta, 0.0)
    resid = ys - beta * xs
    C = max(float(np.exp(resid.max())), 1.0 + REL_TOL)
    for row in rows:
        row.bound = C * (row.R / row.r) ** beta
    return AssouadReport(beta, C, max(scales), rows, passed=True)


# -- verification ---------------------------------------------------------------

def verify_assouad(
    s: FiniteMetricSpace,
    beta: float,
    C: float,
    Rbar: float,
    method: str = "auto",
) -> AssouadReport:
    """Check count <= C (R/r)^beta for all centers and realized 0 < r < R < Rbar.

    The evidence grid holds one row per scale pair: the worst center at that
    pair with its (refined) count.  Failure rows that a packing lower bound
    confirms land in certified_failures.  method="coarse" skips refinement
    (counts then are the restricted-global upper bounds).
    """
    if not C > 1:
        raise ValueError(f"C must exceed 1, got {C}")
    if beta < 0 or Rbar <= 0:
        raise ValueError("beta must be >= 0 and Rbar > 0")
    vals = [v for v in s.realized_distances() if v < Rbar]
    pairs = [(R, r) for R in vals for r in vals if r < R]
    rows: list[EvidenceRow] = []
    certified: list[EvidenceRow] = []
    dist = s.dist
    all_points = list(range(s.n))
    passed = True
    for r in vals:
        r_pairs = [(R, rr) for R, rr in pairs if rr == r]
        if not r_pairs:
            continue
        global_centers = greedy_cover_centers(s, all_points, r)
        gdist = dist[:, global_centers]  # (n, |G|)
        for R, _ in r_pairs:
            bound = C * (R / r) ** beta
            coarse = (gdist < R + r).sum(axis=1)
            center = int(coarse.argmax())
            count = int(coarse[center])
            if count > bound and method != "coarse":
                # refine every center whose coarse bound exceeded; centers
                # whose coarse upper bound already passes keep it
                over = coarse > bound
                under_idx = np.flatnonzero(~over)
                refined_best = int(coarse[under_idx].max(initial=0))
                if refined_best:
                    center = int(under_idx[coarse[under_idx].argmax()])
                for c in np.flatnonzero(over):
                    cnt = covering_number(s, int(c), R, r, mode="greedy")
                    if cnt > refined_best:
                        refined_best, center = cnt, int(c)
                count = refined_best
            row = EvidenceRow(center, R, r, count, bound)
            rows.append(row)
            if not row.ok:
                passed = False
                target = np.flatnonzero(dist[center] < R).tolist()
                if packing_number(s, target, 2 * r) > bound * (1 + REL_TOL):
                    certified.append(row)
    return AssouadReport(beta, C, Rbar, rows, passed, certified)


def fit_assouad_constant(s: FiniteMetricSpace, beta: float, Rbar: float) -> float:
    """Smallest C (coarse counts) at which verify_assouad passes for beta."""
    report = verify_assouad(s, beta, C=1.0 + 2 * REL_TOL, Rbar=Rbar, method="coarse")
    return max(report.min_constant() * (1 + REL_TOL), 1.0 + 2 * REL_TOL)


# -- Assouad constant rescaling (radius-change arithmetic) -----------------------

def rescale_assouad(
    Ceta: float, Reta: float, eta: float, Cbeta: float, Rbeta: float, beta: float
) -> tuple[float, float]:
    """Combine an eta-bound up to radius Reta with a beta-bound up to Rbeta
    into a beta-bound valid up to Reta: C' = Ceta * Cbeta * (Reta/Rbeta)^eta."""
    for name, v in [("Ceta", Ceta), ("Reta", Reta), ("eta", eta),
                    ("Cbeta", Cbeta), ("Rbeta", Rbeta), ("beta", beta)]:
        if v < 0 or (name.startswith(("C", "R")) and v <= 0):
            raise ValueError(f"{name} must be positive, got {v}")
    if Rbeta > Reta:
        raise BadOrdering(f"Rbeta={Rbeta} exceeds Reta={Reta}")
    return Ceta * Cbeta * (Reta / Rbeta) ** eta, Reta
